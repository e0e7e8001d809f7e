# linalg.py
"""
Spectral radius of nonnegative integer matrices, block-companion builders and
the exact characteristic-polynomial cross-check.
"""
import asyncio
import logging
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
import sympy as sp
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.business.combinatorics import char_poly_trace_recursion
from app.config.settings import settings
from app.utils.errors import NumericalError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def block_companion(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """
    [[B_1 B_2 ... B_l],
     [I   0  ...  0 ],
     ...
     [0  ...  I   0 ]]
    """
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    e = blocks[0].shape[0]
    ell = len(blocks)
    M = np.zeros((e * ell, e * ell), dtype=np.int64)
    M[:e, :] = np.hstack(blocks)
    if ell > 1:
        M[e:, :-e] = np.eye(e * (ell - 1), dtype=np.int64)
    return M


def companion(alpha: Sequence[int]) -> np.ndarray:
    """Companion matrix of x^l - alpha_1 x^(l-1) - ... - alpha_l."""
    return block_companion([np.array([[a]], dtype=np.int64) for a in alpha])


def _component_radius(B: np.ndarray, tol: float, max_iterations: int) -> float:
    """Power iteration on an irreducible B with positive diagonal, Collatz-Wielandt bracket."""
    x = np.ones(B.shape[0])
    for iteration in range(max_iterations):
        y = B @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol * max(1.0, hi):
            logger.debug(f"Converged after {iteration + 1} iterations: [{lo}, {hi}]")
            return (lo + hi) / 2
        x = y / y.max()
    raise NumericalError(f"power iteration did not converge in {max_iterations} iterations")


def power_radius(M, tol: Optional[float] = None, max_iterations: Optional[int] = None) -> float:
    """rho(M) as the largest rho over strongly connected components, each from M_C + I."""
    tol = settings.RADIUS_TOL if tol is None else tol
    max_iterations = settings.MAX_POWER_ITERATIONS if max_iterations is None else max_iterations
    M = np.asarray(M, dtype=float)
    if M.size == 0 or not M.any():
        return 0.0
    count, labels = connected_components(csr_matrix(M > 0), directed=True, connection="strong")
    rho = 0.0
    for c in range(count):
        members = np.flatnonzero(labels == c)
        block = M[np.ix_(members, members)]
        if not block.any():
            continue
        shifted = block + np.eye(len(members))
        rho = max(rho, _component_radius(shifted, tol, max_iterations) - 1.0)
    return rho


def exact_radius(M, tol: Optional[float] = None) -> float:
    """Largest real root of the exact characteristic polynomial, refined on rationals."""
    tol = settings.RADIUS_TOL if tol is None else tol
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0.0
    x = sp.Symbol("x")
    poly = sp.Poly(list(char_poly_trace_recursion(M).coeffs), x).sqf_part()
    intervals = poly.intervals()
    if not intervals:
        raise NumericalError("characteristic polynomial has no real root")
    (a, b), _ = max(intervals, key=lambda item: item[0][1])
    if a == b:
        return float(a)
    a, b = poly.refine_root(a, b, eps=sp.Rational(str(tol)))
    return float((a + b) / 2)


def spectral_radius(M, tol: Optional[float] = None, cross_check: Optional[bool] = None) -> float:
    """Power-iteration rho(M), confirmed by exact_radius up to CROSS_CHECK_MAX_DIM unless cross_check is False."""
    M = np.asarray(M)
    rho = power_radius(M, tol)
    cross_check = settings.CROSS_CHECK_RADIUS if cross_check is None else cross_check
    if cross_check and 0 < M.shape[0] <= settings.CROSS_CHECK_MAX_DIM:
        exact = exact_radius(M)
        if abs(exact - rho) > 1e-9 * max(1.0, exact):
            logger.error(f"❌ Power iteration gave {rho}, characteristic polynomial gave {exact}")
            raise NumericalError(f"spectral radius mismatch: {rho} vs {exact}")
    return rho


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """fn over items in input order, on up to `threads` worker threads."""
    threads = settings.THREADS if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    async def _run():
        semaphore = asyncio.Semaphore(threads)

        async def _one(item):
            async with semaphore:
                return await asyncio.to_thread(fn, item)

        return await asyncio.gather(*(_one(item) for item in items))

    return list(asyncio.run(_run()))
