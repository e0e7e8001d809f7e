# spectrum.py
"""
Degree spectra: every value a G-SFT over a fixed presentation can attain.

For two symbols the attainable degrees are ln' of the largest real root of
x^d - sum_i alpha_i x^(d-i) over 0 <= alpha <= xi; for k symbols they come
from companion-block matrices with l x l blocks C_i (l <= k) whose rows sum
to at most xi_i.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.business.cayley import is_finite_representation
from app.business.combinatorics import XiSequence, xi_sequence
from app.business.degree import Snre
from app.business.linalg import block_companion, parallel_map, spectral_radius
from app.business.presentation import MonoidPresentation
from app.business.sft import EssentialSet
from app.config.settings import settings
from app.utils.errors import InfiniteRepresentationError, InvalidInputError, ResourceCapError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphaVector:
    alpha: Tuple[int, ...]

    def beta(self, xi: XiSequence) -> Tuple[int, ...]:
        return tuple(xi.term(m) - a for m, a in enumerate(self.alpha, start=1))

    def fits(self, xi: XiSequence) -> bool:
        return len(self.alpha) == len(xi.xi) and all(0 <= b for b in self.beta(xi)) and min(self.alpha, default=0) >= 0


@dataclass(frozen=True)
class SpectrumEntry:
    degree: float
    lam: float
    witness: tuple


@dataclass(frozen=True)
class SpectrumSet:
    entries: Tuple[SpectrumEntry, ...]

    @property
    def degrees(self) -> List[float]:
        return [entry.degree for entry in self.entries]

    def __len__(self):
        return len(self.entries)

    def __contains__(self, value: float):
        return any(abs(value - d) <= 1e-9 for d in self.degrees)


def ln_prime(lam: float) -> float:
    return math.log(lam) if lam > 1 else 0.0


def _characteristic(alpha: Sequence[int], x: float) -> float:
    value = 1.0
    for a in alpha:
        value = value * x - a
    return value


def max_real_root(alpha, tol: float = 1e-12) -> float:
    """Largest real root of x^L - sum_m alpha_m x^(L-m); the unique positive one when alpha != 0."""
    alpha = tuple(alpha.alpha if isinstance(alpha, AlphaVector) else alpha)
    if any(a < 0 for a in alpha):
        raise InvalidInputError("alpha entries must be nonnegative")
    total = sum(alpha)
    if total == 0:
        return 0.0
    if total == 1:
        return 1.0
    lo, hi = 1.0, 1.0 + total
    for _ in range(200):
        if hi - lo <= tol * hi:
            break
        mid = (lo + hi) / 2
        if _characteristic(alpha, mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _collect(candidates: List[SpectrumEntry], tol: float) -> SpectrumSet:
    """Sort, merge degrees within tol, keep the smallest witness of each group."""
    ordered = sorted(candidates, key=lambda entry: (entry.degree, entry.witness))
    groups: List[List[SpectrumEntry]] = []
    for entry in ordered:
        if groups and entry.degree - groups[-1][0].degree <= tol:
            groups[-1].append(entry)
        else:
            groups.append([entry])
    entries = []
    for group in groups:
        best = min(group, key=lambda entry: entry.witness)
        entries.append(SpectrumEntry(group[0].degree, best.lam, best.witness))
    return SpectrumSet(tuple(entries))


def _require_finite(p: MonoidPresentation):
    if not is_finite_representation(p):
        raise InfiniteRepresentationError("degree spectrum needs a finite representation")


def spectrum_k2(p: MonoidPresentation, dedup_tol: Optional[float] = None) -> SpectrumSet:
    dedup_tol = settings.DEDUP_TOL if dedup_tol is None else dedup_tol
    _require_finite(p)
    xi = xi_sequence(p)
    candidates = []
    for alpha in itertools.product(*(range(value + 1) for value in xi.xi)):
        lam = max_real_root(alpha)
        candidates.append(SpectrumEntry(ln_prime(lam), lam, alpha))
    logger.info(f"{len(candidates)} alpha vectors under xi={xi.xi}")
    return _collect(candidates, dedup_tol)


def _block_rows(xi: XiSequence, l: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """One row of [C_1 ... C_L]: per lag, l entries summing to at most xi_i."""
    per_lag = [
        [v for v in itertools.product(range(xi.term(m) + 1), repeat=l) if sum(v) <= xi.term(m)]
        for m in range(1, xi.ell + 1)
    ]
    return list(itertools.product(*per_lag))


def family_size(xi: XiSequence, k: int) -> int:
    """sum over l = 1..k of (prod_i C(xi_i + l, l))^l."""
    return sum(math.prod(math.comb(xi.term(m) + l, l) for m in range(1, xi.ell + 1)) ** l for l in range(1, k + 1))


def _permuted(matrix, perm) -> tuple:
    return tuple(tuple(tuple(lag[b] for b in perm) for lag in matrix[a]) for a in perm)


def _canonical(matrix) -> bool:
    """Smallest under simultaneous relabeling of the l symbols."""
    return all(matrix <= _permuted(matrix, perm) for perm in itertools.permutations(range(len(matrix))))


def _blocks(matrix, ell: int) -> List[np.ndarray]:
    return [np.array([[row[m][q] for q in range(len(matrix))] for row in matrix], dtype=np.int64) for m in range(ell)]


def spectrum_general(p: MonoidPresentation, k: int, dedup_tol: Optional[float] = None,
                     cap: Optional[int] = None, threads: Optional[int] = None) -> SpectrumSet:
    """
    Every degree a k-symbol G-SFT on p can attain.

    Args:
        p: Monoid presentation with a finite representation
        k: Number of SFT symbols, at least 1
        dedup_tol: Degrees closer than this are merged (settings default when None)
        cap: Maximum size of the companion-block family before symmetry reduction
        threads: Worker threads for the spectral radii

    Returns:
        SpectrumSet sorted by degree, each entry keeping its smallest witness
    """
    dedup_tol = settings.DEDUP_TOL if dedup_tol is None else dedup_tol
    cap = settings.SPECTRUM_MATRIX_CAP if cap is None else cap
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    _require_finite(p)
    xi = xi_sequence(p)
    total = family_size(xi, k)
    if total > cap:
        logger.error(f"❌ Spectrum family has {total} matrices, cap is {cap}")
        raise ResourceCapError("spectrum matrices", total, cap)
    if xi.ell == 0:
        return SpectrumSet((SpectrumEntry(0.0, 0.0, ()),))

    family = []
    for l in range(1, k + 1):
        rows = _block_rows(xi, l)
        for matrix in itertools.product(rows, repeat=l):
            # one representative per relabeling of the l symbols
            if l == 1 or _canonical(matrix):
                family.append(matrix)
    logger.info(f"{len(family)} of {total} matrices left after symmetry reduction")

    radii = parallel_map(lambda matrix: spectral_radius(block_companion(_blocks(matrix, xi.ell))), family, threads)
    candidates = [
        SpectrumEntry(ln_prime(rho), rho, (len(matrix),) + matrix)
        for matrix, rho in zip(family, radii)
    ]
    return _collect(candidates, dedup_tol)


def realize_snre(p: MonoidPresentation, alpha) -> Snre:
    """
    Two-symbol system gamma_1 = prod_m gamma_1^alpha_m gamma_2^(xi_m - alpha_m),
    gamma_2 = prod_m gamma_2^xi_m, with symbol 2 inessential.
    """
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector(tuple(alpha))
    xi = xi_sequence(p)
    if not alpha.fits(xi):
        raise InvalidInputError(f"alpha={alpha.alpha} is not below xi={xi.xi}")
    beta = alpha.beta(xi)
    lags = range(xi.ell)
    first = tuple(value for m in lags for value in (alpha.alpha[m], beta[m]))
    second = tuple(value for m in lags for value in (0, xi.xi[m]))
    live = frozenset({1}) if any(alpha.alpha) else frozenset()
    essential = EssentialSet(essential=live, alive=frozenset({1, 2}), persistent=live)
    return Snre(k=2, xi=xi, equations={}, essential=essential, row_options={1: {first: ()}, 2: {second: ()}})
