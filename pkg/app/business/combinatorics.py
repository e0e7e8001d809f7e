# combinatorics.py
"""
The xi-sequence of a matrix-presented monoid and the periodic-word families
behind the identity

    det(lambda I - A) = lambda^d - sum_i xi_i lambda^(d - i).

Everything here is exact integer arithmetic.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterator, List, Sequence, Tuple

import numpy as np

from app.business.cayley import is_finite_representation
from app.business.presentation import MonoidPresentation, non_free_generators, right_free_generators
from app.config.settings import settings
from app.utils.errors import InexactDivisionError, InfiniteRepresentationError, InvalidInputError, ResourceCapError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class XiSequence:
    xi: Tuple[int, ...]

    def term(self, n: int) -> int:
        """xi_n, 1-based; zero beyond d."""
        return self.xi[n - 1] if 1 <= n <= len(self.xi) else 0

    @property
    def ell(self) -> int:
        """Largest lag with a nonzero term (0 when every term vanishes)."""
        return max((m for m, value in enumerate(self.xi, start=1) if value), default=0)


@dataclass(frozen=True)
class CharPoly:
    coeffs: Tuple[int, ...]

    def __str__(self):
        degree = len(self.coeffs) - 1
        parts = []
        for power, c in zip(range(degree, -1, -1), self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            size = abs(c)
            if power == 0:
                body = str(size)
            else:
                body = ("" if size == 1 else str(size)) + ("λ" if power == 1 else f"λ^{power}")
            parts.append((sign, body))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        return text + "".join(f" {sign} {body}" for sign, body in parts[1:])


@dataclass(frozen=True)
class PeriodicFamily:
    """Words u_1..u_{n+1} with u_1 = u_{n+1}, stored as 1-based generator tuples."""
    n: int
    words: FrozenSet[Tuple[int, ...]]
    free_generators: FrozenSet[int]

    def __len__(self):
        return len(self.words)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(sorted(self.words))

    def __contains__(self, word):
        return tuple(word) in self.words


def xi_sequence(p: MonoidPresentation) -> XiSequence:
    free = sorted(right_free_generators(p))
    rest = [i - 1 for i in non_free_generators(p)]
    A = p.matrix
    into_free = A[:, [f - 1 for f in free]].sum(axis=1) if free else np.zeros(p.d, dtype=np.int64)

    xi = [len(free)]
    # chains[j]: non-free valid chains of the current length ending in s_{j+1}
    chains = np.zeros(p.d, dtype=object)
    chains[rest] = 1
    mask = np.zeros(p.d, dtype=object)
    mask[rest] = 1
    for _ in range(2, p.d + 1):
        xi.append(int(chains @ into_free))
        chains = (chains @ A.astype(object)) * mask
    logger.debug(f"xi = {xi}")
    return XiSequence(tuple(xi))


def _valid_chains(p: MonoidPresentation, symbols: Sequence[int], size: int, head=()) -> Iterator[Tuple[int, ...]]:
    """A-valid sequences of `size` symbols drawn from `symbols`, continuing `head`."""
    if size == 0:
        yield tuple(head)
        return
    for s in symbols:
        if not head or p.allows(head[-1], s):
            yield from _valid_chains(p, symbols, size - 1, tuple(head) + (s,))


def trace_sequence(A, n: int) -> List[int]:
    """Exact tr(A^1), ..., tr(A^n)."""
    M = np.array(A, dtype=object)
    power = M.copy()
    traces = []
    for _ in range(n):
        traces.append(int(np.trace(power)))
        power = power @ M
    return traces


def enumerate_periodic(p: MonoidPresentation, n: int, cap: int = None) -> PeriodicFamily:
    """P_n: A-valid (n+1)-words with first symbol equal to last."""
    cap = settings.PERIODIC_WORD_CAP if cap is None else cap
    size = trace_sequence(p.A, n)[-1] if n >= 1 else p.d
    if size > cap:
        logger.error(f"❌ |P_{n}| = {size} exceeds cap {cap}")
        raise ResourceCapError(f"|P_{n}|", size, cap)
    all_symbols = range(1, p.d + 1)
    words = {
        chain + (chain[0],)
        for chain in _valid_chains(p, all_symbols, n)
        if p.allows(chain[-1], chain[0])
    } if n >= 1 else set()
    return PeriodicFamily(n, frozenset(words), right_free_generators(p))


def enumerate_Xi(p: MonoidPresentation, n: int) -> PeriodicFamily:
    """Xi_n: periodic (n+1)-words whose n-th symbol is their only right free generator."""
    if n < 1:
        raise InvalidInputError(f"Xi_n needs n >= 1, got {n}")
    free = sorted(right_free_generators(p))
    rest = non_free_generators(p)
    words = set()
    for chain in _valid_chains(p, rest, n - 1):
        for f in free:
            if not chain or p.allows(chain[-1], f):
                u = chain + (f,)
                words.add(u + (u[0],))
    return PeriodicFamily(n, frozenset(words), frozenset(free))


def translates(fam: PeriodicFamily) -> PeriodicFamily:
    """T(Xi_n): every cyclic rotation u_i..u_n u_1..u_i."""
    rotated = set()
    for u in fam.words:
        cycle = u[:-1]
        for i in range(len(cycle)):
            rotated.add(cycle[i:] + cycle[:i + 1])
    return PeriodicFamily(fam.n, frozenset(rotated), fam.free_generators)


def insertions(pm: PeriodicFamily, xn: PeriodicFamily) -> PeriodicFamily:
    """L(P_m, Xi_n): splice v_1..v_n right after the first free generator of u."""
    spliced = set()
    for u in pm.words:
        s = next((i for i, g in enumerate(u, start=1) if g in pm.free_generators), None)
        if s is None:
            logger.debug(f"{u} has no free generator, skipped")
            continue
        for v in xn.words:
            spliced.add(u[:s] + v[:xn.n] + u[s:])
    return PeriodicFamily(pm.n + xn.n, frozenset(spliced), pm.free_generators | xn.free_generators)


def newton_identity(traces: Sequence[int], xi: XiSequence, n: int) -> Tuple[int, int]:
    """Both sides of tr(A^n) = n xi_n + sum_{i<n} tr(A^i) xi_{n-i}."""
    if not 1 <= n <= len(traces):
        raise InvalidInputError(f"identity needs 1 <= n <= {len(traces)}, got {n}")
    rhs = n * xi.term(n) + sum(traces[i - 1] * xi.term(n - i) for i in range(1, n))
    return traces[n - 1], rhs


def partition_terms(p: MonoidPresentation, n: int) -> dict:
    if n < 1:
        raise InvalidInputError(f"partition of P_n needs n >= 1, got {n}")
    traces = trace_sequence(p.A, n)
    xi = xi_sequence(p)
    lhs, rhs = newton_identity(traces, xi, n)
    return {
        "trace": lhs,
        "translates": n * xi.term(n),
        "insertions": [traces[i - 1] * xi.term(n - i) for i in range(1, n)],
        "total": rhs,
    }


def partition_check(p: MonoidPresentation, n: int, enumerate_sets: bool = True, cap: int = None) -> bool:
    if n < 1:
        raise InvalidInputError(f"partition of P_n needs n >= 1, got {n}")
    if not is_finite_representation(p):
        raise InfiniteRepresentationError("partition of P_n needs a finite representation")
    terms = partition_terms(p, n)
    numeric_ok = terms["trace"] == terms["total"]
    if not enumerate_sets:
        return numeric_ok

    whole = enumerate_periodic(p, n, cap=cap)
    parts = [translates(enumerate_Xi(p, n))]
    parts += [insertions(enumerate_periodic(p, n - i, cap=cap), enumerate_Xi(p, i)) for i in range(1, n)]
    union = frozenset().union(*(part.words for part in parts))
    disjoint = sum(len(part) for part in parts) == len(union)
    covers = union == whole.words
    logger.info(f"Partition of P_{n}: {len(whole)} words, disjoint={disjoint}, covers={covers}, numeric={numeric_ok}")
    return numeric_ok and disjoint and covers


def char_poly_from_xi(xi: XiSequence) -> CharPoly:
    return CharPoly((1,) + tuple(-value for value in xi.xi))


def char_poly_trace_recursion(A) -> CharPoly:
    """
    Coefficients of det(A - lambda I) from traces of powers:
    b_0 = (-1)^n, b_k = -(b_{k-1} t_1 + ... + b_1 t_{k-1} + b_0 t_k) / k,
    returned sign-normalized so the leading coefficient is 1.
    """
    M = np.array(A, dtype=object)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError("matrix must be square")
    n = M.shape[0]
    traces = trace_sequence(M, n)
    b = [Fraction((-1) ** n)]
    for k in range(1, n + 1):
        value = -sum(b[k - j] * traces[j - 1] for j in range(1, k + 1)) / k
        if value.denominator != 1:
            raise InexactDivisionError(f"b_{k} = {value} is not an integer")
        b.append(value)
    sign = (-1) ** n
    return CharPoly(tuple(int(c) * sign for c in b))


def xi_from_traces(traces: Sequence[int], d: int) -> XiSequence:
    """Invert the Newton-style identity: xi_n = (tr(A^n) - sum_{i<n} tr(A^i) xi_{n-i}) / n."""
    xi = []
    for n in range(1, d + 1):
        rest = traces[n - 1] - sum(traces[i - 1] * xi[n - i - 1] for i in range(1, n))
        if rest % n:
            raise InexactDivisionError(f"xi_{n} = {rest}/{n} is not an integer")
        xi.append(rest // n)
    return XiSequence(tuple(xi))
