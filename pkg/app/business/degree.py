# degree.py
"""
Topological degree of a G-SFT from its recurrence system.

For a presentation with a finite representation F the recurrence is put in
lag form: one consistent labeling of the non-free part of F per option, each
leaf g s_f (s_f right free) at depth m contributing gamma_{j, n - m} for the
label j it carries. A row option is the vector of those contributions counted
by (lag, symbol); a simple subsystem picks one option per live root symbol.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from app.business.cayley import FollowerAutomaton, Source, as_automaton, is_finite_representation
from app.business.combinatorics import XiSequence, xi_sequence
from app.business.linalg import block_companion, parallel_map, spectral_radius
from app.business.presentation import MonoidPresentation, Word, right_free_generators
from app.business.sft import (
    EssentialSet,
    SaturationProfile,
    SftRules,
    essential_from_profile,
    saturation_profile,
)
from app.config.settings import settings
from app.utils.errors import InvalidInputError, ResourceCapError

logger = logging.getLogger(__name__)

# counts[(m - 1) * k + (j - 1)]: leaves at lag m labelled j
RowOption = Tuple[int, ...]
# (vertex word relative to the root, label) in depth-first generator order
Choice = Tuple[Tuple[Tuple[int, ...], int], ...]


@dataclass(frozen=True)
class Factor:
    """sum_j coeffs[j] gamma^[target]_{j, n-1}, one per defined step q -s-> target."""
    target: str
    generator: int
    coeffs: Tuple[int, ...]


@dataclass(frozen=True)
class LagFactor:
    lag: int
    word: Word
    generator: int
    coeffs: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Snre:
    k: int
    xi: Optional[XiSequence]
    equations: Dict[Tuple[str, int], Tuple[Factor, ...]]
    essential: EssentialSet
    row_options: Dict[int, Dict[RowOption, Choice]] = field(default_factory=dict)
    lag_factors: Dict[int, Tuple[LagFactor, ...]] = field(default_factory=dict)
    initial: str = "q0"

    @property
    def ell(self) -> int:
        return self.xi.ell if self.xi is not None else 0

    @property
    def rows(self) -> Tuple[int, ...]:
        """Live root symbols that have at least one option."""
        return tuple(p for p in self.essential.live if self.row_options.get(p))

    def count(self, option: RowOption, m: int, j: int) -> int:
        return option[(m - 1) * self.k + (j - 1)]


@dataclass(frozen=True)
class SimpleSubsystem:
    rows: Tuple[int, ...]
    options: Tuple[RowOption, ...]
    choices: Tuple[Choice, ...]

    def labels(self, p: int) -> Dict[str, int]:
        """Vertex word -> chosen label for row p."""
        choice = self.choices[self.rows.index(p)]
        return {str(Word(w)): label for w, label in choice}


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    entries: np.ndarray
    labels: Tuple
    ell: int
    blocks: Tuple[np.ndarray, ...] = ()

    @property
    def block_size(self) -> int:
        return len(self.labels)

    def key(self) -> bytes:
        return self.entries.tobytes()


@dataclass(frozen=True)
class DegreeResult:
    degree: float
    spectral_radius: float
    full_degree: bool
    essential: EssentialSet
    k: int
    xi: Optional[XiSequence] = None
    witness: Optional[SimpleSubsystem] = None
    matrix: Optional[AdjacencyMatrix] = None
    subsystem_count: int = 0
    reference_radius: Optional[float] = None


def _equations(aut: FollowerAutomaton, r: SftRules) -> Dict[Tuple[str, int], Tuple[Factor, ...]]:
    return {
        (q, i): tuple(Factor(target, s, tuple(r.rules[s - 1][i - 1])) for s, target in aut.successors(q))
        for q in aut.states
        for i in range(1, r.k + 1)
    }


class _LagFormBuilder:
    """Row options of every root symbol, memoized on (last generator, label, depth)."""

    def __init__(self, p: MonoidPresentation, r: SftRules, profile: SaturationProfile,
                 live: FrozenSet[int], ell: int, cap: int):
        self.p, self.r, self.profile = p, r, profile
        self.live, self.ell, self.cap = live, ell, cap
        self.free = right_free_generators(p)
        self.memo: Dict[Tuple[int, int, int], Dict[RowOption, Choice]] = {}

    def _leaf(self, depth: int, j: int) -> RowOption:
        option = [0] * (self.ell * self.r.k)
        if j in self.live:
            option[depth * self.r.k + (j - 1)] = 1
        return tuple(option)

    def _child_options(self, s: int, label: int, depth: int) -> Dict[RowOption, Choice]:
        found = {}
        for j in range(1, self.r.k + 1):
            if not self.r.allows(s, label, j):
                continue
            if s in self.free:
                if self.profile.alive("q0", j):
                    found.setdefault(self._leaf(depth, j), (((s,), j),))
                continue
            if not self.profile.alive(f"q{s}", j):
                continue
            for option, choice in self.options(s, j, depth + 1).items():
                found.setdefault(option, (((s,), j),) + tuple(((s,) + w, l) for w, l in choice))
        return found

    def options(self, last: int, label: int, depth: int) -> Dict[RowOption, Choice]:
        key = (last, label, depth)
        if key in self.memo:
            return self.memo[key]
        combined = {(0,) * (self.ell * self.r.k): ()}
        for s in range(1, self.p.d + 1):
            if last and not self.p.allows(last, s):
                continue
            child = self._child_options(s, label, depth)
            if not child:
                combined = {}
                break
            merged = {}
            for left, left_choice in combined.items():
                for right, right_choice in child.items():
                    merged.setdefault(tuple(a + b for a, b in zip(left, right)), left_choice + right_choice)
            if len(merged) > self.cap:
                logger.error(f"❌ {len(merged)} row options at depth {depth}, cap is {self.cap}")
                raise ResourceCapError("row options", len(merged), self.cap)
            combined = merged
        self.memo[key] = combined
        return combined


def _lag_factors(p: MonoidPresentation, r: SftRules, root: int, choice: Choice) -> Tuple[LagFactor, ...]:
    """Leaf factors under one labeling, ordered by lag then word."""
    labels = {(): root}
    labels.update(dict(choice))
    free = right_free_generators(p)
    factors = [
        LagFactor(len(w), Word(w, reduced=True), w[-1], tuple(r.rules[w[-1] - 1][labels[w[:-1]] - 1]))
        for w in labels
        if w and w[-1] in free
    ]
    return tuple(sorted(factors, key=lambda f: (f.lag, f.word.symbols)))


def build_snre(p: Source, r: SftRules, essential: Optional[EssentialSet] = None,
               cap: Optional[int] = None) -> Snre:
    """
    Assemble the recursive system for the block counts of r over p.

    Args:
        p: Monoid presentation or follower automaton carrying the shift
        r: Local rules, one k x k matrix per generator
        essential: Precomputed essential set; read off the clamped trajectory when omitted
        cap: Maximum number of row options tried per symbol

    Returns:
        Snre with the per-state equations, plus the lag-form row options when p
        is a presentation with a finite representation
    """
    cap = settings.SUBSYSTEM_CAP if cap is None else cap
    aut = as_automaton(p)
    r.check_generators(aut.d)
    profile = saturation_profile(aut, r)
    if essential is None:
        essential = essential_from_profile(profile, aut.initial, r.k)
    equations = _equations(aut, r)
    if isinstance(p, FollowerAutomaton):
        return Snre(r.k, None, equations, essential, initial=aut.initial)
    if not is_finite_representation(p):
        logger.warning("No finite representation, lag form skipped")
        return Snre(r.k, None, equations, essential, initial=aut.initial)

    # lag form: a set of exponent rows per alive symbol
    xi = xi_sequence(p)
    builder = _LagFormBuilder(p, r, profile, frozenset(essential.live), xi.ell, cap)
    row_options, lag_factors = {}, {}
    for i in sorted(essential.alive):
        options = builder.options(0, i, 0)
        if options:
            row_options[i] = options
            lag_factors[i] = _lag_factors(p, r, i, next(iter(options.values())))
    logger.info(f"SNRE: xi={xi.xi}, options per row {[len(row_options[i]) for i in sorted(row_options)]}")
    return Snre(r.k, xi, equations, essential, row_options, lag_factors, aut.initial)


def _undominated(options: Dict[RowOption, Choice]) -> Dict[RowOption, Choice]:
    vectors = list(options)
    keep = {}
    for a in vectors:
        dominated = any(b != a and all(x <= y for x, y in zip(a, b)) for b in vectors)
        if not dominated:
            keep[a] = options[a]
    return keep


def adjacency_matrix(snre: Snre, rows: Sequence[int], options: Sequence[RowOption]) -> AdjacencyMatrix:
    index = {p: n for n, p in enumerate(rows)}
    blocks = []
    for m in range(1, snre.ell + 1):
        B = np.zeros((len(rows), len(rows)), dtype=np.int64)
        for p, option in zip(rows, options):
            for q in rows:
                B[index[p], index[q]] = snre.count(option, m, q)
        blocks.append(B)
    return AdjacencyMatrix(block_companion(blocks), tuple(rows), snre.ell, tuple(blocks))


def enumerate_simple_subsystems(snre: Snre, essential: Optional[EssentialSet] = None,
                                cap: Optional[int] = None,
                                prune: bool = False) -> List[Tuple[SimpleSubsystem, AdjacencyMatrix]]:
    """
    One subsystem per combination of row options, rows in increasing symbol order.
    Distinct options give distinct matrices, so no further deduplication is needed.
    With `prune`, options dominated entrywise by another option of the same row are dropped.
    """
    cap = settings.SUBSYSTEM_CAP if cap is None else cap
    essential = snre.essential if essential is None else essential
    rows = tuple(p for p in snre.rows if p in essential.live)
    if not rows or snre.ell == 0:
        return []
    per_row = [snre.row_options[p] for p in rows]
    if prune:
        per_row = [_undominated(options) for options in per_row]
    total = math.prod(len(options) for options in per_row)
    if total > cap:
        logger.error(f"❌ {total} simple subsystems, cap is {cap}")
        raise ResourceCapError("simple subsystems", total, cap)

    subsystems = []
    for combo in itertools.product(*(list(options.items()) for options in per_row)):
        chosen = tuple(option for option, _ in combo)
        choices = tuple(choice for _, choice in combo)
        subsystems.append((SimpleSubsystem(rows, chosen, choices), adjacency_matrix(snre, rows, chosen)))
    logger.info(f"{len(subsystems)} simple subsystems over rows {list(rows)}")
    return subsystems


def full_degree_rows(snre: Snre) -> FrozenSet[int]:
    """
    Largest set S of live rows such that every p in S has an option whose
    leaves all carry labels in S, xi_m of them at each lag m.
    """
    if snre.xi is None or snre.ell == 0:
        return frozenset()
    S = set(snre.rows)
    changed = True
    while changed:
        changed = False
        for p in sorted(S):
            if not any(
                all(sum(snre.count(option, m, q) for q in S) == snre.xi.term(m) for m in range(1, snre.ell + 1))
                for option in snre.row_options[p]
            ):
                S.discard(p)
                changed = True
    return frozenset(S)


def degree_from_snre(snre: Snre, threads: Optional[int] = None, cap: Optional[int] = None,
                     cross_check: Optional[bool] = None,
                     reference_radius: Optional[float] = None) -> DegreeResult:
    if snre.xi is None:
        raise InvalidInputError("recurrence system has no lag form")
    empty = DegreeResult(0.0, 0.0, False, snre.essential, snre.k, snre.xi, reference_radius=reference_radius)
    if not snre.essential.live:
        logger.warning("No live essential symbols, degree is 0")
        return empty
    subsystems = enumerate_simple_subsystems(snre, cap=cap, prune=True)
    if not subsystems:
        return empty

    radii = parallel_map(lambda item: spectral_radius(item[1].entries, cross_check=cross_check), subsystems, threads)
    best = max(radii)
    # first in product order among ties
    winner = next(n for n, rho in enumerate(radii) if rho >= best - 1e-12 * max(1.0, best))
    subsystem, matrix = subsystems[winner]
    rho = radii[winner]
    full = bool(full_degree_rows(snre))
    logger.info(f"Degree {math.log(rho) if rho > 1 else 0.0} from rho={rho} over {len(subsystems)} subsystems")
    return DegreeResult(
        degree=math.log(rho) if rho > 1 else 0.0,
        spectral_radius=rho,
        full_degree=full,
        essential=snre.essential,
        k=snre.k,
        xi=snre.xi,
        witness=subsystem,
        matrix=matrix,
        subsystem_count=len(subsystems),
        reference_radius=reference_radius,
    )


def presentation_radius(p: MonoidPresentation) -> float:
    return spectral_radius(p.matrix)


def degree(p: Source, r: SftRules, threads: Optional[int] = None, cap: Optional[int] = None,
           cross_check: Optional[bool] = None) -> DegreeResult:
    """
    Topological degree of the G-SFT given by r on the monoid p.

    Args:
        p: Monoid presentation or follower automaton
        r: Local rules, one k x k matrix per generator
        threads: Worker threads for the subsystem radii (settings default when None)
        cap: Maximum number of simple subsystems examined
        cross_check: Confirm each spectral radius with the exact root finder

    Returns:
        DegreeResult with the degree, its witness matrix and the essential set
    """
    # presentations without a finite F only have the automaton route
    if isinstance(p, FollowerAutomaton) or not is_finite_representation(p):
        from app.business.followers import degree_on_automaton

        if isinstance(p, MonoidPresentation):
            logger.warning("No finite representation, falling back to the follower automaton")
        return degree_on_automaton(as_automaton(p), r, threads=threads, cap=cap, cross_check=cross_check)
    snre = build_snre(p, r, cap=cap)
    return degree_from_snre(snre, threads, cap, cross_check, reference_radius=presentation_radius(p))


def full_degree_check(p: Source, r: SftRules) -> bool:
    if isinstance(p, FollowerAutomaton) or not is_finite_representation(p):
        raise InvalidInputError("full-degree check needs a presentation with a finite representation")
    return bool(full_degree_rows(build_snre(p, r)))


def eigen_identity_residual(M, rho: float, ell: int, e: int) -> float:
    """||M v - rho v||_inf / ||v||_inf for v = (rho^(l-1), ..., rho, 1) kron 1_e."""
    v = np.kron(rho ** np.arange(ell - 1, -1, -1, dtype=float), np.ones(e))
    M = np.asarray(M, dtype=float)
    return float(np.abs(M @ v - rho * v).max() / np.abs(v).max())


def classify_full_degree_k2(result: DegreeResult) -> Optional[str]:
    """Which full-degree case a two-symbol result falls in, None if it is not full-degree."""
    if result.k != 2 or not result.full_degree:
        return None
    live = set(result.essential.live)
    if live == {1, 2}:
        return "both-essential"
    if live == {1}:
        return "eta-equals-xi"
    if live == {2}:
        return "iota-equals-xi"
    return None
