# sft.py
"""
One-step G-SFTs: a labeled tree t is admissible when every length-additive
edge g -> g s_l carries labels (t_g, t_{g s_l}) allowed by rules[l].

Absorbed products (g s_l = g) impose nothing.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.business.cayley import FollowerAutomaton, Source, as_automaton, build_ball
from app.config.settings import settings
from app.utils.errors import InvalidInputError, ResourceCapError, UndefinedTermError

logger = logging.getLogger(__name__)

Gamma = Dict[str, Tuple[int, ...]]


class SftRules(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    rules: Tuple[Tuple[Tuple[int, ...], ...], ...]

    @model_validator(mode="after")
    def _check_rules(self):
        for l, matrix in enumerate(self.rules, start=1):
            if len(matrix) != self.k or any(len(row) != self.k for row in matrix):
                raise ValueError(f"rule for generator {l} must be {self.k}x{self.k}")
            if any(entry not in (0, 1) for row in matrix for entry in row):
                raise ValueError(f"rule for generator {l} must be binary")
        return self

    @property
    def d(self) -> int:
        return len(self.rules)

    def arrays(self) -> List[np.ndarray]:
        """Boolean k x k matrices, index 0 is generator s_1."""
        return [np.array(matrix, dtype=bool) for matrix in self.rules]

    def allows(self, s: int, i: int, j: int) -> bool:
        return self.rules[s - 1][i - 1][j - 1] == 1

    def check_generators(self, d: int):
        if self.d != d:
            raise InvalidInputError(f"SFT has {self.d} rule matrices, monoid has {d} generators")


@dataclass(frozen=True)
class BlockCountVector:
    counts: Tuple[int, ...]
    n: int


@dataclass(frozen=True)
class EssentialSet:
    """
    Root symbols (1-based) classified from the clamped block-count trajectory.

    essential  gamma_{i,n} >= 2 for some n
    alive      gamma_{i,n} > 0 for every n
    persistent gamma_{i,n} >= 2 infinitely often (inside the recurring cycle)
    """
    essential: FrozenSet[int]
    alive: FrozenSet[int] = frozenset()
    persistent: FrozenSet[int] = frozenset()
    steps: int = 0

    @property
    def live(self) -> Tuple[int, ...]:
        """Symbols that drive the degree: essential, alive and recurring at >= 2."""
        return tuple(sorted(self.essential & self.persistent))


def full_shift(d: int, k: int) -> SftRules:
    return hom_shift(d, [[1] * k for _ in range(k)])


def hom_shift(d: int, T) -> SftRules:
    """The same k x k matrix T on every generator."""
    T = [list(map(int, row)) for row in T]
    return SftRules(k=len(T), rules=[T] * d)


def golden_mean(d: int) -> SftRules:
    return hom_shift(d, [[1, 1], [1, 0]])


def _prepare(source: Source, r: SftRules) -> FollowerAutomaton:
    aut = as_automaton(source)
    r.check_generators(aut.d)
    return aut


def _clamp(value: int) -> int:
    return value if value < 2 else 2


def recurrence_step(aut: FollowerAutomaton, r: SftRules, gamma: Gamma,
                    clamp: Optional[Callable[[int], int]] = None) -> Gamma:
    """
    gamma'[q][i] = prod over defined steps (q, s) -> q' of sum_j rules[s](i, j) gamma[q'][j].
    With `clamp`, every partial sum and product is clamped, which commutes with the
    arithmetic for the saturating map x -> min(x, 2).
    """
    fresh = {}
    for q in aut.states:
        row = []
        for i in range(1, r.k + 1):
            product = 1
            for s, target in aut.successors(q):
                total = sum(gamma[target][j - 1] for j in range(1, r.k + 1) if r.allows(s, i, j))
                product *= clamp(total) if clamp else total
                if clamp:
                    product = clamp(product)
                if product == 0:
                    break
            row.append(product)
        fresh[q] = tuple(row)
    return fresh


def block_count_table(source: Source, r: SftRules, n: int) -> List[Gamma]:
    """gamma^[q]_{i,m} for m = 0..n, every state q."""
    if n < 0:
        raise InvalidInputError(f"block counts need n >= 0, got {n}")
    aut = _prepare(source, r)
    gamma = {q: (1,) * r.k for q in aut.states}
    table = [gamma]
    for _ in range(n):
        gamma = recurrence_step(aut, r, gamma)
        table.append(gamma)
    return table


def count_blocks_recurrence(source: Source, r: SftRules, n: int) -> BlockCountVector:
    aut = _prepare(source, r)
    gamma = block_count_table(aut, r, n)[-1]
    return BlockCountVector(gamma[aut.initial], n)


def count_blocks_oracle(source: Source, r: SftRules, n: int,
                        cap: Optional[int] = None, chunk: Optional[int] = None) -> BlockCountVector:
    """
    Brute force: test every labeling of the ball tree, bucketed by root label.

    Args:
        source: Monoid presentation or follower automaton
        r: Local rules, one k x k matrix per generator
        n: Ball radius, at least 0
        cap: Maximum number of labelings to test
        chunk: Labelings checked per vectorized batch

    Returns:
        BlockCountVector of gamma_{i,n} for i = 1..k, matching the recurrence
    """
    cap = settings.ORACLE_LABELING_CAP if cap is None else cap
    chunk = settings.ORACLE_CHUNK if chunk is None else chunk
    _prepare(source, r)
    ball = build_ball(source, n)
    size = len(ball)
    candidates = r.k ** size
    if candidates > cap:
        logger.error(f"❌ Oracle would test {candidates} labelings, cap is {cap}")
        raise ResourceCapError("oracle labelings", candidates, cap)

    # edge (parent, child, generator index) for every non-root node
    rules = r.arrays()
    edges = [(ball.parent[c], c, ball.edge_label[c] - 1) for c in range(1, size)]
    per_root = r.k ** (size - 1)
    place = np.array([r.k ** j for j in range(size - 1)], dtype=np.int64)
    counts = []
    for root in range(r.k):
        total = 0
        for start in range(0, per_root, chunk):
            index = np.arange(start, min(start + chunk, per_root), dtype=np.int64)
            labels = np.empty((len(index), size), dtype=np.int64)
            labels[:, 0] = root
            if size > 1:
                labels[:, 1:] = (index[:, None] // place[None, :]) % r.k
            valid = np.ones(len(index), dtype=bool)
            for up, child, s in edges:
                valid &= rules[s][labels[:, up], labels[:, child]]
            total += int(valid.sum())
        counts.append(total)
    logger.debug(f"Oracle n={n}: {counts}")
    return BlockCountVector(tuple(counts), n)


def saturating_trajectory(source: Source, r: SftRules) -> Tuple[List[Gamma], int]:
    """
    Iterate the recurrence clamped into {0, 1, 2} until a state repeats.

    Returns the trajectory (m = 0, 1, ...) and the index where its cycle starts.
    """
    aut = _prepare(source, r)
    gamma = {q: (1,) * r.k for q in aut.states}
    seen = {}
    trajectory = []
    while True:
        key = tuple(gamma[q] for q in aut.states)
        if key in seen:
            return trajectory, seen[key]
        seen[key] = len(trajectory)
        trajectory.append(gamma)
        gamma = recurrence_step(aut, r, gamma, clamp=_clamp)


@dataclass(frozen=True)
class SaturationProfile:
    """Per (state, symbol) status read off the clamped trajectory."""
    trajectory: Tuple[Gamma, ...]
    cycle_start: int

    def alive(self, q: str, i: int) -> bool:
        return self.trajectory[-1][q][i - 1] > 0

    def persistent(self, q: str, i: int) -> bool:
        return any(g[q][i - 1] == 2 for g in self.trajectory[self.cycle_start:])

    def essential(self, q: str, i: int) -> bool:
        return any(g[q][i - 1] == 2 for g in self.trajectory)


def saturation_profile(source: Source, r: SftRules) -> SaturationProfile:
    trajectory, start = saturating_trajectory(source, r)
    return SaturationProfile(tuple(trajectory), start)


def essential_from_profile(profile: SaturationProfile, q: str, k: int) -> EssentialSet:
    symbols = range(1, k + 1)
    return EssentialSet(
        essential=frozenset(i for i in symbols if profile.essential(q, i)),
        alive=frozenset(i for i in symbols if profile.alive(q, i)),
        persistent=frozenset(i for i in symbols if profile.persistent(q, i)),
        steps=len(profile.trajectory),
    )


def essential_symbols(source: Source, r: SftRules) -> EssentialSet:
    aut = _prepare(source, r)
    result = essential_from_profile(saturation_profile(aut, r), aut.initial, r.k)
    logger.info(f"Essential symbols {sorted(result.essential)} after {result.steps} clamped steps")
    return result


def estimate_degree_empirical(counts: Iterable[BlockCountVector],
                              essential: Optional[Sequence[int]] = None) -> List[float]:
    """ln(sum_{i in E} ln gamma_{i,n}) / n for each count vector; diagnostic only."""
    terms = []
    for vector in counts:
        symbols = essential if essential is not None else range(1, len(vector.counts) + 1)
        total = sum(math.log(vector.counts[i - 1]) for i in symbols if vector.counts[i - 1] > 0)
        if vector.n < 1 or total <= 0:
            raise UndefinedTermError(f"empirical degree term undefined at n={vector.n}")
        terms.append(math.log(total) / vector.n)
    return terms


def empirical_series(source: Source, r: SftRules, n_max: int) -> List[Tuple[int, float]]:
    """(n, term) for n = 1..n_max, skipping the leading n where every gamma <= 1."""
    table = block_count_table(source, r, n_max)
    initial = as_automaton(source).initial
    series = []
    for n in range(1, n_max + 1):
        vector = BlockCountVector(table[n][initial], n)
        try:
            series.append((n, estimate_degree_empirical([vector])[0]))
        except UndefinedTermError:
            continue
    return series
