# followers.py
"""
Monoids given by their free-follower classes F_g = {g' : |g g'| = |g| + |g'|}.

The degree is computed over (state, symbol) pairs with a one-step recurrence,
so no lag elimination is needed.
"""
import itertools
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.business.cayley import FollowerAutomaton, to_follower_automaton
from app.business.degree import AdjacencyMatrix, DegreeResult, SimpleSubsystem
from app.business.linalg import parallel_map, spectral_radius
from app.business.presentation import MonoidPresentation
from app.business.sft import EssentialSet, SftRules, empirical_series, essential_from_profile, saturation_profile
from app.config.settings import settings
from app.utils.errors import ResourceCapError

logger = logging.getLogger(__name__)

Pair = Tuple[str, int]


def even_monoid() -> FollowerAutomaton:
    """Follower classes of <s1, s2 | s2 s1^(2i+1) s2 = s2>: all of G, after s2 s1^even, after s2 s1^odd."""
    return FollowerAutomaton(
        d=2,
        states=("qG", "qE", "qO"),
        initial="qG",
        transitions={"qG": {1: "qG", 2: "qE"}, "qE": {1: "qO", 2: "qE"}, "qO": {1: "qE"}},
    )


def minimize(aut: FollowerAutomaton) -> FollowerAutomaton:
    """Moore refinement; each class is named after its first state in `aut.states` order."""
    block = {q: tuple(sorted(aut.transitions.get(q, {}))) for q in aut.states}
    while True:
        signature = {
            q: (block[q], tuple((s, block[target]) for s, target in aut.successors(q)))
            for q in aut.states
        }
        if len(set(signature.values())) == len(set(block.values())):
            break
        block = signature

    names: Dict[tuple, str] = {}
    for q in aut.states:
        names.setdefault(block[q], q)
    states = tuple(dict.fromkeys(names[block[q]] for q in aut.states))
    transitions = {
        names[block[q]]: {s: names[block[target]] for s, target in aut.successors(q)}
        for q in states
    }
    logger.debug(f"Minimized {len(aut.states)} states to {len(states)}")
    return FollowerAutomaton(d=aut.d, states=states, initial=names[block[aut.initial]], transitions=transitions)


def follower_classes(p: MonoidPresentation) -> FollowerAutomaton:
    return minimize(to_follower_automaton(p))


def state_adjacency(aut: FollowerAutomaton) -> np.ndarray:
    """B(q, q') = number of generators stepping q to q'."""
    index = {q: n for n, q in enumerate(aut.states)}
    B = np.zeros((len(aut.states), len(aut.states)), dtype=np.int64)
    for q in aut.states:
        for _, target in aut.successors(q):
            B[index[q], index[target]] += 1
    return B


def _reachable(M: np.ndarray, roots: List[int]) -> List[int]:
    seen = set(roots)
    frontier = list(roots)
    while frontier:
        i = frontier.pop()
        for j in np.flatnonzero(M[i]):
            if j not in seen:
                seen.add(int(j))
                frontier.append(int(j))
    return sorted(seen)


def _pair_options(aut: FollowerAutomaton, r: SftRules, profile, live: List[Pair],
                  pair: Pair) -> Dict[Tuple[int, ...], tuple]:
    """Minkowski sum over successors of the unit vectors each child label contributes."""
    index = {p: n for n, p in enumerate(live)}
    q, i = pair
    combined = {(0,) * len(live): ()}
    for s, target in aut.successors(q):
        child = {}
        for j in range(1, r.k + 1):
            if not r.allows(s, i, j) or not profile.alive(target, j):
                continue
            unit = [0] * len(live)
            if (target, j) in index:
                unit[index[(target, j)]] = 1
            child.setdefault(tuple(unit), (s, j))
        if not child:
            return {}
        merged = {}
        for left, left_choice in combined.items():
            for right, right_choice in child.items():
                merged.setdefault(tuple(a + b for a, b in zip(left, right)), left_choice + (right_choice,))
        combined = merged
    return {
        option: choice
        for option, choice in combined.items()
        if not any(other != option and all(x <= y for x, y in zip(option, other)) for other in combined)
    }


def degree_on_automaton(aut: FollowerAutomaton, r: SftRules, threads: Optional[int] = None,
                        cap: Optional[int] = None, cross_check: Optional[bool] = None) -> DegreeResult:
    cap = settings.SUBSYSTEM_CAP if cap is None else cap
    r.check_generators(aut.d)
    aut = minimize(aut)
    profile = saturation_profile(aut, r)
    essential = essential_from_profile(profile, aut.initial, r.k)
    reference = spectral_radius(state_adjacency(aut))
    empty = DegreeResult(0.0, 0.0, False, essential, r.k, reference_radius=reference)

    live = [
        (q, i)
        for q in aut.states
        for i in range(1, r.k + 1)
        if profile.essential(q, i) and profile.persistent(q, i)
    ]
    roots = [n for n, (q, _) in enumerate(live) if q == aut.initial]
    if not roots:
        logger.warning("No live essential symbols at the initial state, degree is 0")
        return empty

    per_pair = [_pair_options(aut, r, profile, live, pair) for pair in live]
    total = math.prod(len(options) for options in per_pair)
    if total > cap:
        logger.error(f"❌ {total} one-step subsystems, cap is {cap}")
        raise ResourceCapError("simple subsystems", total, cap)

    subsystems = []
    for combo in itertools.product(*(list(options.items()) for options in per_pair)):
        M = np.array([option for option, _ in combo], dtype=np.int64)
        keep = _reachable(M, roots)
        rows = tuple(live[n] for n in keep)
        sub = M[np.ix_(keep, keep)]
        subsystem = SimpleSubsystem(rows, tuple(combo[n][0] for n in keep), tuple(combo[n][1] for n in keep))
        subsystems.append((subsystem, AdjacencyMatrix(sub, rows, 1, (sub,))))

    radii = parallel_map(lambda item: spectral_radius(item[1].entries, cross_check=cross_check), subsystems, threads)
    best = max(radii)
    winner = next(n for n, rho in enumerate(radii) if rho >= best - 1e-12 * max(1.0, best))
    rho = radii[winner]
    full = reference > 1 and abs(rho - reference) <= 1e-9 * reference
    logger.info(f"Automaton degree from rho={rho} over {len(subsystems)} subsystems, state radius {reference}")
    return DegreeResult(
        degree=math.log(rho) if rho > 1 else 0.0,
        spectral_radius=rho,
        full_degree=full,
        essential=essential,
        k=r.k,
        witness=subsystems[winner][0],
        matrix=subsystems[winner][1],
        subsystem_count=len(subsystems),
        reference_radius=reference,
    )


def estimate_degree_on_automaton(aut: FollowerAutomaton, r: SftRules, n_max: int) -> List[Tuple[int, float]]:
    return empirical_series(aut, r, n_max)
