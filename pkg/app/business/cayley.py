# cayley.py
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.business.presentation import (
    MonoidPresentation,
    Word,
    is_length_additive,
    non_free_generators,
    right_free_generators,
)
from app.config.settings import settings
from app.utils.errors import InfiniteRepresentationError, InvalidInputError, ResourceCapError

logger = logging.getLogger(__name__)


class FollowerAutomaton(BaseModel):
    """
    Finite-state view of the free-follower classes F_g of a monoid.

    `transitions[q][s]` is the class reached by appending generator s to an
    element of class q; it is defined exactly when the product is length-additive.
    """
    model_config = ConfigDict(frozen=True)

    d: int
    states: Tuple[str, ...]
    initial: str
    transitions: Dict[str, Dict[int, str]]

    @model_validator(mode="before")
    @classmethod
    def _infer_generator_count(cls, data):
        if isinstance(data, dict) and data.get("d") is None:
            labels = [int(s) for row in (data.get("transitions") or {}).values() for s in row]
            data = {**data, "d": max(labels, default=0)}
        return data

    @model_validator(mode="after")
    def _check_structure(self):
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate state names")
        if self.initial not in known:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        for q, row in self.transitions.items():
            if q not in known:
                raise ValueError(f"transitions from unknown state {q!r}")
            for s, target in row.items():
                if not 1 <= s <= self.d:
                    raise ValueError(f"generator {s} out of range 1..{self.d}")
                if target not in known:
                    raise ValueError(f"transition {q!r} -s{s}-> unknown state {target!r}")
        if len(self.transitions.get(self.initial, {})) != self.d:
            raise ValueError("every generator must extend the initial state")
        reached = {self.initial}
        frontier = [self.initial]
        while frontier:
            q = frontier.pop()
            for target in self.transitions.get(q, {}).values():
                if target not in reached:
                    reached.add(target)
                    frontier.append(target)
        if reached != known:
            raise ValueError(f"unreachable states: {sorted(known - reached)}")
        return self

    def step(self, q: str, s: int) -> Optional[str]:
        return self.transitions.get(q, {}).get(s)

    def successors(self, q: str) -> List[Tuple[int, str]]:
        return sorted(self.transitions.get(q, {}).items())

    def run(self, word) -> Optional[str]:
        """State after reading `word` from the initial state, None if some step is undefined."""
        q = self.initial
        for s in word:
            q = self.step(q, s)
            if q is None:
                return None
        return q


@dataclass(frozen=True)
class BallGraph:
    """Tree of Delta_n: node 0 is e, every other node hangs off its parent by one generator."""
    words: Tuple[Word, ...]
    parent: Tuple[int, ...]
    edge_label: Tuple[int, ...]
    depth: Tuple[int, ...]
    states: Tuple[str, ...]

    def __len__(self):
        return len(self.words)

    def children(self) -> List[List[int]]:
        kids = [[] for _ in self.words]
        for node, up in enumerate(self.parent):
            if up >= 0:
                kids[up].append(node)
        return kids


@dataclass(frozen=True)
class FiniteRepresentation:
    vertices: FrozenSet[Word]
    edges: FrozenSet[Tuple[Word, int, Word]]

    def ordered_vertices(self) -> List[Word]:
        return sorted(self.vertices, key=lambda w: (len(w), w.symbols))


Source = Union[MonoidPresentation, FollowerAutomaton]


def to_follower_automaton(p: MonoidPresentation) -> FollowerAutomaton:
    """States q0 (identity) and q_i (last generator s_i); q_i -s_j-> q_j iff A(i, j) = 1."""
    transitions = {"q0": {j: f"q{j}" for j in range(1, p.d + 1)}}
    for i in range(1, p.d + 1):
        transitions[f"q{i}"] = {j: f"q{j}" for j in range(1, p.d + 1) if p.allows(i, j)}
    states = ("q0",) + tuple(f"q{i}" for i in range(1, p.d + 1))
    return FollowerAutomaton(d=p.d, states=states, initial="q0", transitions=transitions)


def as_automaton(source: Source) -> FollowerAutomaton:
    if isinstance(source, FollowerAutomaton):
        return source
    return to_follower_automaton(source)


def count_level_words(aut: FollowerAutomaton, n: int) -> List[int]:
    """Number of walks of length m from the initial state, for m = 0..n."""
    index = {q: i for i, q in enumerate(aut.states)}
    step = np.zeros((len(aut.states), len(aut.states)), dtype=object)
    for q in aut.states:
        for _, target in aut.successors(q):
            step[index[q], index[target]] += 1
    vector = np.zeros(len(aut.states), dtype=object)
    vector[index[aut.initial]] = 1
    counts = []
    for _ in range(n + 1):
        counts.append(int(vector.sum()))
        vector = vector @ step
    return counts


def build_ball(source: Source, n: int, cap: Optional[int] = None) -> BallGraph:
    if n < 0:
        raise InvalidInputError("ball radius must be nonnegative")
    cap = settings.BALL_NODE_CAP if cap is None else cap
    aut = as_automaton(source)
    total = sum(count_level_words(aut, n))
    if total > cap:
        logger.error(f"❌ Ball of radius {n} has {total} nodes, cap is {cap}")
        raise ResourceCapError("ball node count", total, cap)

    words, parent, labels, depth, states = [Word((), reduced=True)], [-1], [0], [0], [aut.initial]
    level = [0]
    for m in range(1, n + 1):
        next_level = []
        for node in level:
            for s, target in aut.successors(states[node]):
                if isinstance(source, MonoidPresentation) and not is_length_additive(source, words[node], s):
                    continue
                words.append(words[node].extend(s))
                parent.append(node)
                labels.append(s)
                depth.append(m)
                states.append(target)
                next_level.append(len(words) - 1)
        level = next_level

    logger.debug(f"Built ball of radius {n} with {len(words)} nodes")
    return BallGraph(tuple(words), tuple(parent), tuple(labels), tuple(depth), tuple(states))


def is_finite_representation(p: MonoidPresentation) -> bool:
    """F is finite iff A restricted to the non-free generators is nilpotent."""
    rest = [i - 1 for i in non_free_generators(p)]
    if not rest:
        return True
    block = p.matrix[np.ix_(rest, rest)]
    power = block.copy()
    for _ in range(len(rest) - 1):
        power = np.minimum(power @ block, 1)
    return not power.any()


def non_free_words(p: MonoidPresentation) -> List[Word]:
    """Nonempty reduced words made only of non-free generators (finite when F is)."""
    rest = non_free_generators(p)
    found, frontier = [], [Word((), reduced=True)]
    while frontier:
        w = frontier.pop()
        for s in rest:
            if is_length_additive(p, w, s):
                longer = w.extend(s)
                if len(longer) > p.d:
                    raise InfiniteRepresentationError("non-free words do not terminate")
                found.append(longer)
                frontier.append(longer)
    return sorted(found, key=lambda w: (len(w), w.symbols))


def finite_representation(p: MonoidPresentation) -> FiniteRepresentation:
    if not is_finite_representation(p):
        raise InfiniteRepresentationError("presentation has no finite representation")
    free = sorted(right_free_generators(p))
    stems = [Word((), reduced=True)] + non_free_words(p)
    vertices = set(stems)
    for w in stems:
        vertices.update(w.extend(f) for f in free if is_length_additive(p, w, f))
    edges = {
        (Word(v.symbols[:-1], reduced=True), v.last, v)
        for v in vertices
        if v.symbols
    }
    logger.info(f"Finite representation has {len(vertices)} vertices")
    return FiniteRepresentation(frozenset(vertices), frozenset(edges))


def export_dot(graph: Union[BallGraph, FiniteRepresentation]) -> str:
    lines = ["digraph G {", "    rankdir=TB;"]
    if isinstance(graph, BallGraph):
        names = [str(w) for w in graph.words]
        for node, name in enumerate(names):
            lines.append(f'    n{node} [label="{name}"];')
        for node, up in enumerate(graph.parent):
            if up >= 0:
                lines.append(f'    n{up} -> n{node} [label="s{graph.edge_label[node]}"];')
    else:
        order = graph.ordered_vertices()
        index = {w: i for i, w in enumerate(order)}
        for w in order:
            lines.append(f'    n{index[w]} [label="{w}"];')
        for tail, s, head in sorted(graph.edges, key=lambda e: (index[e[0]], e[1])):
            lines.append(f'    n{index[tail]} -> n{index[head]} [label="s{s}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
