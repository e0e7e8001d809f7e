# presentation.py
"""
Monoids G = <s_1..s_d | R_A> presented by a binary d x d matrix A, where
s_i s_j = s_i exactly when A(i, j) = 0.

Generators are 1-based everywhere a caller can see them.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class MonoidPresentation(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1)
    A: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_matrix(self):
        if len(self.A) != self.d or any(len(row) != self.d for row in self.A):
            raise ValueError(f"A must be {self.d}x{self.d}")
        if any(entry not in (0, 1) for row in self.A for entry in row):
            raise ValueError("A must be binary")
        return self

    @classmethod
    def from_matrix(cls, A):
        rows = [list(map(int, row)) for row in A]
        try:
            return cls(d=len(rows), A=rows)
        except ValidationError as e:
            raise InvalidInputError(f"invalid presentation: {e.errors()[0]['msg']}") from e

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=np.int64)

    def allows(self, i: int, j: int) -> bool:
        """True iff s_i s_j is a length-additive product (A(i, j) = 1)."""
        return self.A[i - 1][j - 1] == 1


@dataclass(frozen=True)
class Word:
    symbols: Tuple[int, ...] = ()
    reduced: bool = field(default=False, compare=False)

    @classmethod
    def of(cls, *symbols: int) -> "Word":
        return cls(tuple(symbols))

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        if not self.symbols:
            return "e"
        return "".join(f"s{s}" for s in self.symbols)

    @property
    def last(self):
        return self.symbols[-1] if self.symbols else None

    def extend(self, s: int) -> "Word":
        return Word(self.symbols + (s,), self.reduced)


WordLike = Union[Word, Sequence[int]]


def _symbols(p: MonoidPresentation, w: WordLike) -> Tuple[int, ...]:
    symbols = tuple(w.symbols) if isinstance(w, Word) else tuple(int(s) for s in w)
    for s in symbols:
        if not 1 <= s <= p.d:
            raise InvalidInputError(f"generator s{s} out of range 1..{p.d}")
    return symbols


def reduce(p: MonoidPresentation, w: WordLike) -> Word:
    """
    Normal form of w by one left-to-right absorption pass.

    A symbol survives iff it is the first symbol or A(last survivor, symbol) = 1;
    otherwise the relation s_i s_j = s_i swallows it.
    """
    kept = []
    for s in _symbols(p, w):
        if not kept or p.allows(kept[-1], s):
            kept.append(s)
    return Word(tuple(kept), reduced=True)


def length(p: MonoidPresentation, w: WordLike) -> int:
    return len(reduce(p, w))


def right_free_generators(p: MonoidPresentation) -> frozenset:
    return frozenset(i + 1 for i, row in enumerate(p.A) if all(row))


def non_free_generators(p: MonoidPresentation) -> Tuple[int, ...]:
    free = right_free_generators(p)
    return tuple(i for i in range(1, p.d + 1) if i not in free)


def is_length_additive(p: MonoidPresentation, g: WordLike, s: int) -> bool:
    """|g s| = |g| + 1 for a reduced word g."""
    symbols = _symbols(p, g)
    _symbols(p, (s,))
    return not symbols or p.allows(symbols[-1], s)


def reduced_words(p: MonoidPresentation, max_length: int) -> Iterable[Word]:
    """All reduced words of length <= max_length, shortest first."""
    level = [Word((), reduced=True)]
    for _ in range(max_length + 1):
        yield from level
        level = [
            w.extend(s)
            for w in level
            for s in range(1, p.d + 1)
            if is_length_additive(p, w, s)
        ]


def free_monoid(d: int) -> MonoidPresentation:
    return MonoidPresentation(d=d, A=[[1] * d for _ in range(d)])


def fibonacci() -> MonoidPresentation:
    return MonoidPresentation(d=2, A=[[1, 1], [1, 0]])
