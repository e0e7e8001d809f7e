import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.business.presentation import (
    MonoidPresentation,
    Word,
    free_monoid,
    is_length_additive,
    length,
    non_free_generators,
    reduce,
    reduced_words,
    right_free_generators,
)
from app.utils.errors import InvalidInputError
from tests.conftest import presentations


@pytest.mark.parametrize(
    "word, expected",
    [
        ((1, 1), (1,)),
        ((2, 1), (2,)),
        ((), ()),
        ((2, 1, 1, 3), (2, 3)),
        ((1, 2, 3), (1, 2, 3)),
    ],
)
def test_reduce_example(example, word, expected):
    assert reduce(example, word).symbols == expected


def test_reduce_marks_result(example):
    w = reduce(example, Word.of(3, 3))
    assert w.reduced
    assert w == Word.of(3, 3)
    assert str(w) == "s3s3"
    assert str(reduce(example, [])) == "e"


def test_reduce_rejects_unknown_generator(example):
    with pytest.raises(InvalidInputError):
        reduce(example, [1, 4])
    with pytest.raises(InvalidInputError):
        length(example, [0])


def test_length(example):
    assert length(example, [2, 1]) == 1
    assert length(example, []) == 0
    assert length(example, [1, 2, 3]) == 3


def test_free_generators(example, fib):
    assert right_free_generators(example) == {3}
    assert right_free_generators(free_monoid(4)) == {1, 2, 3, 4}
    assert right_free_generators(fib) == {1}
    assert non_free_generators(example) == (1, 2)


def test_is_length_additive(example):
    assert not is_length_additive(example, Word.of(2), 1)
    assert all(is_length_additive(example, Word(), s) for s in (1, 2, 3))
    assert is_length_additive(example, Word.of(1), 2)


def test_from_matrix_validation():
    with pytest.raises(InvalidInputError):
        MonoidPresentation.from_matrix([[1, 2], [0, 1]])
    with pytest.raises(InvalidInputError):
        MonoidPresentation.from_matrix([[1, 1], [1]])


def test_reduced_words_by_level(example):
    words = list(reduced_words(example, 2))
    assert len(words) == 10
    assert [len(w) for w in words] == sorted(len(w) for w in words)


@settings(max_examples=60, deadline=None)
@given(presentations(max_d=4))
def test_reduce_is_idempotent_and_shortening(p):
    for w in reduced_words(p, 3):
        doubled = w.symbols + w.symbols
        once = reduce(p, doubled)
        assert reduce(p, once) == once
        assert len(once) <= len(doubled)


def all_presentations(d):
    for bits in itertools.product((0, 1), repeat=d * d):
        yield MonoidPresentation(d=d, A=[list(bits[i * d:(i + 1) * d]) for i in range(d)])


def all_words(d, max_length):
    for size in range(max_length + 1):
        yield from itertools.product(range(1, d + 1), repeat=size)


def zeros_are_transitive(p):
    """A(x, a) = 0 and A(a, b) = 0 force A(x, b) = 0."""
    symbols = range(1, p.d + 1)
    return all(
        p.allows(x, a) or p.allows(a, b) or not p.allows(x, b)
        for x in symbols for a in symbols for b in symbols
    )


def check_reduce(p, w):
    once = reduce(p, w)
    assert reduce(p, once) == once
    assert len(once) <= len(w)
    if w:
        assert once.symbols[0] == w[0]
    assert all(p.allows(a, b) for a, b in zip(once.symbols, once.symbols[1:]))


@pytest.mark.parametrize("d", [1, 2])
def test_reduce_on_every_word(d):
    for p in all_presentations(d):
        for w in all_words(d, 8):
            check_reduce(p, w)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_reduce_on_random_words(data):
    p = data.draw(presentations(max_d=4))
    w = data.draw(st.lists(st.integers(1, p.d), max_size=8))
    check_reduce(p, w)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_reduce_consumes_prefix_first(data):
    p = data.draw(presentations(max_d=4))
    u = data.draw(st.lists(st.integers(1, p.d), max_size=5))
    v = data.draw(st.lists(st.integers(1, p.d), max_size=5))
    assert reduce(p, u + v) == reduce(p, reduce(p, u).symbols + tuple(v))


def test_multiplicative_exactly_when_zeros_are_transitive():
    for d, max_u, max_v in ((1, 5, 5), (2, 5, 5), (3, 2, 3)):
        left = list(all_words(d, max_u))
        right = list(all_words(d, max_v))
        for p in all_presentations(d):
            normal = {w: reduce(p, w).symbols for w in set(left) | set(right)}
            holds = all(reduce(p, u + v).symbols == reduce(p, normal[u] + normal[v]).symbols for u in left for v in right)
            assert holds == zeros_are_transitive(p)


def test_multiplicative_on_example(example):
    assert zeros_are_transitive(example)
    for u in all_words(3, 4):
        for v in all_words(3, 4):
            assert reduce(example, u + v) == reduce(example, reduce(example, u).symbols + reduce(example, v).symbols)


def test_multiplicativity_breaks_on_intransitive_zeros():
    p = MonoidPresentation(d=3, A=[[1, 0, 1], [1, 1, 0], [1, 1, 1]])
    assert reduce(p, (1, 2, 3)).symbols == (1, 3)
    assert reduce(p, (1,) + reduce(p, (2, 3)).symbols).symbols == (1,)


def test_right_free_means_every_extension_is_additive():
    for d in (1, 2, 3):
        for p in all_presentations(d):
            words = list(reduced_words(p, 4))
            for i in range(1, d + 1):
                ending = [g for g in words if g.symbols and g.last == i]
                additive = all(is_length_additive(p, g, s) for g in ending for s in range(1, d + 1))
                assert (i in right_free_generators(p)) == additive
                assert all(is_length_additive(p, g, i) for g in words if not g.symbols or g.last in right_free_generators(p))


def test_right_free_is_read_off_rows():
    # s1 is right free, yet s2 s1 = s2 absorbs it
    p = MonoidPresentation(d=2, A=[[1, 1], [0, 1]])
    assert right_free_generators(p) == {1}
    assert not is_length_additive(p, Word.of(2), 1)
    assert all(is_length_additive(p, Word.of(1), s) for s in (1, 2))
