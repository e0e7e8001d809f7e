import math
import random

import numpy as np
import pytest

from app.business import linalg
from app.business.degree import (
    build_snre,
    classify_full_degree_k2,
    degree,
    eigen_identity_residual,
    enumerate_simple_subsystems,
    full_degree_check,
)
from app.business.linalg import block_companion, companion, exact_radius, spectral_radius
from app.business.presentation import MonoidPresentation, free_monoid
from app.business.sft import SftRules, essential_symbols, full_shift, golden_mean, hom_shift
from app.utils.errors import InvalidInputError, NumericalError
from tests.conftest import PHI, RHO_A

UPPER = [[1, 1], [0, 1]]


def random_rules(rng, d, k=2):
    return SftRules(k=k, rules=[[[rng.randint(0, 1) for _ in range(k)] for _ in range(k)] for _ in range(d)])


def test_snre_lag_form_example(example):
    snre = build_snre(example, full_shift(3, 2))
    for root in (1, 2):
        factors = snre.lag_factors[root]
        assert [f.lag for f in factors] == [1, 2, 2, 3]
        assert all(f.coeffs == (1, 1) for f in factors)
        assert [str(f.word) for f in factors] == ["s3", "s1s3", "s2s3", "s1s2s3"]
    assert snre.ell == 3
    assert len(snre.equations[("q0", 1)]) == 3


def test_snre_lag_form_free_monoid():
    snre = build_snre(free_monoid(3), full_shift(3, 2))
    assert [f.lag for f in snre.lag_factors[1]] == [1, 1, 1]


def test_snre_coefficients_follow_rules(fib):
    snre = build_snre(fib, golden_mean(2))
    assert all(f.coeffs == (1, 1) for f in snre.lag_factors[1])
    assert snre.lag_factors[2][0].lag == 1
    assert snre.lag_factors[2][0].coeffs == (1, 0)
    assert {f.coeffs for f in snre.equations[("q0", 2)]} == {(1, 0)}


def test_subsystem_row_sums_example(example):
    snre = build_snre(example, full_shift(3, 2))
    assert [len(snre.row_options[p]) for p in (1, 2)] == [12, 12]
    subsystems = enumerate_simple_subsystems(snre, snre.essential)
    assert len(subsystems) == 144
    assert len({matrix.key() for _, matrix in subsystems}) == 144
    for _, matrix in subsystems:
        assert matrix.entries.shape == (6, 6)
        for m, B in enumerate(matrix.blocks, start=1):
            assert np.all(B.sum(axis=1) == snre.xi.term(m))


def test_single_essential_symbol(example):
    snre = build_snre(example, hom_shift(3, UPPER))
    assert snre.essential.live == (1,)
    every = enumerate_simple_subsystems(snre)
    assert len(every) == 12
    assert all(matrix.block_size == 1 for _, matrix in every)
    etas = {tuple(int(B[0, 0]) for B in matrix.blocks) for _, matrix in every}
    assert etas == {(a, b, c) for a in range(2) for b in range(3) for c in range(2)}
    pruned = enumerate_simple_subsystems(snre, prune=True)
    assert len(pruned) == 1
    assert [int(B[0, 0]) for B in pruned[0][1].blocks] == [1, 2, 1]


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (companion([1, 2, 1]), RHO_A),
        (np.zeros((3, 3), dtype=int), 0.0),
        (companion([1, 1]), PHI),
        ([[1, 1], [0, 2]], 2.0),
        ([[0, 1], [1, 0]], 1.0),
        ([[0, 1, 0], [0, 0, 1], [0, 0, 0]], 0.0),
    ],
)
def test_spectral_radius(matrix, expected):
    assert spectral_radius(matrix) == pytest.approx(expected, abs=1e-9)
    assert spectral_radius(matrix, cross_check=True) == pytest.approx(expected, abs=1e-9)
    assert exact_radius(matrix) == pytest.approx(expected, abs=1e-9)


def test_block_companion_shape():
    M = block_companion([np.eye(2, dtype=int), 2 * np.eye(2, dtype=int)])
    assert M.tolist() == [[1, 0, 2, 0], [0, 1, 0, 2], [1, 0, 0, 0], [0, 1, 0, 0]]


def test_radii_agree_on_enumerated_matrices(example):
    snre = build_snre(example, full_shift(3, 2))
    for _, matrix in enumerate_simple_subsystems(snre)[::7]:
        assert spectral_radius(matrix.entries) == pytest.approx(exact_radius(matrix.entries), abs=1e-9)


def test_degree_full_shift(example, fib):
    result = degree(example, full_shift(3, 2))
    assert result.degree == pytest.approx(math.log(RHO_A), abs=1e-9)
    assert result.full_degree
    assert classify_full_degree_k2(result) == "both-essential"
    assert degree(fib, full_shift(2, 2)).degree == pytest.approx(math.log(PHI), abs=1e-9)
    assert degree(free_monoid(2), full_shift(2, 2)).degree == pytest.approx(math.log(2), abs=1e-9)


def test_degree_single_symbol(example):
    result = degree(example, full_shift(3, 1))
    assert result.degree == 0.0
    assert not result.full_degree
    assert not full_degree_check(example, full_shift(3, 1))


def test_degree_inessential_second_symbol(fib):
    r = hom_shift(2, UPPER)
    assert essential_symbols(fib, r).essential == {1}
    result = degree(fib, r)
    assert result.degree == pytest.approx(math.log(PHI), abs=1e-9)
    assert full_degree_check(fib, r)
    assert classify_full_degree_k2(result) == "eta-equals-xi"


def test_full_degree_fails_when_a_factor_has_no_essential_choice(example):
    r = SftRules(k=2, rules=[UPPER, UPPER, [[0, 1], [0, 1]]])
    assert not full_degree_check(example, r)
    result = degree(example, r)
    assert result.degree < math.log(RHO_A) - 1e-9
    assert classify_full_degree_k2(result) is None


def test_witness_is_deterministic(example):
    r = full_shift(3, 2)
    first = degree(example, r)
    again = degree(example, r, threads=4)
    assert again.witness == first.witness
    assert np.array_equal(again.matrix.entries, first.matrix.entries)
    assert first.witness.labels(1)["s1"] == 1


def test_eigen_identity(example):
    result = degree(example, full_shift(3, 2))
    M = result.matrix
    residual = eigen_identity_residual(M.entries, RHO_A, M.ell, M.block_size)
    assert residual <= 1e-6


@pytest.mark.parametrize("A", [[[0, 1, 1], [0, 0, 1], [1, 1, 1]], [[1, 1], [1, 0]], [[1, 1, 1], [0, 0, 1], [1, 1, 1]]])
def test_full_degree_equivalence(A):
    p = MonoidPresentation.from_matrix(A)
    rho_a = spectral_radius(p.matrix)
    assert rho_a > 1
    rng = random.Random(2024)
    for _ in range(100):
        r = random_rules(rng, p.d)
        result = degree(p, r)
        assert result.degree <= math.log(rho_a) + 1e-9
        assert full_degree_check(p, r) == (abs(result.degree - math.log(rho_a)) <= 1e-9)


def test_full_degree_check_needs_presentation():
    from app.business.followers import even_monoid

    with pytest.raises(InvalidInputError):
        full_degree_check(even_monoid(), full_shift(2, 2))


def test_spectral_radius_cross_checks_by_default(monkeypatch):
    monkeypatch.setattr(linalg, "exact_radius", lambda M, tol=None: 3.0)
    with pytest.raises(NumericalError):
        spectral_radius(companion([1, 1]))
    assert spectral_radius(companion([1, 1]), cross_check=False) == pytest.approx(PHI, abs=1e-9)
    # above CROSS_CHECK_MAX_DIM only power iteration runs
    assert spectral_radius(np.eye(65, dtype=int)) == pytest.approx(1.0, abs=1e-9)
