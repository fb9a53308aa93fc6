from fractions import Fraction as F

import pytest

from conewitness.lp import (
    FarkasCertificate,
    Feasible,
    Infeasible,
    LpProblem,
    Unbounded,
    basic_solutions,
    brute_force_feasible,
    solve,
    verify_certificate,
)

from oracles import feasible_by_vertices


def test_simple_maximization():
    p = LpProblem.build([[1, 1]], [1], objective=[1, 0])
    out = solve(p)
    assert isinstance(out, Feasible)
    assert out.solution == (1, 0) and out.objective_value == 1


def test_negative_rhs_is_infeasible_with_certificate():
    p = LpProblem.build([[1]], [-1])
    out = solve(p)
    assert isinstance(out, Infeasible)
    assert out.certificate.multipliers == (F(1),)
    assert verify_certificate(p, out.certificate)


def test_degenerate_redundant_rows():
    p = LpProblem.build([[1, 1], [2, 2], [1, -1]], [1, 2, 1])
    out = solve(p)
    assert isinstance(out, Feasible) and out.solution == (1, 0)


def test_free_variables():
    # x free, y >= 0:  x + y = -3, y = 1  ->  x = -4
    p = LpProblem.build([[1, 1], [0, 1]], [-3, 1], nonneg=[1])
    out = solve(p)
    assert isinstance(out, Feasible) and out.solution == (-4, 1)


def test_unbounded():
    p = LpProblem.build([[1, -1]], [0], objective=[1, 0])
    out = solve(p)
    assert isinstance(out, Unbounded)
    assert out.ray[0] > 0 and out.ray[0] == out.ray[1]


def test_tampered_certificate_fails():
    p = LpProblem.build([[1, 1]], [-2])
    cert = solve(p).certificate
    assert verify_certificate(p, cert)
    assert not verify_certificate(p, FarkasCertificate(tuple(-x for x in cert.multipliers)))
    assert not verify_certificate(p, FarkasCertificate(()))


def test_validation():
    with pytest.raises(ValueError):
        LpProblem(2, (((F(1),), F(0)),), frozenset())
    with pytest.raises(ValueError):
        LpProblem(1, (), frozenset({3}))


def test_brute_force_lists_vertices():
    p = LpProblem.build([[1, 1, 1]], [1])
    assert sorted(basic_solutions(p)) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


@pytest.mark.parametrize(
    "rows,rhs",
    [
        ([[1, 2, -1], [0, 1, 1]], [3, 1]),
        ([[1, -1, 0], [0, 1, -1], [1, 0, -1]], [1, 1, 3]),
        ([[1, 1, 0], [1, 1, 0]], [1, 2]),
        ([[2, -3, 1, 0], [1, 1, 1, 1]], [-1, 1]),
    ],
)
def test_solver_brute_force_and_sympy_agree(rows, rhs):
    p = LpProblem.build(rows, rhs)
    verdict = isinstance(solve(p), Feasible)
    assert verdict == brute_force_feasible(p) == feasible_by_vertices(rows, rhs)
