from fractions import Fraction as F

import pytest

from conewitness.classicality import check_verdict, cone_equivalent, simplicial_cone_embed
from conewitness.corpus import NAMES, POM_AXES, RandomSpec, builtin, born_probability, random_pm, random_spec
from conewitness.model import ValidationError, fragment_from_pm, probability_table

from oracles import born, density_is_positive

BUILTINS = [n for n in NAMES if n != "classical-simplex-k"] + ["classical-simplex-3", "classical-simplex-5"]


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_are_valid(name):
    e = builtin(name)
    fragment_from_pm(e.source, e.meter)
    for _, p, m in e.companions:
        fragment_from_pm(p, m)


def test_unknown_name():
    with pytest.raises(KeyError):
        builtin("qubit-magic")
    with pytest.raises(KeyError):
        builtin("classical-simplex-x")


def test_classical_bit_is_deterministic():
    e = builtin("classical-bit")
    t = probability_table(e.source, e.meter)
    for x in "01":
        for b in "01":
            assert t["0", b, x, "0"] == (1 if b == x else 0)


@pytest.mark.parametrize("name", ["qubit-stabilizer", "qubit-pom"])
def test_quantum_entries_match_density_operators(name):
    e = builtin(name)
    for _, s in e.source.items():
        assert density_is_positive(s)
        for _, c in e.meter.items():
            assert born(s, c) == born_probability(s, c) == sum(a * b for a, b in zip(c, s))


def test_stabilizer_table_values():
    # sympy density-operator computation, frozen
    e = builtin("qubit-stabilizer")
    t = probability_table(e.source, e.meter)
    for x in "XYZ":
        for y in "XYZ":
            for a in "+-":
                for b in "+-":
                    expected = (F(1, 2) if a == b else 0) if x == y else F(1, 4)
                    assert t[a, b, x, y] == expected


def test_pom_success_and_parity_obliviousness():
    e = builtin("qubit-pom")
    enc = {"00": "0", "01": "0", "10": "0", "11": "0"}
    guess = {"D": 0, "E": 1}
    total = F(0)
    for x in enc:
        for y, bit in guess.items():
            s, c = e.source[x, "0"], e.meter[y, "+" if x[bit] == "0" else "-"]
            total += born(s, c)
    assert total / 8 == F(17, 20)
    even = [a + b for a, b in zip(e.source["00", "0"], e.source["11", "0"])]
    odd = [a + b for a, b in zip(e.source["01", "0"], e.source["10", "0"])]
    assert even == odd
    assert POM_AXES["D"][0] ** 2 + POM_AXES["D"][1] ** 2 == 1


def test_fig2_pair_is_cone_equivalent_but_different():
    e = builtin("fig2-pair")
    inner = fragment_from_pm(e.source, e.meter)
    (_, p, m), = e.companions
    outer = fragment_from_pm(p, m)
    assert cone_equivalent(inner, outer)
    assert set(inner.state_polytope()) != set(outer.state_polytope())


def test_fig3_triple_relations():
    e = builtin("fig3-triple")
    base = fragment_from_pm(e.source, e.meter)
    comps = {k: fragment_from_pm(p, m) for k, p, m in e.companions}
    assert cone_equivalent(base, comps["inefficient"])
    assert not cone_equivalent(base, comps["noisy"])


@pytest.mark.parametrize(
    "name,expected",
    [("classical-bit", True), ("toy-bit", True), ("qubit-stabilizer", True), ("gbit-square", False),
     ("qubit-pom", False), ("fig1-instance", False)],
)
def test_expected_verdicts(name, expected):
    e = builtin(name)
    f = fragment_from_pm(e.source, e.meter)
    v = simplicial_cone_embed(f)
    assert v.embeddable == expected and check_verdict(f, v)


def test_random_is_deterministic():
    spec = RandomSpec(seed=2**63 + 17, ambient_dim=4, n_source_settings=3, n_meter_outcomes=3)
    assert random_pm(spec) == random_pm(spec)
    assert random_spec(5) == random_spec(5)


def test_random_validity_sweep():
    for seed in range(500):
        p, m = random_pm(random_spec(seed))
        fragment_from_pm(p, m)


def test_dimension_one_is_trivial():
    p, m = random_pm(RandomSpec(seed=3, ambient_dim=1))
    f = fragment_from_pm(p, m)
    assert f.state_span.dim == f.effect_span.dim == 1
    assert simplicial_cone_embed(f).embeddable


def test_random_spec_validation():
    with pytest.raises(ValidationError):
        RandomSpec(seed=0, n_meter_outcomes=0)
    with pytest.raises(ValidationError):
        RandomSpec(seed=0, denominator_bound=0)
    with pytest.raises(ValidationError):
        RandomSpec(seed=0, kind="sphere")
