from fractions import Fraction as F

import pytest

from conewitness.corpus import builtin
from conewitness.geometry import CapExceeded
from conewitness.model import (
    Fragment,
    GptSystem,
    Multimeter,
    Multisource,
    SubstochasticComb,
    ValidationError,
    accessible_effect_polytope,
    accessible_state_polytope,
    apply_comb_effect,
    apply_comb_state,
    complement_effect,
    fragment_from_pm,
    logically_possible_states,
    probability_table,
    subfragment_check,
)

H = F(1, 2)
BIT = GptSystem.of([1, 1])


def bit_devices():
    return (
        Multisource.of(BIT, {"0": {"0": [1, 0]}, "1": {"0": [0, 1]}}),
        Multimeter.of(BIT, {"0": {"0": [1, 0], "1": [0, 1]}}),
    )


class TestDevices:
    def test_zero_unit_rejected(self):
        with pytest.raises(ValidationError):
            GptSystem.of([0, 0])

    def test_source_normalization_error_names_setting(self):
        with pytest.raises(ValidationError, match="'x1'"):
            Multisource.of(BIT, {"x1": {"0": [H, 0]}})

    def test_meter_must_sum_to_unit(self):
        with pytest.raises(ValidationError):
            Multimeter.of(BIT, {"0": {"0": [1, 0], "1": [0, H]}})

    def test_wrong_length(self):
        with pytest.raises(ValidationError):
            Multisource.of(BIT, {"0": {"0": [1, 0, 0]}})

    def test_bad_pairing_names_labels(self):
        sys3 = GptSystem.of([1, 0, 0])
        p = Multisource.of(sys3, {"0": {"0": [1, 0, 1]}})
        m = Multimeter.of(sys3, {"0": {"0": [H, H, H], "1": [H, -H, -H]}, "1": {"0": [1, 0, 2], "1": [0, 0, -2]}})
        with pytest.raises(ValidationError, match=r"p\(0,0\|0,1\) = 3"):
            fragment_from_pm(p, m)

    def test_probability_table_classical_bit(self):
        t = probability_table(*bit_devices())
        assert t["0", "0", "0", "0"] == 1 and t["0", "1", "0", "0"] == 0
        assert t["0", "1", "1", "0"] == 1


class TestCombs:
    def test_deterministic_comb_recovers_atom(self):
        p, m = bit_devices()
        assert apply_comb_state(p, SubstochasticComb.deterministic("1", "0")) == (0, 1)
        assert apply_comb_effect(m, SubstochasticComb.deterministic("0", "1")) == (0, 1)

    def test_comb_validation(self):
        with pytest.raises(ValidationError):
            SubstochasticComb({("0", "z"): F(2)}, {})
        with pytest.raises(ValidationError):
            SubstochasticComb({("0", "z"): H}, {("0", "z"): F(3, 2)})

    def test_comb_label_mismatch(self):
        p, _ = bit_devices()
        with pytest.raises(ValidationError):
            apply_comb_state(p, SubstochasticComb.deterministic("nope", "0"))


class TestFragments:
    def test_unit_adjoined(self):
        f = fragment_from_pm(*bit_devices())
        assert f.unit in f.effect_generators

    def test_classical_bit_spans(self):
        f = fragment_from_pm(*bit_devices())
        assert (f.state_span.dim, f.effect_span.dim) == (2, 2)

    def test_qubit_pom_spans(self):
        e = builtin("qubit-pom")
        f = fragment_from_pm(e.source, e.meter)
        assert (f.state_span.dim, f.effect_span.dim) == (3, 3)

    def test_relaxed_fragments_skip_validation(self):
        with pytest.raises(ValidationError):
            Fragment.from_generators(BIT, [(2, 0)], [(1, 0)])
        f = Fragment.from_generators(BIT, [(2, 0)], [(1, 0)], relaxed=True)
        assert f.relaxed

    def test_state_polytope_of_classical_bit(self):
        p, _ = bit_devices()
        assert set(accessible_state_polytope(p)) == {(0, 0), (1, 0), (0, 1)}

    def test_polytope_cap(self):
        e = builtin("qubit-stabilizer")
        with pytest.raises(CapExceeded):
            accessible_effect_polytope(e.meter, cap=1)

    def test_complement_effect(self):
        e = builtin("gbit-square")
        f = fragment_from_pm(e.source, e.meter)
        assert complement_effect(f, (H, H, H)) == (H, -H, -H)
        with pytest.raises(ValidationError):
            complement_effect(f, (1, 1, 0))

    def test_logically_possible_states_of_gbit(self):
        e = builtin("gbit-square")
        lp = logically_possible_states(fragment_from_pm(e.source, e.meter))
        assert lp.contains((1, 1, 0)) and lp.contains((1, 0, -1))
        assert not lp.contains((1, 1, 1))
        assert not lp.contains((2, 0, 0))

    def test_subfragment(self):
        e = builtin("qubit-stabilizer")
        outer = fragment_from_pm(e.source, e.meter)
        p = Multisource.of(e.source.system, {"X": e.source.as_dict()["X"]})
        m = Multimeter.of(e.source.system, {"Z": e.meter.as_dict()["Z"]})
        inner = fragment_from_pm(p, m)
        assert subfragment_check(inner, outer)
        assert not subfragment_check(outer, inner)


@pytest.mark.parametrize("seed", range(6))
def test_subfragment_methods_agree(seed):
    from conewitness.corpus import random_pm, RandomSpec
    from conewitness.transforms import FullSupportDistribution, apply_noise, NoiseParams, flag_convexify_source

    p, m = random_pm(RandomSpec(seed=seed, ambient_dim=3, n_source_outcomes=3))
    f = fragment_from_pm(p, m)
    flagged = fragment_from_pm(flag_convexify_source(p, FullSupportDistribution.uniform(p.settings)), m)
    noisy = fragment_from_pm(p, apply_noise(m, NoiseParams.constant(m, H)))
    for inner, outer in [(flagged, f), (f, flagged), (noisy, f), (f, noisy)]:
        assert subfragment_check(inner, outer) == subfragment_check(inner, outer, method="vertices")
    assert subfragment_check(flagged, f)
