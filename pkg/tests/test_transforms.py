from fractions import Fraction as F

import pytest

from conewitness.corpus import builtin
from conewitness.model import ValidationError, fragment_from_pm
from conewitness.geometry import cone_equal
from conewitness.transforms import (
    FLAG_SETTING,
    NULL_OUTCOME,
    FullSupportDistribution,
    InefficiencyParams,
    NoiseParams,
    apply_inefficiency,
    apply_noise,
    flag_convexify_meter,
    flag_convexify_source,
    pair_label,
    postprocess,
)

H = F(1, 2)


@pytest.fixture
def pom():
    return builtin("qubit-pom")


def test_flag_convexify_counts(pom):
    p = flag_convexify_source(pom.source, FullSupportDistribution.uniform(pom.source.settings))
    m = flag_convexify_meter(pom.meter, FullSupportDistribution.uniform(pom.meter.settings))
    assert p.settings == (FLAG_SETTING,) and m.settings == (FLAG_SETTING,)
    assert len(p.outcomes(FLAG_SETTING)) == 4
    assert len(m.outcomes(FLAG_SETTING)) == 4
    assert p[FLAG_SETTING, pair_label("0", "01")] == (F(1, 4), 0, 0, F(1, 4))


def test_distribution_must_cover_settings(pom):
    mu = FullSupportDistribution({"00": H, "11": H})
    with pytest.raises(ValidationError):
        flag_convexify_source(pom.source, mu)


def test_distribution_needs_full_support():
    with pytest.raises(ValidationError):
        FullSupportDistribution({"a": F(1), "b": F(0)})
    with pytest.raises(ValidationError):
        FullSupportDistribution({"a": H, "b": F(1, 3)})


def test_inefficiency_adds_null_outcome(pom):
    m = apply_inefficiency(pom.meter, InefficiencyParams.constant(pom.meter, H))
    for y in m.settings:
        assert m.outcomes(y)[-1] == NULL_OUTCOME
        assert m[y, NULL_OUTCOME] == (H, 0, 0, 0)


def test_parameter_ranges(pom):
    with pytest.raises(ValidationError):
        InefficiencyParams.constant(pom.meter, 1)
    with pytest.raises(ValidationError):
        NoiseParams.constant(pom.meter, 0)
    with pytest.raises(ValidationError):
        apply_noise(pom.meter, NoiseParams({("+", "D"): H}))


def test_noise_formula(pom):
    m = apply_noise(pom.meter, NoiseParams.constant(pom.meter, H))
    e_plus, e_minus = pom.meter["D", "+"], pom.meter["D", "-"]
    expected = tuple(H * a + F(1, 4) * (a + b) for a, b in zip(e_plus, e_minus))
    assert m["D", "+"] == expected


def test_inefficiency_keeps_cones_noise_does_not(pom):
    f = fragment_from_pm(pom.source, pom.meter)
    ineff = fragment_from_pm(pom.source, apply_inefficiency(pom.meter, InefficiencyParams.constant(pom.meter, F(9, 10))))
    noisy = fragment_from_pm(pom.source, apply_noise(pom.meter, NoiseParams.constant(pom.meter, H)))
    assert cone_equal(f.effect_cone, ineff.effect_cone)
    assert not cone_equal(f.effect_cone, noisy.effect_cone)


def test_postprocess_relabelling(pom):
    flip = {y: {"+": {"-": F(1)}, "-": {"+": F(1)}} for y in pom.meter.settings}
    m = postprocess(pom.meter, flip)
    assert m["D", "+"] == pom.meter["D", "-"]
    with pytest.raises(ValidationError):
        postprocess(pom.meter, {y: {"+": {"-": H}, "-": {"+": F(1)}} for y in pom.meter.settings})
