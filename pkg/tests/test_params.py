import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bose_einstein
from slowsbs.errors import ConfigError
from slowsbs.params import (
    HBAR,
    K_B,
    LOWER,
    UPPER,
    DualPumpConfig,
    LangevinNoiseSpec,
    PumpChannel,
    WaveguideParams,
    echo,
    scaled_detuning,
    thermal_occupation,
    validate,
)

NOMINAL_TREE = {
    "waveguide": {"g": 1e6, "gamma": 1e8, "v_g": 1e8, "length": 1e-2, "omega_phonon": 5e10, "temperature": 0.1},
    "pump.upper": {"intensity": 2.5e7, "detuning_scaled": 0.5},
    "pump.lower": {"intensity": 1e8, "detuning_scaled": 2.0},
}


def test_nominal_tree_validates_with_quarter_ratios():
    params, dual = validate(NOMINAL_TREE)
    assert dual.a == 0.25 and dual.b == 0.25
    assert params.n_bar == pytest.approx(0.0224, rel=5e-3)


def test_zero_length_rejected():
    tree = {**NOMINAL_TREE, "waveguide": {**NOMINAL_TREE["waveguide"], "length": 0.0}}
    with pytest.raises(ConfigError, match="non-positive length"):
        validate(tree)


def test_temperature_nbar_disagreement():
    tree = {**NOMINAL_TREE, "waveguide": {**NOMINAL_TREE["waveguide"], "n_bar": 0.5}}
    with pytest.raises(ConfigError, match="temperature/n_bar disagreement"):
        validate(tree)


def test_consistent_temperature_and_nbar_accepted():
    nb = thermal_occupation(5e10, 0.1) * (1 + 5e-4)
    tree = {**NOMINAL_TREE, "waveguide": {**NOMINAL_TREE["waveguide"], "n_bar": nb}}
    params, _ = validate(tree)
    assert params.n_bar == nb


@pytest.mark.parametrize("missing", ["g", "gamma", "v_g", "length", "omega_phonon"])
def test_missing_field(missing):
    wg = dict(NOMINAL_TREE["waveguide"])
    del wg[missing]
    with pytest.raises(ConfigError, match="missing required field"):
        validate({**NOMINAL_TREE, "waveguide": wg})


def test_missing_pumps_and_unknown_keys():
    with pytest.raises(ConfigError, match="missing required field"):
        validate({"waveguide": NOMINAL_TREE["waveguide"]})
    with pytest.raises(ConfigError, match="unknown keys"):
        validate({**NOMINAL_TREE, "pump.upper": {"intensity": 1.0, "detuning_scaled": 0.0, "phase": 1.0}})


def test_amplitude_and_angular_detuning_are_converted():
    tree = {
        "waveguide": NOMINAL_TREE["waveguide"],
        "pump.upper": {"amplitude": 5e4, "detuning": 2.5e7},
    }
    _, dual = validate(tree)
    assert dual.upper.intensity == pytest.approx(1e-2 * 5e4 ** 2, rel=1e-15)
    assert dual.upper.detuning_scaled == 0.5
    assert dual.lower.intensity == 0.0
    assert math.isnan(dual.a)


def test_echo_roundtrip_bit_for_bit():
    params, dual = validate(NOMINAL_TREE)
    again = validate(echo(params, dual))
    assert again == (params, dual)
    assert validate(echo(*again)) == again


def test_thermal_occupation_examples():
    assert thermal_occupation(5e10, 0.1) == pytest.approx(0.0224, rel=5e-3)
    assert thermal_occupation(5e10, 0.0) == 0.0
    assert thermal_occupation(123.0, 0.0) == 0.0
    assert thermal_occupation(5e10, 1.0) == pytest.approx(2.150, rel=1e-3)


@pytest.mark.parametrize("omega,temp", [(5e10, 0.1), (5e10, 1.0), (1e9, 4.0), (3e11, 0.3)])
def test_thermal_occupation_matches_decimal_oracle(omega, temp):
    assert thermal_occupation(omega, temp) == pytest.approx(float(bose_einstein(omega, temp)), rel=1e-12)


def test_scaled_detuning_examples():
    assert scaled_detuning(2.5e7, 1e8) == 0.5
    assert scaled_detuning(0.0, 3.0) == 0.0
    assert scaled_detuning(-1e8, 1e8) == -2.0


@settings(max_examples=60, deadline=None)
@given(
    omega=st.floats(1e8, 1e13),
    t1=st.floats(1e-3, 100.0),
    t2=st.floats(1e-3, 100.0),
)
def test_occupation_monotone_in_temperature(omega, t1, t2):
    lo, hi = sorted((t1, t2))
    assert thermal_occupation(omega, lo) <= thermal_occupation(omega, hi)


@settings(max_examples=60, deadline=None)
@given(temp=st.floats(1e-2, 100.0), w1=st.floats(1e8, 1e13), w2=st.floats(1e8, 1e13))
def test_occupation_monotone_in_frequency(temp, w1, w2):
    lo, hi = sorted((w1, w2))
    assert thermal_occupation(lo, temp) >= thermal_occupation(hi, temp)


@settings(max_examples=40, deadline=None)
@given(ratio=st.floats(20.0, 1e4), omega=st.floats(1e9, 1e12))
def test_classical_limit(ratio, omega):
    temp = ratio * HBAR * omega / K_B
    x = HBAR * omega / (K_B * temp)
    assert thermal_occupation(omega, temp) * x == pytest.approx(1.0, rel=0.05)


def test_waveguide_and_channel_invariants():
    with pytest.raises(ConfigError):
        WaveguideParams(g=1.0, gamma=-1.0, v_g=1.0, length=1.0, omega_phonon=1.0)
    with pytest.raises(ConfigError):
        WaveguideParams(g=-1.0, gamma=1.0, v_g=1.0, length=1.0, omega_phonon=1.0)
    with pytest.raises(ConfigError):
        PumpChannel(-1.0, 0.0)
    with pytest.raises(ConfigError):
        PumpChannel(1.0, math.inf)
    with pytest.raises(ConfigError):
        DualPumpConfig(PumpChannel(1.0, 0.0, LOWER), PumpChannel(1.0, 0.0, LOWER))


def test_shift_signs_follow_detuning_maps():
    ch_u = PumpChannel(1.0, 0.5, UPPER).shifted(1e6, 1e8)
    ch_l = PumpChannel(1.0, 0.5, LOWER).shifted(1e6, 1e8)
    assert ch_u.detuning_scaled == pytest.approx(0.5 - 0.02)
    assert ch_l.detuning_scaled == pytest.approx(0.5 + 0.02)


def test_noise_strengths():
    noise = LangevinNoiseSpec(gamma=2.0, n_bar=0.25)
    assert noise.normal_strength == 0.5
    assert noise.antinormal_strength == 2.5


def test_occupation_deep_quantum_regime_underflows_cleanly():
    assert thermal_occupation(1e13, 1e-3) == 0.0
    assert thermal_occupation(5e10, 5e10 * HBAR / (K_B * 650.0)) == pytest.approx(math.exp(-650.0), rel=1e-12)
