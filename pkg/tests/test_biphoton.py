import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condpattern.biphoton import (
    ANALYZER_45,
    PathAmplitude,
    PumpSetting,
    apply_signal_hwp,
    coherent_rate,
    concurrence,
    eq1_coefficients,
    make_two_crystal_state,
    project_analyzers,
    pump_split,
)
from condpattern.errors import InvalidInput
from condpattern.polarization import H, V

R = math.sqrt(0.5)


def pol(j):
    return j.array()


def test_single_crystal_state():
    s = make_two_crystal_state(1, 0, 0)
    assert s.path(1).amp == 1 and s.path(2).amp == 0


def test_balanced_state_is_maximally_entangled():
    s = make_two_crystal_state(R, R, 0)
    assert s.norm2() == pytest.approx(1, abs=1e-12)
    assert concurrence(R, R) == pytest.approx(1.0, abs=1e-12)


def test_direct_construction():
    s = make_two_crystal_state(0.6, 0.8, math.pi)
    assert (s.path(1).amp, s.path(2).amp, s.phase_phi) == (0.6, 0.8, math.pi)
    assert np.allclose(pol(s.path(1).signal_pol), [1, 0]) and np.allclose(pol(s.path(2).idler_pol), [0, 1])


def test_unnormalized_pair_reports_defect():
    with pytest.raises(InvalidInput, match="1.000e-01"):
        make_two_crystal_state(0.6, 0.8 * math.sqrt(1 + 0.1 / 0.64))
    with pytest.raises(InvalidInput):
        make_two_crystal_state(-0.6, 0.8)


def test_bad_crystal_index():
    with pytest.raises(InvalidInput):
        PathAmplitude(3, H, H, 1)


@pytest.mark.parametrize("angle,expected", [(math.pi / 8, (R, R)), (0.0, (1, 0)), (math.pi / 4, (0, 1))])
def test_pump_split(angle, expected):
    assert pump_split(PumpSetting(angle)) == pytest.approx(expected, abs=1e-12)


def test_pump_split_crystal_switch():
    assert pump_split(PumpSetting(0.0), h_crystal=2) == pytest.approx((0, 1), abs=1e-12)


def test_signal_hwp_45_gives_swapped_labels():
    s = apply_signal_hwp(make_two_crystal_state(R, R), math.pi / 4)
    assert np.allclose(pol(s.path(1).signal_pol), pol(V), atol=1e-15)
    assert np.allclose(pol(s.path(2).signal_pol), pol(H), atol=1e-15)
    assert np.allclose(pol(s.path(1).idler_pol), pol(H)) and np.allclose(pol(s.path(2).idler_pol), pol(V))


def test_signal_hwp_zero_flips_vertical_path():
    s = apply_signal_hwp(make_two_crystal_state(R, R), 0.0)
    assert np.allclose(pol(s.path(1).signal_pol), [1, 0])
    assert np.allclose(pol(s.path(2).signal_pol), [0, -1])


def test_signal_hwp_twice_restores():
    s0 = make_two_crystal_state(0.6, 0.8)
    s2 = apply_signal_hwp(apply_signal_hwp(s0, math.pi / 4), math.pi / 4)
    for c in (1, 2):
        assert np.allclose(np.abs(pol(s2.path(c).signal_pol)), np.abs(pol(s0.path(c).signal_pol)), atol=1e-15)


@given(st.floats(0, math.pi / 2), st.floats(-5, 5))
def test_signal_hwp_preserves_norm(mix, theta):
    s = make_two_crystal_state(math.cos(mix), math.sin(mix), 0.3)
    assert apply_signal_hwp(s, theta).norm2() == pytest.approx(s.norm2(), abs=1e-12)


def test_project_balanced_factor():
    c1, c2 = project_analyzers(apply_signal_hwp(make_two_crystal_state(R, R), 0.0), ANALYZER_45, ANALYZER_45)
    assert abs(c1) == pytest.approx(R ** 3, abs=1e-12)
    assert abs(c2) == pytest.approx(0.35355, abs=1e-5)


def test_project_single_crystal_has_no_second_amplitude():
    for a_s, a_i in itertools.product((0.0, 0.4, 1.3), (0.0, 0.9)):
        _, c2 = project_analyzers(make_two_crystal_state(1, 0), a_s, a_i)
        assert c2 == 0


def test_project_kills_crystal_two_at_22p5():
    _, c2 = project_analyzers(apply_signal_hwp(make_two_crystal_state(R, R), math.pi / 8), ANALYZER_45, ANALYZER_45)
    assert abs(c2) < 1e-15


def test_project_attaches_phase_to_crystal_two():
    s = make_two_crystal_state(R, R, 0.7)
    c1, c2 = project_analyzers(s, ANALYZER_45, ANALYZER_45)
    assert np.angle(c2) == pytest.approx(0.7, abs=1e-12) and np.angle(c1) == 0


def test_eq1_coefficients_examples():
    assert eq1_coefficients(R, R, 0) == pytest.approx((0.5, 0.5), abs=1e-12)
    assert eq1_coefficients(R, R, math.pi / 4) == pytest.approx((0.5, -0.5), abs=1e-12)
    assert eq1_coefficients(1, 0, 0.37) == pytest.approx((math.cos(math.pi / 4 - 0.74), 0), abs=1e-12)


def test_jones_route_matches_eq1_magnitudes_on_grid():
    for mix, theta in itertools.product(np.linspace(0, math.pi / 2, 9), np.linspace(0, math.pi, 13)):
        a, b = math.cos(mix), math.sin(mix)
        state = apply_signal_hwp(make_two_crystal_state(a, b), theta)
        c1, c2 = project_analyzers(state, ANALYZER_45, ANALYZER_45)
        e1, e2 = eq1_coefficients(a, b, theta)
        assert abs(c1) == pytest.approx(abs(e1) * R, abs=1e-12)
        assert abs(c2) == pytest.approx(abs(e2) * R, abs=1e-12)
        # constant reflection phase: c2 = -e2/sqrt(2) for every plate angle
        assert c2 == pytest.approx(-e2 * R, abs=1e-12)


def test_coherent_rate_brute_force():
    # explicit two-photon amplitude sum with 4-component vectors as the oracle
    a, b, theta, phi = 0.6, 0.8, 0.2, 1.1
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    plate = np.array([[c, s], [s, -c]])
    d = np.array([R, R])
    hh = np.kron(plate @ [1, 0], [1, 0])
    vv = np.kron(plate @ [0, 1], [0, 1])
    psi = a * hh + b * np.exp(1j * (phi + math.pi)) * vv
    amp = np.kron(d, d) @ psi
    assert coherent_rate(a, b, theta, phi) == pytest.approx(2 * abs(amp) ** 2, abs=1e-12)


def test_concurrence():
    assert concurrence(1, 0) == 0
    assert concurrence(0.8, 0.6) == pytest.approx(0.96, abs=1e-12)


@given(st.floats(0, math.pi / 2))
def test_concurrence_symmetric_and_max_at_balance(mix):
    a, b = math.cos(mix), math.sin(mix)
    assert concurrence(a, b) == pytest.approx(concurrence(b, a), abs=1e-15)
    if abs(mix - math.pi / 4) > 1e-6:
        assert concurrence(a, b) < 1
