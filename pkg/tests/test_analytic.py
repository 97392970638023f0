import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qwell1d import analytic, tmm
from qwell1d.analytic import (SweepTable, dqwtb, dqwtb_params, find_peaks, single_barrier,
                              single_barrier_phases_tanh, single_barrier_R_closed,
                              single_barrier_T_closed, sqw_db, sqw_db_T_identical, sweep)
from qwell1d.core import EnergyGrid, LayeredStructure

FIG4 = dict(V1=0.4655, a=2.5, L1=2.5, V2=0.3258, b=1.5, L2=2.5)

# Independent oracle: 40-digit mpmath transfer matrix with psi, psi' matching.
ORACLE = {
    "single_0.1": 0.04837821775715283,
    "fig4_0.1529": 0.14177452992483692,
    "fig4_0.3": 0.32648068445493322,
    "fig4_0.5396": 0.09295188568398585,
    "sqwdb_0.5396": 0.48813686744713125,
    "fig5I_0.4": 7.025864973087494e-4,
    "fig5II_0.4": 9.532042990136530e-3,
}

energies = st.floats(0.005, 2.0)
heights = st.floats(-0.5, 3.0)
widths = st.floats(0.1, 6.0)


def test_no_barrier_is_transparent():
    res = single_barrier(0.2, 0.0, 2.5)
    assert res.t == pytest.approx(1.0, abs=1e-14)
    assert res.T == pytest.approx(1.0, abs=1e-14) and res.R == pytest.approx(0.0, abs=1e-14)


def test_over_barrier_resonance():
    a, V0, m = 2.5, 0.3, 0.067
    # k2 a = pi
    E = V0 + (np.pi / a) ** 2 * analytic.UNITS.kinetic(m)
    assert single_barrier(E, V0, a, m).T == pytest.approx(1.0, abs=1e-12)


def test_single_barrier_oracle_value():
    res = single_barrier(0.1, 0.4655, 2.5)
    assert 0 < res.T < 1
    assert res.T == pytest.approx(ORACLE["single_0.1"], rel=1e-8)
    assert res.T == pytest.approx(abs(res.t) ** 2, abs=1e-12)
    assert res.R == pytest.approx(abs(res.r) ** 2, abs=1e-12)


@given(energies, heights, widths)
def test_closed_T_R_match_amplitudes(E, V0, a):
    res = single_barrier(E, V0, a)
    assert single_barrier_T_closed(E, V0, a) == pytest.approx(res.T, abs=1e-10)
    assert single_barrier_R_closed(E, V0, a) == pytest.approx(res.R, abs=1e-10)


@given(st.floats(0.01, 0.45), st.floats(0.2, 5.0))
def test_tanh_phases_match_complex_path(E, a):
    V0 = 0.4655
    res = single_barrier(E, V0, a)
    theta_T, theta_R = single_barrier_phases_tanh(E, V0, a)
    d = np.angle(np.exp(1j * (theta_T - res.theta_T)))
    assert abs(d) < 1e-10
    d = np.angle(np.exp(1j * (theta_R - res.theta_R - np.pi)))
    assert abs(d) < 1e-10


def test_band_edge_is_finite_and_continuous():
    V0, a = 0.4655, 2.5
    at = single_barrier(V0, V0, a)
    near = single_barrier(V0 * (1 + 1e-9), V0, a)
    assert np.isfinite(at.T) and at.T == pytest.approx(near.T, abs=1e-7)
    assert at.T + at.R == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("E", [0.0, -0.1])
def test_rejects_nonpositive_energy(E):
    with pytest.raises(ValueError):
        single_barrier(E, 0.4, 2.0)


def test_rejects_arrays():
    with pytest.raises(TypeError):
        single_barrier(np.array([0.1, 0.2]), 0.4, 2.0)


def test_double_barrier_without_second_barrier():
    a = single_barrier(0.2, 0.4655, 2.5)
    b = sqw_db(0.2, 0.4655, 2.5, 4.0, 0.7, 0.0)
    assert b.t == pytest.approx(a.t, abs=1e-13)
    assert b.T == pytest.approx(a.T, abs=1e-13)


@given(st.floats(0.01, 1.5), widths, widths, st.floats(0.1, 1.0))
def test_identical_barriers_closed_form(E, a, L, V):
    T = sqw_db(E, V, a, L, V, a).T
    assert sqw_db_T_identical(E, V, a, L) == pytest.approx(T, abs=1e-12)


def test_double_barrier_oracle():
    assert sqw_db(0.5396, 0.4655, 2.5, 6.5, 0.4655, 2.5).T == pytest.approx(
        ORACLE["sqwdb_0.5396"], rel=1e-8)


@pytest.mark.parametrize("E,key", [(0.1529, "fig4_0.1529"), (0.3, "fig4_0.3"), (0.5396, "fig4_0.5396")])
def test_triple_barrier_oracle(E, key):
    assert dqwtb(E, **FIG4).T == pytest.approx(ORACLE[key], rel=1e-8)


def test_fig5_oracle():
    base = dict(V1=1.0, a=2.5, L1=2.5, b=1.5, L2=2.5)
    assert dqwtb(0.4, V2=0.5, **base).T == pytest.approx(ORACLE["fig5I_0.4"], rel=1e-8)
    assert dqwtb(0.4, V2=2.0, **base).T == pytest.approx(ORACLE["fig5II_0.4"], rel=1e-8)


def test_thin_empty_central_barrier_approaches_double_barrier():
    E = np.linspace(0.05, 0.7, 50)
    a = sweep("dqwtb", dict(V1=0.4655, a=2.5, L1=3.25, V2=0.0, b=1e-6, L2=3.25), E).T
    b = sweep("sqw_db", dict(V1_left=0.4655, a=2.5, L=6.5 + 1e-6, V_right=0.4655, b=2.5), E).T
    assert np.max(np.abs(a - b)) < 1e-10


def test_well_swap_leaves_T_unchanged_paper_case():
    E = np.linspace(0.01, 1.0, 500)
    base = dict(V1=0.4655, a=2.5, V2=0.3258, b=1.5)
    t14 = sweep("dqwtb", {**base, "L1": 1.0, "L2": 4.0}, E)
    t41 = sweep("dqwtb", {**base, "L1": 4.0, "L2": 1.0}, E)
    assert np.max(np.abs(t14.T - t41.T)) < 1e-12


@given(energies, st.floats(0.1, 2.0), widths, st.floats(-0.3, 2.0), widths, st.floats(0, 5), st.floats(0, 5))
def test_swap_symmetry_property(E, V1, a, V2, b, L1, L2):
    T1 = dqwtb(E, V1, a, L1, V2, b, L2).T
    T2 = dqwtb(E, V1, a, L2, V2, b, L1).T
    assert T1 == pytest.approx(T2, abs=1e-12)


@given(energies, st.floats(0.1, 2.0), widths, st.floats(-0.3, 2.0), widths, st.floats(0, 5), st.floats(0, 5))
def test_flux_conservation_triple(E, V1, a, V2, b, L1, L2):
    res = dqwtb(E, V1, a, L1, V2, b, L2)
    assert res.T + res.R == pytest.approx(1.0, abs=1e-10)


@given(energies, heights, widths, st.floats(0, 8), heights, widths)
def test_flux_conservation_double(E, V1, a, L, V2, b):
    res = sqw_db(E, V1, a, L, V2, b)
    assert res.T + res.R == pytest.approx(1.0, abs=1e-10)


@given(energies, st.floats(0.1, 2.0), widths, st.floats(-0.3, 2.0), widths, st.floats(0, 5), st.floats(0, 5))
def test_triple_matches_transfer_matrix(E, V1, a, V2, b, L1, L2):
    res = dqwtb(E, V1, a, L1, V2, b, L2)
    stack = LayeredStructure.dqwtb(V1, a, L1, V2, b, L2)
    ref = tmm.scatter(stack, E)
    assume(ref.T > 1e-250)
    assert res.T == pytest.approx(ref.T, abs=1e-8)
    # same phase convention, so the complex amplitudes agree too
    assert abs(res.t - ref.t) <= 1e-7 * max(1.0, abs(ref.t))
    assert abs(res.r - ref.r) <= 1e-7


def test_equal_triple_barrier_matches_transfer_matrix():
    E = np.linspace(0.01, 1.0, 400)
    T = sweep("dqwtb", dict(V1=0.6, a=2.0, L1=3.0, V2=0.6, b=2.0, L2=3.0), E).T
    ref = tmm.sweep_tmm(LayeredStructure.from_pairs([(2, .6), (3, 0), (2, .6), (3, 0), (2, .6)]), E).T
    assert np.max(np.abs(T - ref)) < 1e-8


def test_params_from_stack_round_trip():
    p = dqwtb_params(LayeredStructure.dqwtb(**FIG4))
    assert p == {**FIG4, "mass_ratio": 0.067}


def test_unequal_lateral_barriers_rejected():
    s = LayeredStructure.from_pairs([(2.5, 1.0), (2.5, 0), (1.5, 0.5), (2.5, 0), (2.5, 0.8)])
    with pytest.raises(ValueError, match="transfer-matrix"):
        dqwtb_params(s)


def test_sweep_trivial_rows():
    tab = sweep("single_barrier", dict(V0=0.0, a=1.0), EnergyGrid(0.1, 0.2, 2))
    assert np.allclose(tab.T, 1.0)


def test_sweep_marks_bad_rows_without_aborting():
    tab = sweep("single_barrier", dict(V0=0.3, a=1.0), np.array([0.2, -0.1, 0.1]))
    assert list(tab.E) == [-0.1, 0.1, 0.2]
    assert np.isnan(tab.T[0]) and 0 in tab.errors
    assert np.all(np.isfinite(tab.T[1:]))


def test_sweep_rejects_unknown_or_incomplete():
    with pytest.raises(ValueError):
        sweep("quadruple", {}, np.array([0.1]))
    with pytest.raises(ValueError, match="needs parameters"):
        sweep("dqwtb", dict(V1=1.0), np.array([0.1]))


def test_find_peaks_monotone_is_empty():
    E = np.linspace(0.1, 1, 20)
    tab = SweepTable(E, np.sqrt(E / 2) + 0j, np.sqrt(1 - E / 2) + 0j)
    assert find_peaks(tab) == []


def test_find_peaks_recovers_parabola_vertex():
    E = np.linspace(0.0, 1.0, 41)
    T = 0.9 - 0.5 * (E - 0.4123) ** 2
    tab = SweepTable(E, np.sqrt(T) + 0j, np.sqrt(1 - T) + 0j)
    (pe, pt), = find_peaks(tab, 0.5)
    assert pe == pytest.approx(0.4123, abs=(E[1] - E[0]) ** 2)
    assert pt == pytest.approx(0.9, abs=1e-9)


def test_fig4_resonance_is_unit_transmission():
    tab = sweep("dqwtb", FIG4, np.linspace(0.05, 0.7, 2000))
    peaks = find_peaks(tab, 0.5)
    assert peaks
    E0, T0 = peaks[0]
    # mirror-symmetric stack: the resonance is complete
    assert 0.15 < E0 < 0.17
    assert dqwtb(E0, **FIG4).T == pytest.approx(1.0, abs=1e-4)


def test_csv_format(tmp_path):
    tab = sweep("single_barrier", dict(V0=0.3, a=1.0), np.array([0.1, 0.2]))
    path = tmp_path / "t.csv"
    tab.to_csv(path)
    text = path.read_bytes().decode()
    lines = text.split("\n")
    assert lines[0] == ",".join(analytic.CSV_COLUMNS)
    assert "\r" not in text and len(lines) == 4 and lines[-1] == ""
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0]) <= 11 for v in lines[1].split(","))

