import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinor_moment.dirac import current_density, make_gaussian_packet, make_plane_wave
from spinor_moment.gordon import (SLICE_HEADER, a_coupling_current, convection_current, field_slice, gordon_residual,
                                  gordon_terms, magnetization_current, magnetization_current_field,
                                  polarization_current, spin_density, write_slice_csv)
from spinor_moment.scales import CODATA_CGS

from test_dirac import momenta, unit_vectors

LAM = CODATA_CGS.compton_radius()
points = st.tuples(*[st.floats(-3, 3)] * 3)


@given(unit_vectors, points)
def test_magnetization_current_is_azimuthal(n, x_units):
    s = CODATA_CGS
    p = make_gaussian_packet(4 * LAM, n)
    x = np.asarray(x_units) * p.d
    expected = s.e * s.hbar / (s.m * p.d**2) * p.density_profile(np.linalg.norm(x)) * np.cross(x, n)
    got = magnetization_current(p, x)[0]
    # natural magnitude of J_M; absolute slack covers spinor roundoff near the axis
    scale = s.e * s.hbar / (s.m * p.d) * p.amplitude**2
    np.testing.assert_allclose(got, expected, rtol=1e-10, atol=1e-14 * scale)
    np.testing.assert_allclose(magnetization_current_field(p)(x)[0], expected, rtol=1e-10, atol=1e-14 * scale)


def test_magnetization_current_direction_at_d():
    p = make_gaussian_packet(5 * LAM)
    J = magnetization_current(p, [p.d, 0, 0])[0]
    assert J[1] < 0
    assert abs(J[0]) == 0.0 and abs(J[2]) == 0.0


def test_spin_density_upper_packet():
    p = make_gaussian_packet(2 * LAM, (0, 1, 0))
    x = np.array([[0.1, 0.2, 0.3]]) * p.d
    np.testing.assert_allclose(spin_density(p, x)[0], [0, p.envelope(x)[0] ** 2, 0], atol=1e-12 * p.amplitude**2)


def test_frozen_packet_has_no_polarization_or_convection():
    p = make_gaussian_packet(3 * LAM)
    x = np.random.default_rng(2).normal(size=(5, 3)) * p.d
    np.testing.assert_array_equal(polarization_current(p, x), 0.0)
    np.testing.assert_array_equal(convection_current(p, x), 0.0)


@given(momenta, momenta, st.sampled_from(["up", "down"]))
def test_gordon_identity_plane_waves(p_units, a_units, spin):
    s = CODATA_CGS
    mc = s.m * s.c
    A = np.asarray(a_units) * mc * s.c / s.e
    w = make_plane_wave(np.asarray(p_units) * mc, spin, s, A)
    x = np.random.default_rng(5).normal(size=(6, 3)) * 10 * LAM
    assert np.max(gordon_residual(w, A, x)) <= 1e-10


def test_gordon_vanishing_current_not_flagged():
    # the at-rest wave in zero potential carries no current
    w = make_plane_wave((0, 0, 0))
    x = np.zeros((2, 3))
    assert np.max(np.abs(current_density(w, x))) == 0.0
    assert np.max(np.abs(gordon_terms(w, None, x).total)) == 0.0


def test_a_coupling_is_linear_in_A():
    p = make_gaussian_packet(5 * LAM)
    x = np.random.default_rng(1).normal(size=(4, 3)) * p.d
    a1, a2 = np.array([1.0, 2.0, -1.0]), np.array([0.5, 0.0, 3.0])
    lhs = a_coupling_current(p, 2 * a1 - a2, x)
    rhs = 2 * a_coupling_current(p, a1, x) - a_coupling_current(p, a2, x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)
    np.testing.assert_array_equal(a_coupling_current(p, None, x), 0.0)
    np.testing.assert_allclose(a_coupling_current(p, lambda q: np.tile(a1, (len(q), 1)), x),
                               a_coupling_current(p, a1, x))


def test_field_slice_shape_and_csv(tmp_path):
    p = make_gaussian_packet(5 * LAM)
    rows = field_slice(magnetization_current_field(p), 3 * p.d, 10)
    assert rows.shape == (100, 6)
    assert np.all(rows[:, 2] == 0.0)
    out = tmp_path / "slice.csv"
    text = write_slice_csv(rows, out)
    assert text.splitlines()[0] == ",".join(SLICE_HEADER)
    assert out.read_text() == text
    with pytest.raises(ValueError):
        field_slice(magnetization_current_field(p), p.d, 7)
