import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinor_moment.dirac import make_gaussian_packet
from spinor_moment.fields import VectorField3
from spinor_moment.gordon import magnetization_current_field
from spinor_moment.scales import CODATA_CGS, bohr_magneton
from spinor_moment.selffield import (NonRelativisticWarning, check_width, electric_field_energy,
                                     electric_self_energy, electromagnetic_mass, first_order_current_field,
                                     iterate_current_correction, magnetic_field_energy, magnetic_self_energy,
                                     self_field_report, vector_potential_from_current)

LAM = CODATA_CGS.compton_radius()
C_E = 1 / math.sqrt(2 * math.pi)


@pytest.fixture(scope="module")
def packet():
    return make_gaussian_packet(5 * LAM)


def test_vector_potential_closed_form_vs_raw(packet):
    JM = magnetization_current_field(packet)
    x = np.array([[packet.d, 0, 0], [0.3 * packet.d, -0.5 * packet.d, 0.8 * packet.d], [0, 0, 2 * packet.d]])
    fast = vector_potential_from_current(JM, x, CODATA_CGS.c)
    raw = vector_potential_from_current(JM, x, CODATA_CGS.c, method="raw")
    np.testing.assert_allclose(fast, raw, rtol=1e-9, atol=1e-12 * np.abs(fast).max())


def test_vector_potential_dipole_far_field(packet):
    JM = magnetization_current_field(packet)
    x = np.array([[12 * packet.d, 0, 0], [0, 9 * packet.d, 9 * packet.d]])
    m = np.array([0, 0, -bohr_magneton(CODATA_CGS)])
    r = np.linalg.norm(x, axis=1)[:, None]
    np.testing.assert_allclose(vector_potential_from_current(JM, x, CODATA_CGS.c), np.cross(m, x) / r**3, rtol=1e-8)


def test_non_decaying_current_rejected():
    with pytest.raises(ValueError):
        vector_potential_from_current(VectorField3(lambda p: np.ones_like(p)), [1.0, 0, 0], CODATA_CGS.c)


@given(st.tuples(*[st.floats(-3, 3)] * 3).filter(lambda v: math.hypot(v[0], v[1]) > 1e-3))
def test_first_order_current_opposes_magnetization(x_units):
    p = make_gaussian_packet(5 * LAM)
    x = np.asarray(x_units) * p.d
    assert np.dot(first_order_current_field(p)(x)[0], magnetization_current_field(p)(x)[0]) < 0


def test_iteration_alternates_and_guards(packet):
    J1, J2 = iterate_current_correction(packet, 2)
    x = np.array([[packet.d, 0.2 * packet.d, 0.1 * packet.d]])
    assert np.dot(J1(x)[0], J2(x)[0]) < 0
    # each order is down by roughly alpha lambda_C / d
    ratio = np.linalg.norm(J2(x)) / np.linalg.norm(J1(x))
    assert 0.1 * CODATA_CGS.alpha() / 5 < ratio < 10 * CODATA_CGS.alpha() / 5
    for bad in (0, 4):
        with pytest.raises(ValueError):
            iterate_current_correction(packet, bad)


def test_electric_self_energy_closed_form(packet):
    u = electric_self_energy(packet)
    assert u.constant == pytest.approx(C_E, rel=1e-10)
    assert u.value == pytest.approx(C_E * CODATA_CGS.e**2 / packet.d, rel=1e-10)
    assert electric_field_energy(packet) == pytest.approx(u.value, rel=1e-8)


def test_magnetic_energy_pair_vs_field(packet):
    ub = magnetic_self_energy(packet)
    assert ub.constant == pytest.approx(C_E / 6, rel=1e-6)
    assert magnetic_field_energy(packet) == pytest.approx(ub.value, rel=1e-5)


def test_electromagnetic_mass(packet):
    m = electromagnetic_mass(packet)
    assert m == pytest.approx(C_E * CODATA_CGS.e**2 / (packet.d * CODATA_CGS.c**2), rel=1e-10)
    assert electromagnetic_mass(packet, include_magnetic=True) > m


def test_width_warning():
    with pytest.warns(NonRelativisticWarning):
        assert check_width(make_gaussian_packet(1.5 * LAM)) is True
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_width(make_gaussian_packet(3 * LAM)) is False


def test_report_json(packet):
    rep = json.loads(self_field_report(packet).to_json())
    assert rep["approximation"] == "static approximation"
    assert rep["warnings"] == []
    assert rep["C_E"] == pytest.approx(C_E, rel=1e-9)
