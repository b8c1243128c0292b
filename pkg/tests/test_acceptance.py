"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line that pytest prints in an "acceptance
criteria" section at the end of the run. The electromagnetic-mass bound is
not met by the analytic value and is kept as a strict expected failure.
"""
import math
import time

import numpy as np
import pytest

from spinor_moment import cli
from spinor_moment.dirac import make_gaussian_packet, make_plane_wave
from spinor_moment.gordon import field_slice, gordon_residual, magnetization_current_field
from spinor_moment.moments import (SphereSpec, first_order_si_moment, magnetic_moment_from_current,
                                   solve_matching_width, sphere_current_field, sphere_moment_closed_form)
from spinor_moment.pauli import PauliState, cross_term_moment
from spinor_moment.quadrature import c_b_integrand, c_e_integrand, c_i_integrand, integrate_6d_coulomb
from spinor_moment.scales import CODATA_CGS, bohr_magneton
from spinor_moment.selffield import (NonRelativisticWarning, electric_self_energy, electromagnetic_mass,
                                     first_order_current_field, magnetic_self_energy)

S = CODATA_CGS
LAM = S.compton_radius()
C_E_EXACT = 1 / math.sqrt(2 * math.pi)
EXACT = {"C_E": C_E_EXACT, "C_I": C_E_EXACT / 3, "C_B": C_E_EXACT / 12}
# golden regression value, computed with this code at build time
ORACLE_DSTAR = 1.67108
ORACLE_DSTAR_TOL = 2e-4


def test_01_sphere_oracle(report):
    spec = SphereSpec(Q=1.0, R=1.0, omega=1.0)
    num = magnetic_moment_from_current(sphere_current_field(spec), S.c)
    exact = sphere_moment_closed_form(spec, S.c)
    rel = np.linalg.norm(num - exact) / np.linalg.norm(exact)
    assert report(1, rel <= 1e-6, f"rotating sphere moment, relative error {rel:.2e} (tol 1e-6)")


def test_02_dirac_moment(report):
    mu = bohr_magneton(S)
    worst = 0.0
    for k in (0.5, 1.0, 5.0, 100.0, 1e4):
        m = magnetic_moment_from_current(magnetization_current_field(make_gaussian_packet(k * LAM)), S.c)
        worst = max(worst, np.linalg.norm(m - np.array([0, 0, -mu])) / mu)
    assert report(2, worst <= 1e-6, f"J_M moment = -mu_B z over d/lambda_C in [0.5, 1e4], max rel error {worst:.2e}")


@pytest.mark.parametrize("name,factory", [("C_E", c_e_integrand), ("C_I", c_i_integrand), ("C_B", c_b_integrand)])
def test_03_dual_engine_constants(report, name, factory):
    det = integrate_6d_coulomb(factory(), "det")
    t0 = time.perf_counter()
    mc = integrate_6d_coulomb(factory(), "mc", 10**7)
    elapsed = time.perf_counter() - t0
    sigma = math.hypot(det.uncertainty, mc.std_error)
    gap = abs(det.value - mc.value)
    abs_err = abs(mc.value - EXACT[name])
    ok = gap <= 3 * sigma and abs_err <= 1e-3
    assert report(3, ok, f"{name}: det {det.value:.8f}, mc {mc.value:.6f} +- {mc.std_error:.1e} "
                         f"(gap {gap / sigma:.2f} sigma, |mc - exact| {abs_err:.1e}, {elapsed:.1f}s)")


def test_04_published_numbers(report):
    c_e = integrate_6d_coulomb(c_e_integrand()).value
    c_b = integrate_6d_coulomb(c_b_integrand()).value
    d = 5 * LAM
    m1 = first_order_si_moment(make_gaussian_packet(d))[2]
    m1_coeff = m1 / (S.e**3 * S.hbar / (S.m**2 * S.c**3 * d))
    checks = [abs(c_e / 0.403 - 1) <= 0.05, abs(m1_coeff / 0.071 - 1) <= 0.10, abs(c_b / 0.036 - 1) <= 0.10]
    assert report(4, all(checks), f"C_E {c_e:.4f} vs 0.403 (5%), m1 coeff {m1_coeff:.4f} vs 0.071 (10%), "
                                  f"C_B {c_b:.4f} vs 0.036 (10%)")


def test_05_matching_width(report):
    published = solve_matching_width("paper")
    with pytest.warns(NonRelativisticWarning):
        oracle = solve_matching_width("oracle")
    ok = abs(published - 2.09) <= 0.01 and abs(oracle - ORACLE_DSTAR) <= ORACLE_DSTAR_TOL
    assert report(5, ok, f"d*/lambda_C published constants {published:.4f} (2.09 +- 0.01), "
                         f"oracle {oracle:.5f} (golden {ORACLE_DSTAR})")


def test_06_method_equivalence(report):
    worst = 0.0
    for k in (2, 5, 10, 20):
        pkt = make_gaussian_packet(k * LAM)
        a = cross_term_moment(PauliState.from_packet(pkt))
        b = first_order_si_moment(pkt)
        worst = max(worst, np.linalg.norm(a - b) / np.linalg.norm(b))
    assert report(6, worst <= 1e-3, f"cross-term vs current-correction moment, max rel diff {worst:.1e} (tol 1e-3)")


def test_07_gordon_identity(report):
    rng = np.random.default_rng(2024)
    mc = S.m * S.c
    worst = 0.0
    for _ in range(20):
        A = rng.normal(size=3) * mc * S.c / S.e * 0.3
        spin = rng.normal(size=2) + 1j * rng.normal(size=2)
        wave = make_plane_wave(rng.normal(size=3) * mc, spin, S, A)
        worst = max(worst, float(np.max(gordon_residual(wave, A, rng.normal(size=(16, 3)) * 10 * LAM))))
    assert report(7, worst <= 1e-10, f"Gordon sum vs Dirac current on 20 plane waves, max rel residual {worst:.1e}")


def test_08_scaling_laws(report):
    d = 5 * LAM
    p1, p2 = make_gaussian_packet(d), make_gaussian_packet(2 * d)
    r_m1 = first_order_si_moment(p1)[2] / first_order_si_moment(p2)[2]
    r_ue = electric_self_energy(p1).value / electric_self_energy(p2).value
    r_ub = magnetic_self_energy(p1).value / magnetic_self_energy(p2).value
    ok = abs(r_m1 / 2 - 1) <= 0.02 and abs(r_ue / 2 - 1) <= 0.02 and abs(r_ub / 8 - 1) <= 0.02
    assert report(8, ok, f"ratios at (d, 2d): m1 {r_m1:.6f} (2), U_E {r_ue:.6f} (2), U_B {r_ub:.6f} (8)")


@pytest.mark.xfail(strict=True, reason="analytic m_em at d = lambda_C is C_E alpha m_e ~ 2.9e-3 m_e, "
                                        "about 7x the stated bound")
def test_09_mass_bound(report):
    ratio = electromagnetic_mass(make_gaussian_packet(LAM)) / S.m_e
    assert report(9, ratio <= 0.00042, f"m_em(d = lambda_C) / m_e = {ratio:.5f} (bound 0.00042)")


def test_10_field_slice(report):
    pkt = make_gaussian_packet(5 * LAM)
    # even grid: the origin, where both fields vanish, is not sampled
    jm = field_slice(magnetization_current_field(pkt), 3 * pkt.d, 16)
    j1 = field_slice(first_order_current_field(pkt), 3 * pkt.d, 16)
    dots = np.einsum("ij,ij->i", jm[:, 3:], j1[:, 3:])
    ok = bool(np.all(dots < 0))
    assert report(10, ok, f"J_1 . J_M < 0 at {int(np.sum(dots < 0))}/{len(dots)} slice points")


def test_11_determinism(report, tmp_path, capsys):
    runs = [integrate_6d_coulomb(c_i_integrand(), "mc", 10**6, seed=0x5EED) for _ in range(2)]
    same_values = runs[0].value.hex() == runs[1].value.hex() and runs[0].std_error.hex() == runs[1].std_error.hex()
    paths = [tmp_path / f"constants_{i}.csv" for i in range(2)]
    for p in paths:
        cli.main(["constants", "--budget", "1000000", "--seed", "7", "--out", str(p)])
    capsys.readouterr()
    same_files = paths[0].read_bytes() == paths[1].read_bytes()
    assert report(11, same_values and same_files, "fixed-seed MC reruns bit-identical "
                                                  f"(values {same_values}, CLI output files {same_files})")
