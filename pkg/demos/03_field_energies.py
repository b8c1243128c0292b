"""Cross-checks of the self energies against the field energies.

Run:  python3 demos/03_field_energies.py
"""
from spinor_moment import CODATA_CGS, make_gaussian_packet
from spinor_moment.selffield import (electric_field_energy, electric_self_energy, electromagnetic_mass,
                                     magnetic_field_energy, magnetic_self_energy)

lam = CODATA_CGS.compton_radius()
for k in (1.0, 2.0, 5.0):
    p = make_gaussian_packet(k * lam)
    ue, ub = electric_self_energy(p), magnetic_self_energy(p)
    print(f"d = {k} lambda_C")
    print(f"  U_E pair integral {ue.value:.6e}   (1/8pi) int E^2 {electric_field_energy(p):.6e}")
    print(f"  U_B (1/2c) J.A    {ub.value:.6e}   (1/8pi) int B^2 {magnetic_field_energy(p):.6e}")
    print(f"  m_em / m_e = {electromagnetic_mass(p) / CODATA_CGS.m_e:.5f}")

# At d = lambda_C the electromagnetic mass is C_E alpha m_e, about 0.0029 m_e.
# That is small, but several times the 4e-4 figure sometimes quoted for it.
