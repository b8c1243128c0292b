"""The first-order moment correction computed along two independent routes.

Route A follows the current. It builds A_1 from J_M, forms J_1 = -(e^2/mc) rho A_1,
and then takes (1/2c) int x cross J_1.
Route B follows the cross term A_ext . A_1 of the Pauli Hamiltonian.
Its x-integral is done first, as a Cartesian-moment Coulomb convolution.

Run:  python3 demos/04_two_routes_to_m1.py
"""
from spinor_moment import CODATA_CGS, equivalence_report, make_gaussian_packet
from spinor_moment.pauli import PauliState, pauli_residual

lam = CODATA_CGS.compton_radius()
for k in (2, 5, 10, 20):
    rep = equivalence_report(make_gaussian_packet(k * lam))
    print(f"d = {k:2d} lambda_C   m1_z = {rep['first_order_si_moment'][2]:.6e}   "
          f"cross term = {rep['cross_term_moment'][2]:.6e}   rel diff {rep['relative_difference']:.1e}")

# A Gaussian is not an eigenstate of the free Pauli Hamiltonian; the
# relative residual |(H - <H>) chi| / |H chi| is sqrt(2/5) at every width.
print("Pauli residual ratio:", round(pauli_residual(PauliState(d=5 * lam)).relative, 6))
