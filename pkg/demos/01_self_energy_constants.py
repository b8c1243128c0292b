"""Self-energy constants of a Gaussian electron packet, two engines side by side.

Run:  python3 demos/01_self_energy_constants.py [mc_samples]
"""
import math
import sys
import time

from spinor_moment.quadrature import c_b_integrand, c_e_integrand, c_i_integrand, integrate_6d_coulomb

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 10**6

# The three constants are 6D Coulomb pair integrals over Gaussian weights.
# The deterministic engine does the inner 3D integral in closed form, so only
# a smooth outer Gauss-Hermite sum remains.
# The Monte Carlo engine samples both points from the Gaussian weights directly.
print(f"{'':4} {'deterministic':>14} {'monte carlo':>22} {'closed form':>12}")
exact = 1 / math.sqrt(2 * math.pi)
for name, factory, ref in [("C_E", c_e_integrand, exact), ("C_I", c_i_integrand, exact / 3),
                           ("C_B", c_b_integrand, exact / 12)]:
    det = integrate_6d_coulomb(factory(), "det")
    t0 = time.perf_counter()
    mc = integrate_6d_coulomb(factory(), "mc", samples)
    dt = time.perf_counter() - t0
    print(f"{name:4} {det.value:14.10f} {mc.value:12.6f} +- {mc.std_error:.1e} {ref:12.10f}   ({dt:.1f}s)")

# Every value above is a rational multiple of 1/sqrt(2 pi).
# C_E sets the electrostatic self energy e^2 C_E / d.
# C_I sets the magnetization-current self interaction.
# The quoted C_B is C_I / 4, while the field energy (1/8 pi) int B^2
# actually works out to C_I / 2 in the same units (see 03_field_energies.py).
