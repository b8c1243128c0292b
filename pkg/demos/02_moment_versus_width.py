"""How the total spin moment depends on the packet width.

Run:  python3 demos/02_moment_versus_width.py
"""
import math
import warnings

from spinor_moment import CODATA_CGS, make_gaussian_packet, solve_matching_width, sweep, total_moment
from spinor_moment.selffield import NonRelativisticWarning

lam = CODATA_CGS.compton_radius()
anomaly = CODATA_CGS.alpha() / (2 * math.pi)

# Moment budget at five Compton radii. m0 is the bare Bohr magneton term.
# m1 is the self-interaction correction, which points against m0.
# The mass-renormalization term points along m0 and wins.
b = total_moment(make_gaussian_packet(5 * lam), "oracle")
for label, vec in [("m0", b.m0), ("m1", b.m1_selfinteraction), ("m_renorm", b.m_massrenorm), ("total", b.total)]:
    print(f"{label:>9}: {vec[2]: .6e} erg/G")
print(f"|total| / mu_B - 1 = {b.ratio - 1:.6e}")

# Every correction falls off like 1/d, so mu/mu_B - 1 is a single curve in alpha lambda_C / d.
print("\n d/lambda_C   published-consts  oracle-constants")
for (d, mp, *_), (_, mo, *_) in zip(sweep(1, 20, 8, "paper"), sweep(1, 20, 8, "oracle")):
    print(f"{d:10.3f}   {mp - 1:15.4e}   {mo - 1:15.4e}")

# Width at which the moment matches the one-loop value 1 + alpha / 2 pi
with warnings.catch_warnings():
    warnings.simplefilter("ignore", NonRelativisticWarning)
    for conv in ("paper", "oracle"):
        print(f"d* ({conv}) = {solve_matching_width(conv):.4f} lambda_C   (target anomaly {anomaly:.4e})")
# With the exact constants d* = 2 pi (C_E - C_I) ~ 1.67. That is below two Compton
# radii, where the non-relativistic picture is already strained.
