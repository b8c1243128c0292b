"""Electron spin moment of a Dirac wave packet with self-interaction and mass renormalization."""
from .dirac import GAMMA, GaussianPacket, PlaneWave, make_gaussian_packet, make_plane_wave
from .moments import (BracketError, Convention, ConvergenceError, MomentBreakdown, SphereSpec, TaylorValidityError,
                      first_order_si_moment, magnetic_moment_from_current, mass_renorm_moment_correction,
                      solve_matching_width, sweep, total_moment)
from .pauli import PauliState, cross_term_moment, equivalence_report
from .quadrature import Method, QuadratureResult, integrate_3d, integrate_6d_coulomb
from .scales import CODATA_CGS, PhysicalScales, bohr_magneton, load_config, qed_first_order_moment
from .selffield import (NonRelativisticWarning, electric_self_energy, electromagnetic_mass, magnetic_self_energy,
                        self_field_report)

__version__ = "0.1.0"
