"""P1 finite-element schemes for radially symmetric semilinear heat equations.

u_t = u_xx + (N-1)/x u_x + f(u) on (0, 1), u_x(0) = 0, u(1) = 0.
"""
from .assembly import (assemble_B, assemble_load, assemble_mass_nonsym, assemble_mass_sym,
                       assemble_stiffness_sym)
from .diagnostics import (ErrorReport, RunTrace, blowup_monitor, discrete_energy, error_vs_reference,
                          l1_norm, linf_norm, observed_orders, weighted_l2_norm)
from .driver import simulate
from .experiments import ExperimentConfig, convergence_study, emit_plot_data, preset, run_experiment
from .fields import NodalField
from .linalg import SingularSystemError, TriDiag, thomas_solve, tridiag_matvec
from .mesh import Mesh, build_graded_mesh, build_uniform_mesh, quasi_uniformity_ratio
from .nonlinearity import NonlinearitySpec
from .schemes import SchemeConfig, StepperState, initialize, ritz_projection, step
from .time_control import TimeController, discrete_l2h_norm, next_tau

__version__ = "0.1.0"
