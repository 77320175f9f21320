"""Discontinuous Galerkin solver for a 1D semilinear hyperbolic dimer system."""

from .basis import ModalBasis, eval_basis, gauss_legendre, gauss_radau_project, l2_project, modal_basis
from .diagnostics import (
    ConvergenceTable,
    EnergyLog,
    convergence_order,
    discrete_energy,
    l2_error,
    moving_box_energy,
    transition_point,
)
from .mesh import Mesh1D, build_uniform_mesh
from .model import SECH, UNIT, ZERO, Nonlinearity, ProblemSpec, characteristic_transform, make_problem
from .operator import (
    FLUX_PRESETS,
    DGOperator,
    DGState,
    FluxParams,
    UnstableFluxError,
    assemble_rhs,
    energy_rate_formula,
    interface_flux,
)
from .timestep import CONVERGENCE_CFL, KINK_DT, Observer, TimeStepPlan, evolve, rk4_step
from .travelwave import REFERENCE_SEED, KinkProfile, generate_kink, ode_rhs, q_invariant

__version__ = "0.1.0"

__all__ = [
    "CONVERGENCE_CFL", "ConvergenceTable", "DGOperator", "DGState", "EnergyLog", "FLUX_PRESETS",
    "FluxParams", "KINK_DT", "KinkProfile", "Mesh1D", "ModalBasis", "Nonlinearity", "Observer",
    "REFERENCE_SEED", "ProblemSpec", "SECH", "TimeStepPlan", "UNIT", "UnstableFluxError", "ZERO",
    "assemble_rhs", "build_uniform_mesh", "characteristic_transform", "convergence_order",
    "discrete_energy", "energy_rate_formula", "eval_basis", "evolve", "gauss_legendre",
    "gauss_radau_project", "generate_kink", "interface_flux", "l2_error", "l2_project",
    "make_problem", "modal_basis", "moving_box_energy", "ode_rhs", "q_invariant", "rk4_step",
    "transition_point",
]
