"""Conservative finite difference solver for the periodic modified Hunter-Saxton equation

    u_tx + (u^2)_xx / 2 = 2 omega u + u_x^2 / 2.

The scheme conserves discrete counterparts of the energy ``int u_x^2 / 2``
and of the constraint ``int (2 omega u + u_x^2 / 2)``, which bound the
solution uniformly in the maximum norm.
"""
from .experiments import (
    ConvergenceRow,
    RegressionFit,
    RunRecord,
    blowup_study,
    convergence_study,
    linear_regression,
    run_simulation,
    sample_initial,
)
from .grid_ops import AvgKind, DiffKind, Grid, GridError
from .invariants import InvariantReport, constraint_functional, hamiltonian, linf_bound, report
from .scheme import (
    Adaptive,
    AutoEpsilon,
    Diverged,
    FixedDt,
    NoConvergence,
    SchemeConfig,
    SchemeState,
    StepSizePlan,
    initial_state,
    plan_dt,
    recover_u,
    step_mcfm,
    step_proposed,
)
from .spectral import OperatorBank, build_bank

__version__ = "0.1.0"
