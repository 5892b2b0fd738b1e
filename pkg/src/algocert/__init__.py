"""Certification and simulation toolkit for first-order algorithms.

First-order optimization methods are modeled as linear systems in
feedback with quadratically bounded oracles.  Incremental-dissipativity
linear matrix inequalities are assembled and solved with a built-in
dense feasibility engine, and every certificate can be cross-checked
against simulated incremental trajectories.
"""

from .matrixcore import (
    BlockLayout,
    MatrixError,
    SymMatrix,
    assemble,
    max_eig,
    min_eig,
    sym_eig,
)
from .models import (
    ClosedAlgorithmModel,
    ModelError,
    OpenAlgorithmModel,
    OracleBound,
    PlantSupply,
    affine_equality_bound,
    extend_bound_with_input,
    firmly_nonexpansive_bound,
    gradient_descent_model,
    lipschitz_bound,
    nesterov_model,
    open_gradient_descent_gradient_noise,
    open_nesterov_gradient_noise,
    open_nesterov_measurement_noise,
    sector_bound,
    small_gain_supply,
    stack_bounds,
    strongly_monotone_bound,
    to_closed,
)
from .lmi import (
    AffineMatrixFamily,
    BisectionStep,
    Certificate,
    NotFound,
    ScalarSearchResult,
    bisect_gamma,
    bisect_mu,
    closed_lmi,
    closed_loop_lmi,
    maximize_rho,
    open_gain_lmi,
    solve_feasibility,
)
from .certify import (
    AnalysisReport,
    certify_closed_loop,
    certify_gain,
    certify_margin,
    certify_nonexpansive,
    certify_rate,
)
from .simulate import (
    ExecutableOracle,
    LinearPlant,
    SimulationError,
    Trajectory,
    check_oracle_bound,
    composite_storage_check,
    empirical_contraction,
    empirical_gain,
    eval_oracle,
    rollout,
    spectral_radius,
)

__version__ = "0.1.0"
