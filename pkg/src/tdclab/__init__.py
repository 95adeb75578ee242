"""Two time-scale TDC policy evaluation with projected iterates.

The package splits into instance construction (mdp), exact mean-path
linear algebra (operators), the stochastic iteration itself (tdc), the
finite-time bound constants and blockwise planner (bounds), and the
multi-run experiment driver behind the command line tool (harness).
"""

from .errors import (
    DegenerateInstance,
    HorizonExceeded,
    InsufficientData,
    InvalidArgument,
    NonpositiveError,
    NotErgodic,
    NotNegativeDefinite,
    PlanInfeasible,
    SingularOperator,
    TdcLabError,
    UnknownPreset,
)
from .mdp import (
    FeatureMap,
    Mdp,
    MixingEstimate,
    Observation,
    PolicyPair,
    generate_garnet,
    induced_chain,
    instance_from_json,
    instance_to_json,
    load_instance,
    mixing_constants,
    sample_step,
    save_instance,
    stationary_distribution,
)
from .operators import (
    ProblemData,
    build_problem_data,
    exact_operators,
    mspbe,
    optimal_theta,
    projection_radii,
    psi,
    spectral_params,
)
from .tdc import (
    Blockwise,
    Constant,
    Diminishing,
    TdcState,
    TrajectorySeries,
    make_record_grid,
    per_sample_matrices,
    project_ball,
    run_blockwise,
    run_tdc,
    run_tdc_many,
    stepsize_arrays,
    stepsize_at,
    tdc_step,
)
from .bounds import (
    BlockwisePlan,
    ConstantsTable,
    ViolationReport,
    blockwise_plan,
    c7_constant,
    check_boundedness,
    envelope_h,
    eta_lower_bound,
    helper_split,
    lemma_constants,
    mixing_time,
    stacked_system,
    theorem2_constants,
    with_stacked,
    with_theorem2,
)
from .harness import (
    ExperimentConfig,
    RunSeries,
    fit_rate,
    preset,
    read_series,
    run_experiment,
    write_series,
)

__version__ = "0.1.0"
