"""Pulse construction and simulation toolkit for a vegetation-toxicity model."""

from .errors import (
    BlockedFlowError,
    ConditionViolated,
    ConfigError,
    ConvergenceError,
    DivergentIntegralError,
    DomainError,
    FoldCrossedError,
    IntervalTooShortError,
    NoConnectionError,
    PlotDataError,
    StructuralError,
    TrackingError,
)
from .model import (
    ModelParams,
    RegimeLabel,
    StateTW,
    TWParams,
    classify_regime,
    derive_tw_params,
    load_config,
    params_from_config,
    pde_rhs,
    tw_rhs_fast,
    tw_rhs_slow,
    uniform_steady_states,
)
from .cubics import (
    CubicRootSet,
    cubic_s_case_ii,
    cubic_v_case_ii,
    cubic_v_roots,
    real_cubic_roots,
)
from .layer import (
    DIRECTIONS,
    HeteroclinicJump,
    MelnikovTriple,
    heteroclinic,
    jump_speed,
    melnikov,
    v_pm,
)
from .casei import (
    noplateau_flow_blocked,
    plateau_arc,
    s2_of_u,
    solve_plateau_case_i,
    solve_sstar_noplateau,
    upper_branch_s_flow,
    v2_of_u,
)
from .caseii import (
    case_ii_n1_curve,
    case_ii_u0_pm,
    case_ii_u1_plus,
    case_ii_u_star,
    case_ii_V_plus,
    solve_matching_case_ii,
)
from .report import (
    ExistenceReport,
    NoPlateauVerdict,
    PlateauVerdict,
    SlowToxicityVerdict,
    existence_report,
)
from .skeleton import (
    SKELETON_CASES,
    Segment,
    SingularSkeleton,
    build_skeleton,
    manifold_residuals,
)
from .bvp import (
    BranchPoint,
    ContinuationBranch,
    ContinuationSpec,
    OriginLinearization,
    SeedProfile,
    TravellingWaveSolution,
    continue_branch,
    linearize_at_origin,
    plateau_width,
    refine_at_delta,
    seed_from_skeleton,
    solve_profile,
)

__version__ = "0.1.0"
