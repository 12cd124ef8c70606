"""Noise-robustness analysis of two-player non-local games.

Compares how reliably the CHSH, 2-CHSH, magic-square and LP-optimized
2-CHSH games certify non-locality when their winning states pass through
a depolarizing channel, using exact binomial convincingness p-values,
noise-dependent gap polynomials, the gapped ranking score, noise
tolerances and significance crossings.
"""

from .games import (
    GameSpec,
    ScoreIntegrityError,
    ScoreOperator,
    builtin_game,
    chsh_game,
    msg_game,
    score,
    score_at_visibility,
    two_chsh_game,
    winning_state,
)
from .opt2chsh import (
    BellMatrix,
    OptConfig,
    SolverError,
    build_probability_matrix,
    enumerate_local_vertices,
    load_config,
    opt_local_bound,
    opt_score,
    save_config,
    solve_bell_lp,
    solve_config,
)
from .qmath import (
    DepolarizingChannel,
    DimensionError,
    InvalidStateError,
    apply_depolarizing,
    epr_state,
    kron,
    maximally_mixed,
    permute_qubits,
)
from .robustness import (
    ConvincingnessCurve,
    CrossingResult,
    DegenerateConfigurationError,
    GameModel,
    GapPolynomial,
    PredictorRow,
    analytic_models,
    asymptotic_bound,
    convincingness,
    convincingness_curve,
    convincingness_log,
    convincingness_mc,
    extract_gap_polynomial,
    gapped_score,
    hoeffding_bound,
    noise_tolerance,
    polynomial_difference,
    predictor_table,
    significance_crossing,
)

__version__ = "0.1.0"
