"""Exact desk-scale analysis of spectral independence for list colourings."""

__version__ = "0.1.0"

from .backend import BACKEND, USING_NUMBA
from .errors import (
    CapacityError,
    ContractError,
    InfeasibleError,
    InvalidPinningError,
    NotReversibleError,
    ParameterError,
    SpecmixError,
)
from .instance import (
    EMPTY_PINNING,
    ColouringState,
    Graph,
    ListColouringInstance,
    Pinning,
    cycle_instance,
    dump_instance,
    independent_instance,
    is_feasible,
    load_instance,
    path_instance,
    pin,
    preceq,
    random_triangle_free_instance,
    star_instance,
)
from .exact import (
    DistributionTable,
    InfluenceMatrix,
    MarginalVector,
    PSI_ZERO,
    R_INDICATOR,
    enumerate_distribution,
    gelfand_estimate,
    induced_norm,
    influence_matrix,
    marginal,
    marginal_recursion,
    power_iteration,
    spectral_radius,
    symmetric_eigenvalues,
    tv_distance,
)
from .localwalk import (
    CouplingMatrix,
    LazyWalk,
    LocalWalk,
    build_local_walk,
    coupling_matrix,
    lambda2,
    lazy,
    verify_local_chain,
)
from .glauber import (
    GlauberChain,
    MixingEstimate,
    SpectralIndependenceCertificate,
    SpectrumReport,
    certify_spectral_independence,
    colouring_mixing_bound,
    down_up_matrix,
    empirical_tv_curve,
    glauber_step,
    mixing_time_bound,
    new_chain,
    run_chain,
    spectrum_report,
    theoretical_gap_bound,
    transition_matrix,
)
from .bounds import (
    ColouringParams,
    alpha_star,
    check_eq2d,
    check_f_monotone,
    easy_coupling_bound,
    one_to_all_check,
    recursive_influence_bound,
    saw_influence_bound,
    single_disagreement_tv,
    star_tightness,
    verify_condition,
)
