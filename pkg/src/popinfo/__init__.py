"""Closed-form approximations and bounds of mutual information for Poisson population codes."""

__version__ = "0.1.0"

from .divergence import (
    DivergenceMatrix,
    bhattacharyya_matrix,
    brute_force_divergence,
    chernoff_coefficient_matrix,
    chernoff_information,
    hellinger_sq,
    kl_matrix,
)
from .errors import (
    ConfigurationError,
    InstanceTooLargeError,
    PopinfoError,
    SingularityError,
    UndefinedRelativeError,
)
from .metrics import (
    MetricReport,
    NeighborSets,
    compute_metrics,
    h_c_bound,
    i_beta_alpha,
    i_beta_alpha_d,
    i_D,
    i_D0,
    i_d,
    i_e,
    i_u,
    i_u_d,
    neighbor_sets,
)
from .montecarlo import McConfig, McEstimate, estimate, exact_mi, relative_error, sample_information_terms
from .stimulus import (
    PoissonPopulation,
    StimulusSpace,
    build_heaviside_population,
    build_random_binary_population,
    build_relu_population,
    entropy,
    make_prior,
    population_from_rates,
    to_bits,
)
