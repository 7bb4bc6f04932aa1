"""Graph-signal denoising with untrained graph generator networks.

The library fits a graph-convolutional generator or a graph-upsampling
decoder to a single noisy observation and stops early, so the structured
part of the signal is captured before the noise. A spectral toolkit exposes
the expected squared Jacobian whose eigenspace explains that behavior, and
an experiment harness reproduces the synthetic studies.
"""

from .baselines import bl_denoise, laplacian, lr_denoise, med_denoise, tv_denoise
from .coarsening import (
    CoarseningHierarchy,
    Dendrogram,
    build_dendrogram,
    build_hierarchy,
    coarse_adjacency,
    cut_dendrogram,
    cut_hierarchy,
    default_layer_sizes,
    membership_matrix,
    save_hierarchy,
    upsampling_operator,
)
from .errors import (
    ConfigError,
    DataFormatError,
    DisconnectedAfterRetriesError,
    GpdError,
    IsolatedClusterError,
    IsolatedNodeError,
    NonFiniteLossError,
    NotSymmetricError,
    SolverConvergenceError,
    ZeroRowError,
    ZeroSignalError,
)
from .graphs import (
    Graph,
    SbmModel,
    Spectrum,
    gft,
    graph_filter,
    inverse_gft,
    is_connected,
    normalize_adjacency,
    sample_graph,
    sample_sbm,
    spectral_decomposition,
)
from .io import load_edge_list, load_signals, write_csv
from .models import (
    FitConfig,
    FitTrajectory,
    GeneratorModel,
    fit,
    forward,
    init_model,
    load_checkpoint,
    loss_and_gradient,
    mixing_vector,
    output_jacobian,
    save_checkpoint,
)
from .signals import (
    NoiseSpec,
    add_noise,
    bandlimited_signal,
    diffused_white_signal,
    error_rate,
    graph_median,
    nmse,
    piecewise_constant_signal,
    random_lowpass_coeffs,
    random_signal,
)
from .spectral import (
    BoundInputs,
    BoundTerms,
    SquaredJacobian,
    WidthRequirement,
    eigenvector_similarity,
    expected_sq_jacobian_gcg,
    expected_sq_jacobian_gdec,
    fit_error_bound,
    monte_carlo_deep_jacobian,
    monte_carlo_sq_jacobian,
    procrustes_align,
    two_layer_factory,
    width_requirement,
)

__version__ = "0.1.0"
