"""tensormeans: Einstein-product tensor algebra, operator perspective means of
positive definite tensors, and seeded Monte Carlo verification of the
associated tail bounds and Loewner-order comparisons."""

from .tensor_core import (
    EinsteinTensor,
    Shape,
    ShapeMismatchError,
    SingularTensorError,
    TensorError,
    allclose,
    conjugate_transpose,
    einstein_product,
    fold,
    from_diagonal,
    frobenius_norm,
    identity,
    inner_product,
    inverse,
    is_hermitian,
    is_unitary,
    trace,
    unfold,
    zero,
)
from .spectral import (
    EigenSystem,
    NotHermitianError,
    OrderVerdict,
    Relation,
    SpectrumDomainError,
    abs_tensor,
    apply_function,
    eigen_decompose,
    is_pd,
    is_psd,
    lambda_max,
    lambda_min,
    loewner_compare,
    power,
)
from .connections import (
    ConnectionFunction,
    MeanResult,
    PowerMonotonicity,
    adjoint_function,
    arithmetic,
    classify_power_monotonicity,
    get_connection,
    harmonic,
    is_geodesically_convex,
    perspective_mean,
    power_connection,
    reciprocal_power,
    register_connection,
    square_connection,
    transform_swap,
)
from .bounds import (
    DyadicDecomposition,
    KantorovichPair,
    RatioExtremes,
    SandwichFactors,
    acute_prod,
    decompose_q,
    kantorovich,
    kantorovich_pair,
    psi_cap,
    psi_cap_product,
    ratio_spectrum,
    sandwich_factors,
    z_sequence,
)
from .sampling import (
    ENSEMBLES,
    NORMALIZATIONS,
    SamplerSpec,
    SeedStream,
    sample_loewner_chain,
    sample_pair_conditioned,
    sample_pd,
)
from . import verify

__version__ = "0.1.0"
