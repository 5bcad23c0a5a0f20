"""Multiple operator integrals on finite spectra.

Finite projection-valued measures, separated-variable decompositions of
symbols, two evaluation engines for multiple operator integrals, Schatten and
block-trace norms, divided-difference calculus for matrix functions, and a
seeded property-suite harness.
"""

from .calculus import (
    ScalarFunction,
    dd_table,
    divided_difference,
    finite_difference,
    frechet_derivative,
    matrix_function,
)
from .decomp import (
    IPD,
    DiscreteMeasure,
    IntegralProjectiveDecomposition,
    ipd_constant,
    ipd_exp_dd,
    ipd_from_table,
    ipd_monomial_dd,
    ipd_norm_bound,
    ipd_pad,
    ipd_product,
    ipd_reconstruct,
    ipd_residual,
    ipd_sum,
)
from .errors import MOIError
from .moi import (
    EstimateReport,
    MOIProblem,
    moi_compose_inner,
    moi_compose_outer,
    moi_ipd,
    moi_lp_check,
    moi_schatten_check,
    moi_spectral,
    trace_pairing,
)
from .numkit import (
    SpectralResolution,
    TraceFunctional,
    eig_hermitian,
    frame_sum,
    jacobi_eigh,
    lp_norm,
    schatten_norm,
)
from .pavlov import (
    Superoperator,
    VectorMeasureS2,
    bs_superoperator,
    pavlov_build,
    pavlov_integrate,
    semivariation_bounds,
)
from .pvm import FinitePVM, pvm_from_spectral, pvm_integrate, pvm_linf_norm, pvm_tensor
from .rng import SplitMix64
from .verify import SuiteReport, run_suite

__version__ = "0.1.0"
