"""Nuclear-rank sketching: approximate matrix multiplication and data-driven embeddings."""

from .datagen import SpectrumSpec, gen_gaussian, gen_near_line, gen_spectrum
from .diagnostics import (
    BucketDecomposition,
    DiagnosticReport,
    bucket_horizon,
    bucket_matrices,
    bucketize,
    verify_proof_invariants,
)
from .embedding import (
    DistortionReport,
    EmbeddingResult,
    build_embedding,
    check_embedding,
    max_distortion,
)
from .errors import CalibrationError, InputError, NucSketchError, ParameterError
from .linalg import (
    SpectralSummary,
    SvdFactors,
    frobenius_norm,
    nuclear_norm,
    spectral_norm,
    summarize,
    svd,
    truncate_rank,
)
from .sketch import (
    GaussianSketch,
    SketchConfig,
    SketchPlan,
    approx_mm,
    gen_sketch,
    mm_error,
    plan_jl,
    plan_nuclear,
    plan_stable,
    sketch_factors,
)
from .verify import (
    CalibrationResult,
    DatasetFamily,
    McReport,
    SweepTable,
    calibrate,
    calibrate_cmult,
    mc_family_failure_rate,
    mc_gaussian_tail,
    mc_mm_failure_rate,
    min_dimension_for_distortion,
    sweep_error_vs_t,
)

__version__ = "0.1.0"
