"""Exact distributions of sample sums drawn from a known discrete population."""
from ._kernels import BACKEND as KERNEL_BACKEND
from .convolution import (
    ConvolutionConfig,
    ConvolutionPower,
    PowerLadder,
    convolve,
    convolve_power,
    fft_convolve,
    subtract_convolve,
)
from .distribution import (
    Distribution,
    MomentSummary,
    bernoulli,
    from_mapping,
    from_pairs,
    linear_transform,
    moments,
    point_mass,
)
from .rarity import (
    PRPoint,
    RarityRecord,
    RarityResult,
    TagCountVector,
    build_compensation_dist,
    divergence_report,
    l_index,
    l_prime_index,
    pr_curve,
    score,
    score_records,
)
from .stats import (
    CltVerdict,
    FrequencyTable,
    clt_check,
    frequency_table,
    lower_tail,
    normal_upper_tail,
    strict_lower_tail,
    strict_upper_tail,
    upper_tail,
)

__version__ = "0.1.0"
