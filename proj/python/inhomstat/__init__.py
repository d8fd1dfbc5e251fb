"""Inhomogeneous spatial point pattern statistics."""

from ._core import (
    EdgeCorrection,
    Error,
    IntensitySurface,
    McOptions,
    McOutcome,
    RectWindow,
    SummaryFunction,
    TestResult,
    cvl_bandwidth,
    cvl_scores,
    default_bandwidth_candidates,
    deviation_test,
    erode,
    goodness_of_fit_test,
    j_cross_inhom,
    j_inhom,
    k_cross_inhom,
    k_inhom,
    kernel_intensity,
    lotwick_silverman_test,
    pointwise_envelopes,
    random_pairing,
    rank_p_value,
    sample_homogeneous_poisson,
    sample_inhom_poisson,
    sample_thomas,
    torus_shift,
    translation_weight,
)

__all__ = [
    "EdgeCorrection",
    "Error",
    "IntensitySurface",
    "McOptions",
    "McOutcome",
    "RectWindow",
    "SummaryFunction",
    "TestResult",
    "cvl_bandwidth",
    "cvl_scores",
    "default_bandwidth_candidates",
    "deviation_test",
    "erode",
    "goodness_of_fit_test",
    "j_cross_inhom",
    "j_inhom",
    "k_cross_inhom",
    "k_inhom",
    "kernel_intensity",
    "lotwick_silverman_test",
    "pointwise_envelopes",
    "random_pairing",
    "rank_p_value",
    "sample_homogeneous_poisson",
    "sample_inhom_poisson",
    "sample_thomas",
    "torus_shift",
    "translation_weight",
]
