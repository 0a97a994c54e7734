"""First-hitting-time survival regression.

Thin Python surface over the C++ core: inverse Gaussian hitting-time law,
seeded process samplers, censored maximum-likelihood fitting, survival
prediction, Kaplan-Meier curves, and composite running time.
"""

from ._fhtreg import (
    composite_running_time,
    fit,
    ig_cdf,
    ig_log_survival,
    ig_pdf,
    ig_sample,
    kaplan_meier,
    loglik,
    predict_survival,
    prob_finite_fht,
    sample_wiener_fht,
)

__all__ = [
    "composite_running_time",
    "fit",
    "ig_cdf",
    "ig_log_survival",
    "ig_pdf",
    "ig_sample",
    "kaplan_meier",
    "loglik",
    "predict_survival",
    "prob_finite_fht",
    "sample_wiener_fht",
]

__version__ = "1.0.0"
