"""Analytic distribution theory and simulation for a unit-speed telegraph
process on the half-line with an elastic boundary at the origin.

The process rises during exponential up phases (rate ``lam``) and falls
during exponential down phases (rate ``mu < lam``); each boundary visit
either absorbs the path (probability ``alpha``) or reflects it upward.
The package provides the first-passage and lifetime densities, their
moment generating functions and moments, the within-cycle conditional
position law, verified numerical quadrature, and a reproducible Monte
Carlo engine, plus a CLI (``elastic-telegraph``) that tabulates curves
and runs the self-check suite.
"""

from .errors import ConvergenceError, DomainError, RunawayError
from .specfun import (
    DEFAULT_CONTROL,
    SeriesControl,
    bessel_i,
    hyper_0f1,
    hyper_1f2,
    hyper_2f1,
)
from .analytic import (
    CyclePoint,
    MeanVar,
    MgfDomain,
    ModelParams,
    closed_mean_var,
    cond_atom,
    cond_cdf_within_cycle,
    cond_pdf_within_cycle,
    cycle_point,
    g0_subdensity,
    geometric_pmf,
    gx_subdensity,
    h_density,
    joint_subdist,
    mgf_a0,
    mgf_ax,
    mgf_c0,
    mgf_cx,
    mgf_domain,
    mgf_tx,
    moment_a0,
    moment_ax,
    moment_c0,
    moment_cx,
    pdf_a0,
    pdf_c0,
    pdf_c0_lambda_scaled,
    pdf_cx,
    psi0,
    psi_x_integral,
    psi_x_series,
)
from .numeric import (
    QuadResult,
    cdf_derivative,
    integrate,
    ks_statistic,
    numeric_mgf,
    numeric_moment,
)
from .sim import (
    AbsorptionRecord,
    PathTrace,
    RngSpec,
    SampleStats,
    WithinCycleSample,
    sample_many,
    sample_paths,
    sample_within_cycle,
    simulate_absorption,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "RunawayError",
    "DEFAULT_CONTROL",
    "SeriesControl",
    "bessel_i",
    "hyper_0f1",
    "hyper_1f2",
    "hyper_2f1",
    "CyclePoint",
    "MeanVar",
    "MgfDomain",
    "ModelParams",
    "closed_mean_var",
    "cond_atom",
    "cond_cdf_within_cycle",
    "cond_pdf_within_cycle",
    "cycle_point",
    "g0_subdensity",
    "geometric_pmf",
    "gx_subdensity",
    "h_density",
    "joint_subdist",
    "mgf_a0",
    "mgf_ax",
    "mgf_c0",
    "mgf_cx",
    "mgf_domain",
    "mgf_tx",
    "moment_a0",
    "moment_ax",
    "moment_c0",
    "moment_cx",
    "pdf_a0",
    "pdf_c0",
    "pdf_c0_lambda_scaled",
    "pdf_cx",
    "psi0",
    "psi_x_integral",
    "psi_x_series",
    "QuadResult",
    "cdf_derivative",
    "integrate",
    "ks_statistic",
    "numeric_mgf",
    "numeric_moment",
    "AbsorptionRecord",
    "PathTrace",
    "RngSpec",
    "SampleStats",
    "WithinCycleSample",
    "sample_many",
    "sample_paths",
    "sample_within_cycle",
    "simulate_absorption",
    "__version__",
]
