"""Parabolic energy-estimate toolkit: 1-D theta-scheme solver, weighted
H^-1 estimate checker, sharpness benchmarks, and Picard solvers for
nonlocal problems. The heavy lifting lives in the compiled extension."""

from ._core import (
    CoefficientSet,
    EstimateReport,
    KSearchResult,
    Mesh1D,
    NonlocalSpec,
    ParamPack,
    ParestError,
    PicardResult,
    PicardTrace,
    ProbeResult,
    RatioPoint,
    SharpCase,
    SourceTerm,
    SweepRow,
    ThetaSchemeConfig,
    TimeGrid,
    check_inequality,
    closed_form_ratio,
    initial_time_ratio,
    lipschitz_probe,
    make_case,
    norm_h0,
    norm_h1,
    norm_hminus1,
    param_pack,
    search_K,
    sharpness_sweep,
    solve_ibvp,
    solve_nonlinear,
    time_integral,
    verify_nonlocal_estimate,
)

__all__ = [
    "CoefficientSet",
    "EstimateReport",
    "KSearchResult",
    "Mesh1D",
    "NonlocalSpec",
    "ParamPack",
    "ParestError",
    "PicardResult",
    "PicardTrace",
    "ProbeResult",
    "RatioPoint",
    "SharpCase",
    "SourceTerm",
    "SweepRow",
    "ThetaSchemeConfig",
    "TimeGrid",
    "check_inequality",
    "closed_form_ratio",
    "initial_time_ratio",
    "lipschitz_probe",
    "make_case",
    "norm_h0",
    "norm_h1",
    "norm_hminus1",
    "param_pack",
    "search_K",
    "sharpness_sweep",
    "solve_ibvp",
    "solve_nonlinear",
    "time_integral",
    "verify_nonlocal_estimate",
]

__version__ = "0.1.0"
