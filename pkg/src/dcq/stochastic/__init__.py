"""
Random tolls and Monte Carlo experiments on X_n / n^s0.
"""

from .drivers import (
    BernoulliFamily,
    BoundedMean,
    CauchyStd,
    DriverSpec,
    DriverVariant,
    GeometricConvolution,
    ShiftedExponentialFamily,
    UniformFamily,
    driver_hypotheses,
    sample_toll,
    substream,
    variant_from_dict,
)

from .domination import (
    DominationCheck,
    check_domination,
    dkw_slack,
    exp_shift,
)

from .mgf import (
    KernelConstant,
    MgfBoundParams,
    calibrate_geometric,
    estimate_kernel_constant,
    log_mgf_upper_bound,
    mgf_upper_bound,
)

from .montecarlo import (
    CheckpointSummary,
    EmpiricalMgf,
    MonteCarloReport,
    SummabilityTrace,
    empirical_mgf,
    run_monte_carlo,
    summability_partial,
    worker_count,
)


__all__ = [
    # Drivers
    "BernoulliFamily",
    "BoundedMean",
    "CauchyStd",
    "DriverSpec",
    "DriverVariant",
    "GeometricConvolution",
    "ShiftedExponentialFamily",
    "UniformFamily",
    "driver_hypotheses",
    "sample_toll",
    "substream",
    "variant_from_dict",
    # Domination
    "DominationCheck",
    "check_domination",
    "dkw_slack",
    "exp_shift",
    # MGF bound
    "KernelConstant",
    "MgfBoundParams",
    "calibrate_geometric",
    "estimate_kernel_constant",
    "log_mgf_upper_bound",
    "mgf_upper_bound",
    # Monte Carlo
    "CheckpointSummary",
    "EmpiricalMgf",
    "MonteCarloReport",
    "SummabilityTrace",
    "empirical_mgf",
    "run_monte_carlo",
    "summability_partial",
    "worker_count",
]
