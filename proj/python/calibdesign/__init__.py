"""Measurement-plan design for serial-manipulator geometric calibration."""

from ._core import (  # noqa: F401
    CampaignStats,
    ConvergenceError,
    DesignReport,
    IdentifiabilityError,
    InputError,
    KinematicModel,
    NumericalError,
    TwoLinkCase,
    cov_2r,
    covariance,
    decompose_plan,
    forward_position,
    identification_jacobian,
    identify,
    information_matrix,
    load_model,
    optimal_S,
    optimize_plan,
    rho0_2r,
    rho0_min,
    rho0_squared,
    run_campaign,
    serialize_model,
    two_link_model,
)

__all__ = [name for name in dir() if not name.startswith("_")]
