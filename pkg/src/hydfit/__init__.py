"""Fit the generalized three-component hydraulic performance model with island-model MOEA/D."""
from .config import ModelConfiguration, validate_config, g_max
from .ground_truth import AthleteParams, ExpenditureTargets, RecoveryRatioTable
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AthleteParams",
    "BACKEND",
    "ExpenditureTargets",
    "ModelConfiguration",
    "RecoveryRatioTable",
    "g_max",
    "validate_config",
]
