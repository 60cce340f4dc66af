"""Boundary Peeling and Ensemble Boundary Peeling outlier detection."""

from bpeel.dataset import DataMatrix, LabeledDataset, standardize, validate
from bpeel.ensemble import EnsembleParams, ebp_detect
from bpeel.kernel import KernelParams, cross_kernel, gaussian_kernel, kernel_matrix
from bpeel.ocsvm import OcsvmModel, OcsvmParams, decision_scores, fit, support_indices
from bpeel.peel import (
    DetectionResult,
    PeelParams,
    PeelTrace,
    boundary_peel,
    bp_detect,
    kds_scores,
    tukey_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "DataMatrix",
    "DetectionResult",
    "EnsembleParams",
    "KernelParams",
    "LabeledDataset",
    "OcsvmModel",
    "OcsvmParams",
    "PeelParams",
    "PeelTrace",
    "boundary_peel",
    "bp_detect",
    "cross_kernel",
    "decision_scores",
    "ebp_detect",
    "fit",
    "gaussian_kernel",
    "kds_scores",
    "kernel_matrix",
    "standardize",
    "support_indices",
    "tukey_threshold",
    "validate",
]
