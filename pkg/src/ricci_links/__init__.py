"""Positively curved links, cutoff warps and rotationally symmetric Ricci solitons."""

from .balls import VolumeScale, volume_scale
from .cutoff import eval_cutoff, ratio_sup, weighted_derivative_ratio
from .geometry import (BoundaryData, DoublyWarpedMetric, Profile, curvature_spectrum,
                       min_curvature, validate_ideal_boundary)
from .links import build_link, collapse_diagnostic, volume_normalization
from .shooting import (ShootingResult, asymptotic_volume_ratio, avr_inequality_check,
                       blowup_extract, solve_expander)
from .soliton import IdentityReport, RotSolitonProfile, SolitonKind, check_identities, integrate_soliton
from .warp import eval_warp, select_delta, verify_warp_properties

__version__ = "0.1.0"
