"""Numerical symplectic Lefschetz fibrations f_H(x) = <H, x> on adjoint orbits of sl(n, C)."""

from .algebra import DEFAULT_FORM, CartanElement, FormConfig, Root, cartan
from .errors import (
    FlowAborted,
    InputError,
    NotTangentError,
    OrbitfibError,
    SegmentTooCloseError,
    SingularPointError,
)
from .fibration import (
    FibrationAnalysis,
    OrbitPoint,
    analyze_fibration,
    critical_points,
    hessian_certificate,
    sample_orbit_point,
)
from .report import AnalysisRequest, analyze, build_report
from .transport import FlowConfig, flow, transport_fibre, z_field
from .weyl import critical_values, weyl_orbit

__version__ = "0.1.0"
