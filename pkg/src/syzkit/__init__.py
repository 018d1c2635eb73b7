"""syzkit: exact exterior calculus for semi-flat torus-fibration dualities."""

from .coeffring import GaussianRational, I, ONE, Poly, PolyRatio, ZERO
from .exterior import (
    Form,
    FrameMismatch,
    FrameSpec,
    GenClass,
    Generator,
    NonTriangularFrame,
    frame_collect,
    frame_expand,
    koszul_sign,
    substitute_generators,
)
from .calculus import (
    BasisChangeError,
    ComplexBasis,
    MissingPairing,
    SymplecticData,
    d_lambda,
    dolbeault,
    dual_lefschetz,
    exterior_d,
    lefschetz,
    polarization_switch,
    polarization_unswitch,
)
from .fourier import IntertwiningReport, SemiflatPair, sign_of_concatenation
from .sustruct import (
    ConformalFactor,
    FluxCurrent,
    Polarization,
    SUStructure,
    check_deformation_class,
    check_hermitian_at,
    check_iia,
    check_iib,
    check_su,
    conformal_factor,
    flux_iia,
    flux_iib,
    mirror_transform,
    proportional_to,
)
from . import cohomology, linalg, nilmanifold

__all__ = [
    "GaussianRational", "I", "ONE", "ZERO", "Poly", "PolyRatio",
    "Form", "FrameSpec", "GenClass", "Generator",
    "FrameMismatch", "NonTriangularFrame",
    "frame_collect", "frame_expand", "koszul_sign", "substitute_generators",
    "BasisChangeError", "ComplexBasis", "MissingPairing", "SymplecticData",
    "d_lambda", "dolbeault", "dual_lefschetz", "exterior_d", "lefschetz",
    "polarization_switch", "polarization_unswitch",
    "IntertwiningReport", "SemiflatPair", "sign_of_concatenation",
    "ConformalFactor", "FluxCurrent", "Polarization", "SUStructure",
    "check_deformation_class", "check_hermitian_at", "check_iia", "check_iib",
    "check_su", "conformal_factor", "flux_iia", "flux_iib",
    "mirror_transform", "proportional_to",
    "cohomology", "linalg", "nilmanifold",
]
