"""Symbolic and numeric workbench for the q,theta-deformed four-spheres."""

from .algebra import NCPoly, Presentation, confluence_probe, normalize, poly_add, poly_mul, star
from .chern import (
    Chain,
    MatrixPoly,
    chain_compare,
    connes_B,
    dennis_trace,
    hochschild_b,
    idempotent_report,
    mat_adjoint,
    mat_mul,
    projector_e,
    projector_eprime,
    term_count,
)
from .coeff import Scalar, scalar_conj, scalar_mul, scalar_specialize
from .errors import DomainError, NormalizationError, ParseError, UsageError
from .presets import (
    MorphismSpec,
    centrality_check,
    check_character,
    check_morphism,
    check_relations,
    preset,
)

__version__ = "0.1.0"
