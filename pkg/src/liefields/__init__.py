"""Lie algebras of vector fields: exact brackets, joint invariants, flows,
isotropy, complete systems, mobility and monodromy checks."""

from . import algebra, algfile, catalog, exactla, expr, fields, flows, invariants, mobility
from .algebra import LieAlgebraPresentation, StructureConstants, presentation
from .expr import Expr, Zeroness, parse_expression
from .fields import Point, VectorField, parse_field

__version__ = "0.1.0"

__all__ = [
    "algebra", "algfile", "catalog", "exactla", "expr", "fields", "flows",
    "invariants", "mobility",
    "Expr", "Zeroness", "parse_expression",
    "Point", "VectorField", "parse_field",
    "LieAlgebraPresentation", "StructureConstants", "presentation",
    "__version__",
]
