"""Exact computations with Novikov algebras, Gel'fand-Dorfman bialgebras and conformal algebras."""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"

from .scalars import GF, QQ, Field, FieldError, Scalar, binomial
from .algcore import (
    CheckReport, Element, FiniteCarrier, GDBialgebra, LawId, LinearMap, NovikovModule, Rule, Table, Verdict,
    evaluate_law, is_irreducible, is_simple, law_check,
)
from .affinize import check_loop_jacobi, loop_bracket
from .conformal import (
    ConformalStructure, apply_Y, build_R1, build_R2, check_conformal_axioms, cross_check_report, degree_of, from_gd,
)
from .fileio import parse_algebra_file, serialize

__all__ = [
    "GF", "QQ", "Field", "FieldError", "Scalar", "binomial",
    "CheckReport", "Element", "FiniteCarrier", "GDBialgebra", "LawId", "LinearMap", "NovikovModule", "Rule",
    "Table", "Verdict", "evaluate_law", "is_irreducible", "is_simple", "law_check",
    "check_loop_jacobi", "loop_bracket",
    "ConformalStructure", "apply_Y", "build_R1", "build_R2", "check_conformal_axioms", "cross_check_report",
    "degree_of", "from_gd", "parse_algebra_file", "serialize",
]
