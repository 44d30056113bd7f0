"""Decision procedures for three-level quantified syllogistic with
restricted quantifiers, its bounded-prefix subfragment, and the modal
logic S5 via a set-theoretic translation."""

from .decider import SAT, UNKNOWN, UNSAT, Verdict, decide_sat, decide_sat_h
from .encodings import EncodingRequest, encode
from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, FormulaError, Iff, Implies, Not, Or,
    ParseError, QAtom1, QAtom2, Variable, parse, parse_document, render, render_document,
)
from .hfragment import ShapeError, flatten_h, recognize_h
from .normalizer import NormalizedConjunction, ResourceLimitError, normalize
from .relativizer import RelConfig, bound, build_d_star, distinguish, relativize
from .restriction import RestrictionError, is_3lqsr
from .s5 import decide_s5, is_valid, parse_modal, s5_oracle, translate_s5
from .semantics import Interpretation, evaluate

__version__ = "0.1.0"

__all__ = [
    "SAT", "UNSAT", "UNKNOWN", "Verdict", "decide_sat", "decide_sat_h", "EncodingRequest", "encode",
    "Atom0Eq", "Atom0Mem", "Atom1Eq", "Atom1Mem", "And", "Formula", "FormulaError", "Iff",
    "Implies", "Not", "Or", "ParseError", "QAtom1", "QAtom2", "Variable", "parse",
    "parse_document", "render", "render_document", "ShapeError", "flatten_h", "recognize_h",
    "NormalizedConjunction", "ResourceLimitError", "normalize", "RelConfig", "bound",
    "build_d_star", "distinguish", "relativize", "RestrictionError", "is_3lqsr", "decide_s5",
    "is_valid", "parse_modal", "s5_oracle", "translate_s5", "Interpretation", "evaluate",
]
