"""Existential fixed point logic: syntax, model checking and a self-hosted truth predicate."""

__version__ = "0.1.0"

from .evaluator import Evaluator, evaluate, lfp, lfp_oracle, stage_report
from .meta import MetaStructure, QuoteContext, build_meta_structure, encode, quote, unquote
from .metacheck import DepthInsufficient, MetaCheckReport, depth_stability, meta_check
from .parser import (ParseError, parse_formula, parse_program, parse_structure,
                     parse_vocabulary, print_formula, print_program)
from .satgen import SatLimits, generate_sat_program
from .structure import Assignment, Homomorphism, Structure, check_homomorphism
from .syntax import Vocabulary, free_vars, to_prenex, validate

__all__ = [
    "Assignment", "DepthInsufficient", "Evaluator", "Homomorphism", "MetaCheckReport",
    "MetaStructure", "ParseError", "QuoteContext", "SatLimits", "Structure", "Vocabulary",
    "build_meta_structure", "check_homomorphism", "depth_stability", "encode", "evaluate",
    "free_vars", "generate_sat_program", "lfp", "lfp_oracle", "meta_check", "parse_formula",
    "parse_program", "parse_structure", "parse_vocabulary", "print_formula", "print_program",
    "quote", "stage_report", "to_prenex", "unquote", "validate",
]
