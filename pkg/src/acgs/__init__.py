"""Model checker for alternating-time temporal logics over concurrent game
structures whose agents carry explicit ability annotations.

The top level re-exports the everyday surface: build or load a model,
parse a formula, call :func:`check` (or :func:`mc` for the raw state set),
and inspect errors. Backend internals stay in their modules:
``acgs.enumcheck`` for the strategy-enumeration path, ``acgs.gamecheck``
and ``acgs.paritygame`` for the parity-game path, ``acgs.ltl2dpa`` for the
automaton construction.
"""

from .acgsio import parse_model, parse_spec, read_model, write_model, write_spec
from .benchmarks import gen_bookstore, gen_castle, gen_dining, gen_figure1
from .engine import McStats, Verdict, check, mc, semantics_sigma
from .errors import (
    AcgsError,
    AlgorithmInapplicable,
    ParseError,
    StrategySpaceExceeded,
    UndecidableConfiguration,
)
from .formulas import format_path, format_state, parse_formula, parse_path_formula
from .model import ABILITIES, Cgs, coarser_than, group_relation, validate

__version__ = "0.1.0"

__all__ = [
    "ABILITIES",
    "AcgsError",
    "AlgorithmInapplicable",
    "Cgs",
    "McStats",
    "ParseError",
    "StrategySpaceExceeded",
    "UndecidableConfiguration",
    "Verdict",
    "check",
    "coarser_than",
    "format_path",
    "format_state",
    "gen_bookstore",
    "gen_castle",
    "gen_dining",
    "gen_figure1",
    "group_relation",
    "mc",
    "parse_formula",
    "parse_model",
    "parse_path_formula",
    "parse_spec",
    "read_model",
    "semantics_sigma",
    "validate",
    "write_model",
    "write_spec",
]
