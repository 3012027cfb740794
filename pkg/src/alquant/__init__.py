"""QPTL satisfiability by knowledge compilation on alternating safety automata."""

from .automata import AlternatingAutomaton, LassoWord, State, is_empty, statewise_exists, statewise_forall
from .boolfun import Function, Manager
from .compiler import CompilationConfig, RunStats, compile_exists, compile_forall, eliminate_quantifier, solve_qptl
from .conflicts import conflicting_pairs, existential_conflicts, universal_conflicts
from .errors import (AlquantError, NonPrenexError, ParseError, ResourceLimit, UnsupportedFragment)
from .parser import parse_ltl, parse_qptl
from .textformat import read_automaton, to_dot, write_automaton
from .translate import translate_qptl, translate_to_asa

__version__ = "0.1.0"

__all__ = [
    "AlternatingAutomaton", "LassoWord", "State", "is_empty", "statewise_exists", "statewise_forall",
    "Function", "Manager",
    "CompilationConfig", "RunStats", "compile_exists", "compile_forall", "eliminate_quantifier", "solve_qptl",
    "conflicting_pairs", "existential_conflicts", "universal_conflicts",
    "AlquantError", "NonPrenexError", "ParseError", "ResourceLimit", "UnsupportedFragment",
    "parse_ltl", "parse_qptl", "read_automaton", "to_dot", "write_automaton",
    "translate_qptl", "translate_to_asa",
]
