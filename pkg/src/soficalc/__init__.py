"""Boolean state spaces, pairings and TQFT evaluations for sofic shifts and omega-automata."""

from .errors import (AlphabetError, BudgetError, ConstructionError, DeterminismError,
                     DiagramError, InputError, ParseError, ProjectivityError, RefusalError,
                     ShapeError, SoficalcError)
from .words import Alphabet, BiUP, CircWord, LeftUP, RightUP, normalize_up, parse_word

__all__ = [
    "AlphabetError", "BudgetError", "ConstructionError", "DeterminismError", "DiagramError",
    "InputError", "ParseError", "ProjectivityError", "RefusalError", "ShapeError",
    "SoficalcError", "Alphabet", "BiUP", "CircWord", "LeftUP", "RightUP", "normalize_up",
    "parse_word",
]
