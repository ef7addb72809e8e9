"""
Tableau provers, Hilbert translation and cut elimination for justification logics.
"""

from .errors import JTableauError
from .logics import build_cs, load_cs, parse_logic
from .search import Open, Proved, Unknown, prove
from .syntax import parse_formula, parse_term, print_formula, print_term

__version__ = "0.1.0"

__all__ = [
    "JTableauError",
    "Open",
    "Proved",
    "Unknown",
    "build_cs",
    "load_cs",
    "parse_formula",
    "parse_logic",
    "parse_term",
    "print_formula",
    "print_term",
    "prove",
]
