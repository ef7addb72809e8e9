"""
Exception hierarchy for the justification-logic tableau toolkit.

Verifiers return report values; constructors and transformers raise one of
these.
"""

from __future__ import annotations


class JTableauError(Exception):
    """Base class for every error raised by the toolkit."""


class ParseError(JTableauError):
    """Formula, term or file text that does not fit the grammar."""

    def __init__(self, message: str, line: int = 0, column: int = 0, text: str = ""):
        self.line = line
        self.column = column
        self.text = text
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class InadmissibleOperation(JTableauError):
    """A term operation the active logic does not admit (e.g. `!` in J)."""


class InvalidConstantSpec(JTableauError):
    """A constant specification that failed validation."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "; ".join(f"{entry}: {reason}" for entry, reason in self.violations)
        super().__init__(f"invalid constant specification: {lines}")


class OutOfUniverse(JTableauError):
    """Forcing was asked about a formula outside the model's universe."""


class RuleError(JTableauError):
    """An inadmissible rule application."""

    def __init__(self, message: str, node_id: int | None = None):
        self.node_id = node_id
        prefix = f"node {node_id}: " if node_id is not None else ""
        super().__init__(prefix + message)


class ExtractionFailed(JTableauError):
    """A countermodel built from an open branch did not validate."""


class HilbertDefect(JTableauError):
    """A Hilbert proof line that is not justified."""

    def __init__(self, message: str, line_no: int = 0):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if line_no else message)


class CutEliminationError(JTableauError):
    """A rewrite step failed or broke its measure claim."""

    def __init__(self, message: str, site: int | None = None, case: str = ""):
        self.site = site
        self.case = case
        details = ", ".join(p for p in (f"site {site}" if site is not None else "", case) if p)
        super().__init__(f"{message} ({details})" if details else message)


class UnimplementedCase(CutEliminationError):
    """No rewrite is known for the rule pairing found at a cut."""
