"""
Default bounds and logging setup.

Every default can be overridden through an environment variable read at
import time.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Final


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


SIZE_FACTOR: Final = _env_int("JTAB_SIZE_FACTOR", 3)
MAX_NODES: Final = _env_int("JTAB_MAX_NODES", 4000)
MAX_DEPTH: Final = _env_int("JTAB_MAX_DEPTH", 400)
INSTANTIATION_BOUND: Final = _env_int("JTAB_INSTANTIATION_BOUND", 40)
MAX_TAUT_ATOMS: Final = _env_int("JTAB_MAX_TAUT_ATOMS", 16)
CUTELIM_MAX_STEPS: Final = _env_int("JTAB_CUTELIM_MAX_STEPS", 20000)
EVIDENCE_CLOSURE_CAP: Final = _env_int("JTAB_EVIDENCE_CLOSURE_CAP", 5000)
# default for `subformulas` listings: root size plus this many nodes
LISTING_SLACK: Final = _env_int("JTAB_LISTING_SLACK", 4)
LOG_LEVEL: Final = os.environ.get("JTAB_LOG_LEVEL", "WARNING").upper()

RESULTS_LOG: Final = "proof_log.csv"
SUMMARY_FILE: Final = "proof_summary.csv"

LOG_FORMAT: Final = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class Budget:
    """Search limits shared by both provers."""

    max_nodes: int = MAX_NODES
    max_depth: int = MAX_DEPTH
    instantiation_bound: int = INSTANTIATION_BOUND
    size_factor: int = SIZE_FACTOR

    def __post_init__(self):
        for name in ("max_nodes", "max_depth", "instantiation_bound", "size_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_env(cls) -> Budget:
        return cls(
            max_nodes=_env_int("JTAB_MAX_NODES", MAX_NODES),
            max_depth=_env_int("JTAB_MAX_DEPTH", MAX_DEPTH),
            instantiation_bound=_env_int("JTAB_INSTANTIATION_BOUND", INSTANTIATION_BOUND),
            size_factor=_env_int("JTAB_SIZE_FACTOR", SIZE_FACTOR),
        )

    def size_bound(self, root_size: int) -> int:
        return self.size_factor * root_size


def setup_logging(level: str | int = LOG_LEVEL) -> None:
    """Configure one stream handler on the package logger."""
    logger = logging.getLogger("jtableau")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
