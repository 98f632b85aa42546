"""Uniform solver result record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .core import Exchange


@dataclass
class SolveResult:
    """Outcome of one solver run.

    ``feasible`` means ``value >= t`` for the instance that was solved.
    When ``exchange`` is present it is a verified certificate whose value
    equals ``value``.
    """

    feasible: bool
    value: int
    algorithm: str
    exchange: Exchange | None = None
    stats: dict[str, Any] = field(default_factory=dict)
