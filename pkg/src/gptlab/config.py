"""Global numeric tolerance, configurable per run."""

from __future__ import annotations

DEFAULT_TOL = 1e-9

_tol = DEFAULT_TOL


def get_tol() -> float:
    return _tol


def set_tol(value: float) -> None:
    """Set the run-wide membership/feasibility tolerance."""
    global _tol
    if not value > 0:
        raise ValueError("tolerance must be positive")
    _tol = float(value)


def resolve_tol(tol: float | None) -> float:
    """One knob for all membership and feasibility checks."""
    return _tol if tol is None else float(tol)
