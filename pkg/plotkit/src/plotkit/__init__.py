"""Figures from seqshield result CSVs."""

__version__ = "0.1.0"

from .figures import (
    CaseStats,
    FigureSpec,
    KINDS,
    MissingColumnError,
    case_stats,
    read_rows,
    render,
    sweep_stats,
)

__all__ = [
    "CaseStats",
    "FigureSpec",
    "KINDS",
    "MissingColumnError",
    "case_stats",
    "read_rows",
    "render",
    "sweep_stats",
]
