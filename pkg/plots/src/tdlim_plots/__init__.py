"""Figure rendering for tdlim CSV outputs."""

from .figures import (
    DEFAULT_EMBEDDING,
    FigureSpec,
    parse_embedding,
    plot_bifurcation,
    plot_phase,
    plot_reward,
)
from .io import MissingColumnError, TableFile, file_checksum, read_table

__all__ = [
    "DEFAULT_EMBEDDING",
    "FigureSpec",
    "MissingColumnError",
    "TableFile",
    "file_checksum",
    "parse_embedding",
    "plot_bifurcation",
    "plot_phase",
    "plot_reward",
    "read_table",
]

__version__ = "0.1.0"
