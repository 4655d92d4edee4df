"""Figure rendering for the spin-entanglement sweep CSV outputs."""

__version__ = "0.1.0"

from .csvio import FigureDataError, read_histogram_csv, read_sweep_csv
from .figures import FIGURE_IDS, FigureSpec, render

__all__ = [
    "FIGURE_IDS",
    "FigureDataError",
    "FigureSpec",
    "read_histogram_csv",
    "read_sweep_csv",
    "render",
]
