"""Figure rendering for learning-experiment CSV outputs.

Standalone package: it consumes only the documented CSV files (exact
header, ``learn_<kind>_mu_<mu>.csv`` naming) and never imports the
simulator.
"""

__version__ = "0.1.0"

from .render import FigureSpec, LEARNING_CSV_HEADER, load_learning_csv, render

__all__ = ["FigureSpec", "LEARNING_CSV_HEADER", "load_learning_csv", "render"]
