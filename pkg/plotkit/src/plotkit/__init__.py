"""Batch figure renderer for the channel simulator's CSV exports."""

from .figures import FigureSpec, load_spec, plot, render_spec_file

__version__ = "0.1.0"
