"""Exact symbolic toolkit for the Hopf algebroid of transverse frame-bundle symmetries."""

__version__ = "0.1.0"
