# coding: utf-8
"""Gaussian mixture particle filter for one-dimensional nonlinear filtering."""

try:
    from .version import __version__
except ImportError:
    # not built through setup.py
    __version__ = "0.1.0"
