"""Method-of-moments workbench for coax-fed monopoles on parametric ground planes."""

__version__ = "0.1.0"
