"""Certified existential definitions of the valuation ring F_q[[t]] in F_q((t))."""

__version__ = "0.1.0"
