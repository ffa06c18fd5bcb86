"""Mertens sums, zeta residues and explicit-formula audits for quadratic
fields and for curves and varieties over finite fields."""

__version__ = "0.1.0"
