"""Exact intersection theory on Grassmannian towers, integral lattices and
alternating trivectors, with named reproducible computations."""

__version__ = "0.1.0"
