"""Approximate subgraph search under the graphlet kernel."""

__version__ = "0.1.0"
