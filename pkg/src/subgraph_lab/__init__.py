"""Desk-scale laboratory for node-based subgraph GNNs.

Subpackages cover graph plumbing and counting oracles, subgraph selection
policies, the rank-3 orbit-tensor computational model, a minimal reverse-mode
autodiff engine, the equivariant layer families with their constructive
transpilers, Weisfeiler-Leman oracles and the experiment CLI.
"""

__version__ = "0.1.0"
