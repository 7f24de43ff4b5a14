"""
Genera, isometries and Hecke operators of definite lattices.

The submodules are independent of each other's import side effects; import
what you need, e.g. ``from moat.lattice.genus import genus_enumerate``.
"""
from __future__ import annotations
