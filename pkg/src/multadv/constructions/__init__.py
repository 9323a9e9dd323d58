"""Explicit adversary matrices and their block structures."""

from .base import Construction
from .search import search_block_norm, search_blocks, search_gamma
from .tfold import tfold_block_eigs, tfold_blocks, tfold_eta_bound, tfold_gamma, tfold_subspaces
from .threshold import (
    or_block_eigs,
    or_gamma,
    threshold_block_matrices,
    threshold_blocks,
    threshold_gamma,
    threshold_hj,
    threshold_subspaces,
)
from ..exceptions import BadParameters

FAMILIES = ("search", "tfold", "threshold", "or")


def build(family, n, t=None, q=2.0) -> Construction:
    """Construction for a built-in family by name."""
    if family == "search":
        return search_gamma(n, q)
    if family == "or":
        return or_gamma(n, q)
    if t is None:
        raise BadParameters(f"{family} needs t")
    if family == "tfold":
        return tfold_gamma(n, t, q)
    if family == "threshold":
        return threshold_gamma(n, t, q)
    raise BadParameters(f"unknown family {family!r}; expected one of {FAMILIES}")


__all__ = [
    "Construction", "FAMILIES", "build",
    "search_gamma", "search_blocks", "search_block_norm",
    "tfold_subspaces", "tfold_gamma", "tfold_blocks", "tfold_block_eigs", "tfold_eta_bound",
    "threshold_subspaces", "threshold_gamma", "threshold_blocks", "threshold_block_matrices",
    "threshold_hj", "or_gamma", "or_block_eigs",
]
