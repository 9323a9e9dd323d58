"""Unordered search: ``Gamma = (1 - q)|v><v| + q I`` and its 2x2 block."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np

from ..exceptions import BadParameters, DegenerateAdversaryWarning
from ..linalg import ProjectorSet, orthonormalize, relative_spectrum
from ..query import search
from .base import Construction


def search_gamma(n, q) -> Construction:
    """Adversary for ``search(n)`` with threshold ``lambda = q``."""
    if n < 2:
        raise BadParameters("search needs n >= 2")
    if q < 1:
        raise BadParameters("q must be >= 1")
    if q == 1:
        warnings.warn("q = 1 gives Gamma = I", DegenerateAdversaryWarning, stacklevel=2)
    spec = search(n)
    v = np.full(n, 1 / sqrt(n))
    gamma = (1 - q) * np.outer(v, v) + q * np.eye(n)
    return Construction("search", {"n": n, "q": q}, spec, gamma.astype(complex), float(q),
                        lambda i: search_blocks(n, i))


def search_vectors(n, i):
    """``v`` (uniform) and ``v_i`` in the lexicographic input order."""
    spec = search(n)
    pos = spec.digits.argmax(axis=1)  # 0-based position of the one
    v = np.full(n, 1 / sqrt(n))
    vi = np.where(pos == i - 1, 1 - n, 1.0) / sqrt(n * (n - 1))
    return v, vi


def search_blocks(n, i=1) -> ProjectorSet:
    """``{Pi_2, Pi_triv}`` with ``Pi_2 = |v><v| + |v_i><v_i|``."""
    v, vi = search_vectors(n, i)
    P2 = np.column_stack([v, vi]).astype(complex)
    others = [search_vectors(n, k)[1] for k in range(1, n + 1) if k != i]
    w = [u - P2 @ (P2.conj().T @ u) for u in others]
    triv = orthonormalize(w).basis
    return ProjectorSet.from_bases([P2, triv], ("block", "triv"))


def search_block_matrices(n, q):
    """``Gamma`` and ``O_1`` in the basis ``{v, v_1}``."""
    G = np.diag([1.0, q])
    b = 2 * sqrt(n - 1) / n
    O = np.array([[(n - 2) / n, b], [b, (2 - n) / n]])
    return G, O


@dataclass(frozen=True)
class SearchBlockNorm:
    n: int
    q: float
    exact: float
    numeric: float
    asymptotic: float
    trace: float

    @property
    def gap(self):
        return abs(self.exact - self.asymptotic)


def search_block_norm(n, q) -> SearchBlockNorm:
    """Largest eigenvalue of ``O_1 Gamma O_1 Gamma^{-1}`` on the 2-dim block.

    The product has determinant 1, so the closed form follows from the trace.
    """
    if n < 2:
        raise BadParameters("need n >= 2")
    a2 = ((n - 2) / n) ** 2
    b2 = 4 * (n - 1) / n ** 2
    tr = 2 * a2 + b2 * (q + 1 / q)
    exact = (tr + sqrt(max(tr * tr - 4, 0.0))) / 2
    G, O = search_block_matrices(n, q)
    numeric = float(relative_spectrum(O @ G @ O, G)[-1])
    asym = 1 + 2 * (q - 1) / sqrt(q * n)
    return SearchBlockNorm(n, q, exact, numeric, asym, tr)
