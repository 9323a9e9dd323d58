"""Level decomposition of a fixed-weight sector of Boolean inputs.

For a set of rows of ``X`` that all have the same Hamming weight ``w`` on a
set of free coordinates, ``psi_J`` is the normalised uniform superposition
of the rows with ``x_J = 1``. ``T_j`` is spanned by the ``psi_J`` with
``|J| = j``; ``S_j = T_j`` minus ``T_{j-1}``. Vectors are kept at full
length ``|X|`` so different sectors can be combined directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..linalg import orthonormalize

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Level:
    j: int
    subsets: tuple  # lexicographic J, as tuples of 0-based coordinates
    psi: np.ndarray  # (|X|, m) raw states
    tilde_norms: np.ndarray  # (m,)
    ddot: np.ndarray  # (|X|, m) normalised tilde states; zero columns where the tilde vanished
    S: np.ndarray  # orthonormal basis of S_j
    T: np.ndarray  # orthonormal basis of T_j

    @property
    def dim(self):
        return self.S.shape[1]

    @property
    def present(self):
        return self.dim > 0

    def column(self, J):
        return self.subsets.index(tuple(J))


@dataclass(frozen=True)
class Sector:
    rows: np.ndarray  # indices into X
    coords: tuple  # free coordinates (0-based)
    weight: int  # Hamming weight on the free coordinates
    levels: tuple

    def level(self, j):
        if 0 <= j < len(self.levels):
            return self.levels[j]
        return None

    def has_level(self, j):
        lv = self.level(j)
        return lv is not None and lv.present


def build_sector(digits, rows, coords, max_level) -> Sector:
    """Compute levels ``0..max_level`` of the sector given by ``rows``."""
    rows = np.asarray(rows, dtype=int)
    dim = digits.shape[0]
    coords = tuple(coords)
    sub = digits[np.ix_(rows, coords)] if len(rows) else np.zeros((0, len(coords)), dtype=int)
    weights = set(sub.sum(axis=1).tolist())
    if len(weights) > 1:
        raise ValueError("sector rows must share one Hamming weight")
    weight = weights.pop() if weights else 0
    levels = []
    prev_T = np.zeros((dim, 0), dtype=complex)
    for j in range(max_level + 1):
        subsets = tuple(itertools.combinations(range(len(coords)), j))
        psi = np.zeros((dim, len(subsets)), dtype=complex)
        for k, J in enumerate(subsets):
            mask = np.all(sub[:, list(J)] == 1, axis=1) if J else np.ones(len(rows), dtype=bool)
            cnt = int(mask.sum())
            if cnt:
                psi[rows[mask], k] = 1 / np.sqrt(cnt)
        tilde = psi - prev_T @ (prev_T.conj().T @ psi)
        norms = np.linalg.norm(tilde, axis=0)
        ddot = np.where(norms > RANK_TOL, tilde / np.where(norms > RANK_TOL, norms, 1.0), 0.0)
        S = orthonormalize(list(ddot.T), RANK_TOL).basis if subsets else np.zeros((dim, 0))
        T = np.column_stack([prev_T, S]) if S.shape[1] else prev_T
        mapped = tuple(tuple(coords[c] for c in J) for J in subsets)
        levels.append(Level(j, mapped, psi, norms, ddot, S, T))
        prev_T = T
    return Sector(rows, coords, weight, tuple(levels))


def falling(a, j):
    """Falling factorial ``a (a-1) ... (a-j+1)``."""
    out = 1
    for k in range(j):
        out *= a - k
    return out
