"""t-fold search: ``Gamma = sum_j q^j Pi_{S_j}`` with 2-dimensional query blocks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, e, sqrt

import numpy as np

from ..exceptions import BadParameters, TooLarge
from ..linalg import ProjectorSet, orthonormalize, relative_spectrum, spectral_norm
from ..multiplicative import bad_projector, eta
from ..query import tfold
from ._levels import Level, build_sector, falling
from .base import Construction

MAX_INPUTS = 5000


def _check(n, t):
    if not 1 <= t <= n / 2:
        raise BadParameters("t-fold search constructions need 1 <= t <= n/2")
    if comb(n, t) > MAX_INPUTS:
        raise TooLarge(f"C({n},{t}) = {comb(n, t)} inputs exceeds {MAX_INPUTS}")


@dataclass(frozen=True)
class SubspaceFamily:
    n: int
    t: int
    levels: tuple  # Level objects j = 0..t

    def projector(self, j):
        S = self.levels[j].S
        return S @ S.conj().T

    @property
    def dims(self):
        return tuple(lv.dim for lv in self.levels)

    @property
    def expected_dims(self):
        return tuple(comb(self.n, j) - (comb(self.n, j - 1) if j else 0) for j in range(self.t + 1))

    def residuals(self):
        """Orthogonality, completeness and nesting residuals of the ``S_j``."""
        dim = self.levels[0].S.shape[0]
        P = [self.projector(j) for j in range(self.t + 1)]
        ortho = max((spectral_norm(P[a] @ P[b]) for a in range(len(P)) for b in range(a + 1, len(P))),
                    default=0.0)
        complete = spectral_norm(sum(P) - np.eye(dim))
        nest = 0.0
        for j in range(1, self.t + 1):
            lo, hi = self.levels[j - 1].T, self.levels[j].T
            nest = max(nest, spectral_norm(lo - hi @ (hi.conj().T @ lo)))
        return {"orthogonality": ortho, "completeness": complete, "nesting": nest}


@lru_cache(maxsize=32)
def tfold_subspaces(n, t) -> SubspaceFamily:
    _check(n, t)
    spec = tfold(n, t)
    sector = build_sector(spec.digits, np.arange(spec.size), range(n), t)
    return SubspaceFamily(n, t, sector.levels)


def tilde_norm_formula(n, t, j, b):
    """``||tilde psi_J^b|| = sqrt((n-t+b-1)^(j) / (n-j)^(j))`` (falling factorials)."""
    return sqrt(falling(n - t + b - 1, j) / falling(n - j, j))


def tfold_gamma(n, t, q) -> Construction:
    """``Gamma = sum_j q^j Pi_{S_j}`` with ``lambda = q^{t/2}``."""
    if q < 1:
        raise BadParameters("q must be >= 1")
    fam = tfold_subspaces(n, t)
    gamma = sum(q ** j * fam.projector(j) for j in range(t + 1))
    return Construction("tfold", {"n": n, "t": t, "q": q}, tfold(n, t), gamma, float(q ** (t / 2)),
                        lambda i: tfold_blocks(n, t, i).projector_set)


@dataclass(frozen=True)
class BlockLevel:
    j: int
    alpha: float
    beta: float
    c: float  # ||M' phi|| for the unitary M_j = M' / c
    c_spread: float  # max - min of ||M' phi|| over the basis
    map_residual: float  # max_J ||M' ddot^0_J / c - ddot^1_J||
    tilde_norms: tuple  # (||tilde psi^0_J||, ||tilde psi^1_J||) for the first J
    tilde_formula: tuple
    tilde_formula_residual: float  # over every J and both b
    membership_residual: float  # alpha/beta combinations in S_j and S_{j+1}
    phi: np.ndarray  # (|X|, d) orthonormal basis of S_{j,0}
    mphi: np.ndarray  # (|X|, d) = M_j phi

    @property
    def dim(self):
        return self.phi.shape[1]

    def basis(self, ell):
        """Block basis ``{phi, M_j phi}``."""
        return np.column_stack([self.phi[:, ell], self.mphi[:, ell]])


@dataclass(frozen=True)
class BlockStructure:
    n: int
    t: int
    i: int
    levels: tuple
    trivial: np.ndarray  # (|X|, r) orthonormal basis of S_{t,0}
    projector_set: ProjectorSet

    def level(self, j):
        return next(lv for lv in self.levels if lv.j == j)


def shift_operator(spec, i):
    """``M'|0 x_2..x_n> = sum_{l: x_l = 1} |1 x_2 .. 0_l .. x_n>`` for query index ``i``."""
    index = {x: k for k, x in enumerate(spec.inputs)}
    M = np.zeros((spec.size, spec.size))
    for k, x in enumerate(spec.inputs):
        if x[i - 1] != "0":
            continue
        for ell, c in enumerate(x):
            if c == "1":
                y = list(x)
                y[i - 1], y[ell] = "1", "0"
                M[index["".join(y)], k] += 1
    return M


def _membership(vec, S):
    return float(np.linalg.norm(vec - S @ (S.conj().T @ vec)))


@lru_cache(maxsize=64)
def tfold_blocks(n, t, i=1) -> BlockStructure:
    """Projectors ``Pi_{j,l} = |phi><phi| + M_j|phi><phi|M_j*`` plus the trivial ``S_{t,0}``."""
    _check(n, t)
    if not 1 <= i <= n:
        raise BadParameters(f"index {i} outside 1..{n}")
    spec = tfold(n, t)
    d = spec.digits
    coords = [k for k in range(n) if k != i - 1]
    sectors = [build_sector(d, np.flatnonzero(d[:, i - 1] == b), coords, t - b) for b in (0, 1)]
    fam = tfold_subspaces(n, t)
    Mp = shift_operator(spec, i)
    levels, bases, labels = [], [], []
    for j in range(t):
        L0, L1 = sectors[0].level(j), sectors[1].level(j)
        if L0 is None or L1 is None or not (L0.present and L1.present):
            continue
        ob = orthonormalize(list(L0.ddot.T))
        phi = ob.basis
        raw = Mp @ phi
        norms = np.linalg.norm(raw, axis=0)
        c = float(norms[0])
        mphi = raw / c
        live = L0.tilde_norms > 1e-10
        map_res = float(np.max(np.linalg.norm(Mp @ L0.ddot[:, live] / c - L1.ddot[:, live], axis=0)))
        tn0, tn1 = float(L0.tilde_norms[0]), float(L1.tilde_norms[0])
        f0, f1 = tilde_norm_formula(n, t, j, 0), tilde_norm_formula(n, t, j, 1)
        f_res = max(float(np.max(np.abs(L0.tilde_norms - f0))), float(np.max(np.abs(L1.tilde_norms - f1))))
        a_, b_ = sqrt((n - t) / (n - j)) * tn0, sqrt((t - j) / (n - j)) * tn1
        r = sqrt(a_ ** 2 + b_ ** 2)
        alpha, beta = a_ / r, b_ / r
        mem = 0.0
        for k in np.flatnonzero(live):
            v0, v1 = L0.ddot[:, k], L1.ddot[:, k]
            mem = max(mem, _membership(alpha * v0 + beta * v1, fam.levels[j].S),
                      _membership(beta * v0 - alpha * v1, fam.levels[j + 1].S))
        lvl = BlockLevel(j, alpha, beta, c, float(norms.max() - norms.min()), map_res,
                         (tn0, tn1), (f0, f1), f_res, mem, phi, mphi)
        levels.append(lvl)
        for ell in range(lvl.dim):
            bases.append(lvl.basis(ell))
            labels.append((j, ell))
    top = sectors[0].level(t)
    trivial = top.S if top is not None else np.zeros((spec.size, 0))
    for ell in range(trivial.shape[1]):
        bases.append(trivial[:, [ell]])
        labels.append(("triv", ell))
    return BlockStructure(n, t, i, tuple(levels), trivial, ProjectorSet.from_bases(bases, tuple(labels)))


def two_level_eigs(alpha, beta, q):
    """Closed-form eigenvalues of ``Gamma_1 Gamma^{-1}`` on a 2-dim block (ascending)."""
    base = 1 + 2 * alpha ** 2 * beta ** 2 * (q - 1) ** 2 / q
    spread = 2 * alpha * beta * (q - 1) / q * sqrt((alpha ** 2 + beta ** 2 * q) * (beta ** 2 + alpha ** 2 * q))
    return np.array([base - spread, base + spread])


@dataclass(frozen=True)
class BlockEigs:
    j: int
    alpha: float
    beta: float
    closed_form: np.ndarray
    numeric: np.ndarray  # (blocks, 2)

    @property
    def max_deviation(self):
        return float(np.max(np.abs(self.numeric - self.closed_form[None, :])))


def block_spectrum(gamma, spec, i, basis):
    """Spectrum of ``Gamma_i Gamma^{-1}`` compressed to the span of ``basis``."""
    o = np.exp(1j * np.pi * spec.digits[:, i - 1])
    Gb = basis.conj().T @ gamma @ basis
    Ob = basis.conj().T @ (o[:, None] * basis)
    return relative_spectrum(Ob.conj().T @ Gb @ Ob, Gb)


def tfold_block_eigs(n, t, q, j, i=1, rotate=None) -> BlockEigs:
    """Closed-form vs numerically diagonalised block eigenvalues at level ``j``.

    ``rotate`` optionally supplies a unitary mixing the basis of ``S_{j,0}``
    before the blocks are formed; the spectra must not depend on it.
    """
    if not 0 <= j < t:
        raise BadParameters("need 0 <= j < t")
    bs = tfold_blocks(n, t, i)
    lvl = bs.level(j)
    con = tfold_gamma(n, t, q)
    phi, mphi = lvl.phi, lvl.mphi
    if rotate is not None:
        phi, mphi = phi @ rotate, mphi @ rotate
    numeric = np.array([block_spectrum(con.gamma, con.spec, i, np.column_stack([phi[:, k], mphi[:, k]]))
                        for k in range(phi.shape[1])])
    return BlockEigs(j, lvl.alpha, lvl.beta, two_level_eigs(lvl.alpha, lvl.beta, q), numeric)


@dataclass(frozen=True)
class EtaBound:
    numeric: float
    binomial: float | None  # C(n, t/2) / C(n, t) for even t
    simplified: float | None  # 2^{-t/2}, stated for t <= n / (4e)
    simplified_valid: bool


def tfold_eta_bound(n, t, q=2.0, tol=1e-9) -> EtaBound:
    con = tfold_gamma(n, t, q)
    numeric = eta(bad_projector(con.gamma, con.lam, tol), con.spec)
    binom = comb(n, t // 2) / comb(n, t) if t % 2 == 0 else None
    simplified = 2.0 ** (-t / 2) if t % 2 == 0 else None
    return EtaBound(numeric, binom, simplified, t % 2 == 0 and t <= n / (4 * e))
