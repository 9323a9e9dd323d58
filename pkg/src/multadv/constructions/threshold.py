"""Threshold (inputs of weight t-1 and t) and OR, the case t = 1.

Each weight sector ``a`` (weight ``t-1+a``) carries its own level states
``ddot psi_{J,a}``; the plus/minus combinations ``(ddot psi_{J,0} +- ddot psi_{J,1}) / sqrt 2``
span ``S_{j,+}`` and ``S_{j,-}``. For a queried index ``i`` the sectors split
further by ``b = x_i`` into four families ``ddot psi_{J,a,b}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, comb, sqrt

import numpy as np

from ..exceptions import BadParameters, InvariantViolation, TooLarge
from ..linalg import ProjectorSet, orthonormalize, spectral_norm
from ..query import or_function, threshold
from ._levels import build_sector
from .base import Construction
from .tfold import block_spectrum

MAX_INPUTS = 5000
SECTORS = ((0, 0), (0, 1), (1, 0), (1, 1))


def cutoff(t):
    """Exponent ``h`` of the good-subspace coefficient; ``ceil(t/2)``."""
    return ceil(t / 2)


def _check(n, t):
    if not 1 <= t <= n / 2:
        raise BadParameters("threshold constructions need 1 <= t <= n/2")
    size = comb(n, t - 1) + comb(n, t)
    if size > MAX_INPUTS:
        raise TooLarge(f"|X| = {size} exceeds {MAX_INPUTS}")


@dataclass(frozen=True)
class PlusMinusFamily:
    n: int
    t: int
    plus: tuple  # orthonormal bases of S_{j,+}, j = 0..t-1
    minus: tuple  # orthonormal bases of S_{j,-}, j = 0..t
    gram_residual: float  # mismatch of the two sectors' level Gram matrices

    def projector(self, sign, j):
        S = (self.plus if sign == "+" else self.minus)[j]
        return S @ S.conj().T

    @property
    def dims(self):
        return {"+": tuple(S.shape[1] for S in self.plus), "-": tuple(S.shape[1] for S in self.minus)}

    def residuals(self):
        P = [S @ S.conj().T for S in self.plus + self.minus]
        dim = P[0].shape[0]
        ortho = max(spectral_norm(P[a] @ P[b]) for a in range(len(P)) for b in range(a + 1, len(P)))
        return {"orthogonality": ortho, "completeness": spectral_norm(sum(P) - np.eye(dim))}


def _gram(M):
    return M.conj().T @ M


@lru_cache(maxsize=32)
def threshold_subspaces(n, t) -> PlusMinusFamily:
    _check(n, t)
    spec = threshold(n, t)
    d = spec.digits
    w = d.sum(axis=1)
    secs = [build_sector(d, np.flatnonzero(w == t - 1 + a), range(n), t - 1 + a) for a in (0, 1)]
    plus, minus, gram = [], [], 0.0
    for j in range(t):
        D0, D1 = secs[0].levels[j].ddot, secs[1].levels[j].ddot
        gram = max(gram, float(np.max(np.abs(_gram(D0) - _gram(D1)))) if D0.size else 0.0)
        plus.append(orthonormalize(list(((D0 + D1) / sqrt(2)).T)).basis)
        minus.append(orthonormalize(list(((D0 - D1) / sqrt(2)).T)).basis)
    minus.append(secs[1].levels[t].S)
    return PlusMinusFamily(n, t, tuple(plus), tuple(minus), gram)


def threshold_gamma(n, t, q) -> Construction:
    """``Gamma = sum_{j<h} q^j Pi_{S_{j,+}} + q^h (I - sum_{j<h} Pi_{S_{j,+}})`` with ``h = ceil(t/2)``."""
    if q < 1:
        raise BadParameters("q must be >= 1")
    fam = threshold_subspaces(n, t)
    h = cutoff(t)
    spec = threshold(n, t)
    bad = [fam.projector("+", j) for j in range(h)]
    gamma = sum(q ** j * P for j, P in enumerate(bad)) + q ** h * (np.eye(spec.size) - sum(bad))
    gamma = (gamma + gamma.conj().T) / 2
    return Construction("threshold", {"n": n, "t": t, "q": q}, spec, gamma, float(q ** h),
                        lambda i: threshold_blocks(n, t, i).projector_set)


@dataclass(frozen=True)
class ThresholdLevel:
    j: int
    sectors: tuple  # subset of SECTORS present at this level, in order
    alpha: tuple  # (alpha_0, alpha_1)
    beta: tuple  # (beta_0, beta_1)
    bases: dict  # (a, b) -> (|X|, d) orthonormal basis of S_{j,a,b}
    transfer_residual: float  # Gram mismatch between sector families

    @property
    def dim(self):
        return next(iter(self.bases.values())).shape[1]

    def block(self, ell):
        """Basis of the block ``ell`` in the coordinate order of ``sectors``."""
        return np.column_stack([self.bases[s][:, ell] for s in self.sectors])


@dataclass(frozen=True)
class ThresholdBlocks:
    n: int
    t: int
    i: int
    levels: tuple
    projector_set: ProjectorSet

    def level(self, j):
        return next(lv for lv in self.levels if lv.j == j)


def _coeffs(n, weight, j, tn0, tn1):
    """``alpha, beta`` from the tilde norms, with the sector weight as threshold."""
    a_ = sqrt(max(n - weight, 0) / (n - j)) * tn0
    b_ = sqrt(max(weight - j, 0) / (n - j)) * tn1
    r = sqrt(a_ ** 2 + b_ ** 2)
    return (a_ / r, b_ / r) if r else (1.0, 0.0)


@lru_cache(maxsize=64)
def threshold_blocks(n, t, i=1) -> ThresholdBlocks:
    """Blocks spanned by ``ddot psi_{J,a,b}``: 4-dim below level t-1, then 3- and 1-dim."""
    _check(n, t)
    if not 1 <= i <= n:
        raise BadParameters(f"index {i} outside 1..{n}")
    spec = threshold(n, t)
    d = spec.digits
    w = d.sum(axis=1)
    coords = [k for k in range(n) if k != i - 1]
    secs = {}
    for a, b in SECTORS:
        rows = np.flatnonzero((w == t - 1 + a) & (d[:, i - 1] == b))
        secs[(a, b)] = build_sector(d, rows, coords, t)
    levels, bases, labels = [], [], []
    for j in range(t + 1):
        present = tuple(s for s in SECTORS if len(secs[s].rows) and secs[s].has_level(j))
        if not present:
            continue
        ref = secs[present[0]].levels[j]
        ob = orthonormalize(list(ref.ddot.T))
        G0 = _gram(ref.ddot)
        level_bases, resid = {}, 0.0
        for s in present:
            D = secs[s].levels[j].ddot
            resid = max(resid, float(np.max(np.abs(_gram(D) - G0))))
            level_bases[s] = D @ ob.coefficients
        alpha, beta = [], []
        for a in (0, 1):
            l0 = secs[(a, 0)].level(j)
            l1 = secs[(a, 1)].level(j) if len(secs[(a, 1)].rows) else None
            tn0 = float(l0.tilde_norms[0]) if l0 is not None and l0.present else 0.0
            tn1 = float(l1.tilde_norms[0]) if l1 is not None and l1.present else 0.0
            al, be = _coeffs(n, t - 1 + a, j, tn0, tn1)
            alpha.append(al)
            beta.append(be)
        lvl = ThresholdLevel(j, present, tuple(alpha), tuple(beta), level_bases, resid)
        if resid > 1e-8:
            raise InvariantViolation(f"sector Gram matrices differ at level {j} ({resid:.2e})")
        levels.append(lvl)
        for ell in range(lvl.dim):
            bases.append(lvl.block(ell))
            labels.append((j, ell))
    return ThresholdBlocks(n, t, i, tuple(levels), ProjectorSet.from_bases(bases, tuple(labels)))


def threshold_u(alpha, beta):
    a0, a1 = alpha
    b0, b1 = beta
    return np.array([[a0, b0, a0, b0],
                     [b0, -a0, b0, -a0],
                     [a1, b1, -a1, -b1],
                     [b1, -a1, -b1, a1]]) / sqrt(2)


def threshold_g(t, q, j):
    h = cutoff(t)
    if j >= h:
        return q ** h * np.eye(4)
    return np.diag([q ** j, q ** (j + 1), q ** h, q ** h]).astype(float)


Z4 = np.diag([1.0, -1.0, 1.0, -1.0])
D4 = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]], dtype=float)


@dataclass(frozen=True)
class ThresholdBlockMatrices:
    j: int
    U: np.ndarray
    G: np.ndarray
    Z: np.ndarray
    gamma_residual: float  # max_l ||B* Gamma B - U G U*||
    oracle_residual: float  # max_l ||B* O_i B - Z||
    ratio_residual: float  # spectra of Z UGU* Z (UGU*)^{-1} vs the projected blocks

    @property
    def block_gamma(self):
        return self.U @ self.G @ self.U.T

    @property
    def block_ratio(self):
        """``Gamma_1 Gamma^{-1}`` on the block."""
        M = self.block_gamma
        return self.Z @ M @ self.Z @ np.linalg.inv(M)


def threshold_block_matrices(n, t, q, j, i=1) -> ThresholdBlockMatrices:
    """``U``, ``G_j`` and ``Z`` for a 4-dimensional level, checked against the projected blocks."""
    if not 0 <= j <= t - 2:
        raise BadParameters("4-dimensional blocks exist for 0 <= j <= t-2")
    lvl = threshold_blocks(n, t, i).level(j)
    if len(lvl.sectors) != 4:
        raise InvariantViolation(f"level {j} has {len(lvl.sectors)} sectors")
    U, G = threshold_u(lvl.alpha, lvl.beta), threshold_g(t, q, j)
    con = threshold_gamma(n, t, q)
    o = np.exp(1j * np.pi * con.spec.digits[:, i - 1])
    M = U @ G @ U.T
    closed = np.sort(np.linalg.eigvals(Z4 @ M @ Z4 @ np.linalg.inv(M)).real)
    g_res = o_res = r_res = 0.0
    for ell in range(lvl.dim):
        B = lvl.block(ell)
        g_res = max(g_res, spectral_norm(B.conj().T @ con.gamma @ B - M))
        o_res = max(o_res, spectral_norm(B.conj().T @ (o[:, None] * B) - Z4))
        r_res = max(r_res, float(np.max(np.abs(block_spectrum(con.gamma, con.spec, i, B) - closed))))
    return ThresholdBlockMatrices(j, U, G, Z4.copy(), g_res, o_res, r_res)


@dataclass(frozen=True)
class HjReport:
    j: int
    H: np.ndarray  # the displayed 2x2 matrix
    norm: float
    hadamard_norm: float  # ||(U G_j U*) o D_1|| computed directly
    bound_term: float  # (2 / q^j) ||(U G_j U*) o D_1||
    rank2_residual: float  # H - (q-1) alpha beta^T minus its antisymmetric part
    display_residual: float  # swapped block vs -(q^j/2) H^T
    cross_term: float  # |alpha_1 beta_0 - alpha_0 beta_1|
    cross_constant: float  # cross_term * sqrt(t n)
    norm_bound: float  # (q-1)||alpha beta^T|| + (q^{h-j}-1)|cross_term|


def threshold_hj(n, t, q, j, i=1) -> HjReport:
    if not 0 <= j < min(cutoff(t), t - 1):
        raise BadParameters("H_j is defined for 4-dimensional blocks below the cutoff (j < ceil(t/2), j <= t-2)")
    lvl = threshold_blocks(n, t, i).level(j)
    a0, a1 = lvl.alpha
    b0, b1 = lvl.beta
    s = q ** (cutoff(t) - j)
    H = np.array([[a0 * b0 * (q - 1), a1 * b0 * (s - 1) - a0 * b1 * (s - q)],
                  [a0 * b1 * (s - 1) - a1 * b0 * (s - q), a1 * b1 * (q - 1)]])
    cross = a1 * b0 - a0 * b1
    outer = np.outer([a0, a1], [b0, b1])
    anti = np.array([[0.0, 1.0], [-1.0, 0.0]])
    rank2 = spectral_norm(H - (q - 1) * outer - (s - 1) * cross * anti)
    M = threshold_u(lvl.alpha, lvl.beta) @ threshold_g(t, q, j) @ threshold_u(lvl.alpha, lvl.beta).T
    A = M * D4
    perm = [0, 2, 1, 3]
    top = A[np.ix_(perm, perm)][:2, 2:]
    display = spectral_norm(top + q ** j / 2 * H.T)
    had = spectral_norm(A)
    return HjReport(j, H, spectral_norm(H), had, 2 * had / q ** j, rank2, display, abs(cross),
                    abs(cross) * sqrt(t * n), (q - 1) * spectral_norm(outer) + (s - 1) * abs(cross))


def or_gamma(n, q) -> Construction:
    """OR adversary: the threshold construction with ``t = 1``, ``lambda = q``."""
    if n < 2:
        raise BadParameters("OR needs n >= 2")
    con = threshold_gamma(n, 1, q)
    return Construction("or", {"n": n, "q": q}, or_function(n), con.gamma, con.lam,
                        lambda i: threshold_blocks(n, 1, i).projector_set)


def or_block_matrices(n, q):
    """``U``, ``G``, ``Z`` of the 3-dim block in the basis (00, 10, 11)."""
    al, be = sqrt((n - 1) / n), 1 / sqrt(n)
    U = np.array([[1, 1, 0], [al, -al, sqrt(2) * be], [be, -be, -sqrt(2) * al]]) / sqrt(2)
    return U, np.diag([1.0, q, q]), np.diag([1.0, 1.0, -1.0])


def or_gamma_coefficient(n, q, beta=None):
    """``gamma = (q-1)^2 / (2q) (2 beta^2 - beta^4)``."""
    b = 1 / sqrt(n) if beta is None else beta
    return (q - 1) ** 2 / (2 * q) * (2 * b ** 2 - b ** 4)


@dataclass(frozen=True)
class OrBlockEigs:
    n: int
    q: float
    gamma: float
    beta: float  # measured from the construction
    closed_form: np.ndarray  # {1, 1+g-sqrt(g^2+2g), 1+g+sqrt(g^2+2g)}
    numeric: np.ndarray  # spectrum of the projected block
    matrix_residual: float  # projected Gamma block vs U G U*

    @property
    def max_deviation(self):
        return float(np.max(np.abs(np.sort(self.numeric) - np.sort(self.closed_form))))

    @property
    def product(self):
        """Product of the two nontrivial eigenvalues; exactly 1."""
        return float(self.closed_form[0] * self.closed_form[2])


def or_block_eigs(n, q, i=1) -> OrBlockEigs:
    if n < 2:
        raise BadParameters("OR needs n >= 2")
    lvl = threshold_blocks(n, 1, i).level(0)
    if lvl.sectors != ((0, 0), (1, 0), (1, 1)):
        raise InvariantViolation(f"unexpected OR block sectors {lvl.sectors}")
    beta = lvl.beta[1]
    g = or_gamma_coefficient(n, q, beta)
    r = sqrt(g * g + 2 * g)
    closed = np.array([1 + g - r, 1.0, 1 + g + r])
    con = or_gamma(n, q)
    B = lvl.block(0)
    numeric = block_spectrum(con.gamma, con.spec, i, B)
    U, G, _ = or_block_matrices(n, q)
    resid = spectral_norm(B.conj().T @ con.gamma @ B - U @ G @ U.T)
    return OrBlockEigs(n, q, g, beta, closed, np.sort(numeric), resid)
