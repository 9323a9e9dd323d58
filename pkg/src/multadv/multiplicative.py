"""Multiplicative adversary: validation, bad subspace, ratio norms and bounds.

The adversary matrix ``Gamma`` is positive definite with smallest eigenvalue
1. One query multiplies the progress ``W = <Gamma, rho_I>`` by at most
``max_{i,p} ||Gamma_{i,p} / Gamma||`` where ``Gamma_{i,p} = O_{i,p}* Gamma O_{i,p}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .additive import preferred_vector
from .exceptions import (
    AllBlocksTrivial,
    BlockSingular,
    InvariantViolation,
    LambdaOutOfRange,
    NotPositiveDefinite,
    TrivialRatio,
    VacuousBound,
)
from .linalg import (
    HermitianEigenSystem,
    ProjectorSet,
    hermitian_eig,
    relative_norm,
    spectral_norm,
)
from .query import FunctionSpec, difference_matrix, phase_vector
from .validation import DEFAULT_TOL, check_hermitian

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ValidatedGamma:
    gamma: np.ndarray
    rescale: float  # original lambda_min; gamma = original / rescale
    eig: HermitianEigenSystem


def validate_mult(gamma, tol=DEFAULT_TOL) -> ValidatedGamma:
    """Check positive definiteness and rescale so that ``lambda_min = 1``."""
    G = check_hermitian(gamma, tol, "Gamma")
    eig = hermitian_eig(G, tol)
    if eig.min <= tol * max(eig.norm, 1.0):
        raise NotPositiveDefinite(f"Gamma is not positive definite (lambda_min = {eig.min:.3e})")
    factor = eig.min
    if abs(factor - 1.0) <= tol:
        return ValidatedGamma(G, 1.0, eig)
    return ValidatedGamma(G / factor, factor, HermitianEigenSystem(eig.eigenvalues / factor, eig.eigenvectors))


def _eig(gamma, tol):
    return gamma if isinstance(gamma, HermitianEigenSystem) else hermitian_eig(gamma, tol)


@dataclass(frozen=True)
class BadSubspace:
    bad: np.ndarray
    good: np.ndarray
    rank: int
    flagged: int  # eigenvalues within the boundary band of lambda, counted as good


def boundary_band(norm, tol=DEFAULT_TOL):
    """Width of the rounding-noise band around ``lambda``."""
    return min(tol, BOUNDARY_TOL) * max(norm, 1.0)


def bad_projector(gamma, lam, tol=DEFAULT_TOL) -> BadSubspace:
    """Spectral projectors onto eigenvalues below / at-or-above ``lam``.

    Eigenvalues within :func:`boundary_band` of ``lam`` are rounding copies
    of it: they count as good and are recorded in ``flagged``.
    """
    eig = _eig(gamma, tol)
    if not (lam > 1 and lam <= eig.max + tol * max(eig.norm, 1.0)):
        raise LambdaOutOfRange(f"lambda = {lam} outside (1, ||Gamma|| = {eig.max}]")
    band = boundary_band(eig.norm, tol)
    w = eig.eigenvalues
    is_bad = w < lam - band
    V = eig.eigenvectors
    Vb, Vg = V[:, is_bad], V[:, ~is_bad]
    flagged = int(np.count_nonzero(np.abs(w - lam) <= band))
    return BadSubspace(Vb @ Vb.conj().T, Vg @ Vg.conj().T, int(is_bad.sum()), flagged)


def eta(bad, spec: FunctionSpec) -> float:
    """``max_z ||F_z Pi_bad||^2``."""
    P = bad.bad if isinstance(bad, BadSubspace) else np.asarray(bad)
    return max(spectral_norm(P[spec.output_mask(z)]) ** 2 for z in spec.outputs)


@dataclass(frozen=True)
class RatioReport:
    ratios: dict  # (i, p) -> ||Gamma_{i,p} / Gamma||
    blocks: dict = field(default_factory=dict)

    @property
    def max(self):
        return max(self.ratios.values())

    @property
    def argmax(self):
        return max(self.ratios, key=self.ratios.get)


def conjugated(gamma, spec: FunctionSpec, i, p=1):
    """``Gamma_{i,p} = O_{i,p}* Gamma O_{i,p}``."""
    o = phase_vector(spec, i, p)
    return o.conj()[:, None] * gamma * o[None, :]


def ratio_norms(gamma, spec: FunctionSpec, tol=DEFAULT_TOL, indices=None) -> RatioReport:
    """Relative norms for every ``(i, p)`` with ``p >= 1``."""
    G = check_hermitian(gamma, tol, "Gamma")
    idx = range(1, spec.n + 1) if indices is None else indices
    ratios = {}
    for i in idx:
        for p in range(1, spec.sigma):
            ratios[(i, p)] = relative_norm(conjugated(G, spec, i, p), G, tol)
    return RatioReport(ratios)


def madv_from_ratio(lam, zeta, max_ratio, tol=DEFAULT_TOL) -> float:
    """``log(zeta^2 lambda) / log(max ratio)``; base-independent."""
    if max_ratio <= 1 + tol:
        raise TrivialRatio(f"max ratio {max_ratio!r} is 1: the bound is undefined")
    num = zeta ** 2 * lam
    if num <= 1 + tol:
        raise VacuousBound(f"zeta^2 lambda = {num!r} <= 1")
    return log(num) / log(max_ratio)


def madv_value(gamma, spec: FunctionSpec, lam, zeta, tol=DEFAULT_TOL) -> float:
    return madv_from_ratio(lam, zeta, ratio_norms(gamma, spec, tol).max, tol)


def start_vector(gamma, tol=DEFAULT_TOL):
    """Unit eigenvector for the smallest eigenvalue (deterministic under degeneracy)."""
    eig = _eig(gamma, tol)
    band = tol * max(eig.norm, 1.0)
    return preferred_vector(eig.eigenspace(eig.min, band))


# --- block diagonalisation ------------------------------------------------


@dataclass(frozen=True)
class BlockDiagonalReport:
    gamma_residual: float
    oracle_residual: float
    worst_gamma: tuple | None
    worst_oracle: tuple | None
    tol: float

    @property
    def passed(self):
        return self.gamma_residual <= self.tol and self.oracle_residual <= self.tol


def _off_block_residual(M, Pi: ProjectorSet):
    worst, where = 0.0, None
    bases = Pi.bases
    for a, Ba in enumerate(bases):
        left = Ba.conj().T @ M
        for b, Bb in enumerate(bases):
            if a == b or not Ba.shape[1] or not Bb.shape[1]:
                continue
            r = spectral_norm(left @ Bb)
            if r > worst:
                worst, where = r, (Pi.labels[a], Pi.labels[b])
    return worst, where


def verify_block_diagonal(gamma, spec: FunctionSpec, i, Pi: ProjectorSet, tol=DEFAULT_TOL):
    """Off-diagonal block residuals of ``Gamma`` and ``O_{i,1}`` under ``Pi``.

    ``Gamma``'s residual is measured relative to ``||Gamma||``.
    """
    G = np.asarray(gamma, dtype=complex)
    scale = max(spectral_norm(G), 1.0)
    g, gw = _off_block_residual(G / scale, Pi)
    o, ow = _off_block_residual(np.diag(phase_vector(spec, i, 1)), Pi)
    return BlockDiagonalReport(g, o, gw, ow, tol)


@dataclass(frozen=True)
class BlockEntry:
    label: object
    rank: int
    ratio: float  # max_p ||Gamma^(l)_{i,p} / Gamma^(l)||
    lambda_min: float
    hadamard_norm: float  # ||Gamma^(l) o D_i||
    bound: float  # 1 + 2 ||Gamma^(l) o D_i|| / lambda_min


@dataclass(frozen=True)
class BlockRatioReport:
    i: int
    blocks: tuple
    global_ratio: float

    @property
    def max_block_ratio(self):
        return max(b.ratio for b in self.blocks)

    @property
    def equality_residual(self):
        return abs(self.global_ratio - self.max_block_ratio)

    @property
    def bound_slack(self):
        """``min_l (bound - ratio)``; non-negative when every block obeys the bound."""
        return min(b.bound - b.ratio for b in self.blocks)

    @property
    def bound(self):
        return max(b.bound for b in self.blocks)


def block_ratio_bound(gamma, spec: FunctionSpec, i, Pi: ProjectorSet, tol=DEFAULT_TOL) -> BlockRatioReport:
    """Per-block exact ratios, smallest eigenvalues and the simplified upper bound."""
    G = check_hermitian(gamma, tol, "Gamma")
    D = difference_matrix(spec, i)
    entries = []
    for label, B in zip(Pi.labels, Pi.bases):
        if not B.shape[1]:
            continue
        Gl = B.conj().T @ G @ B
        Gl = (Gl + Gl.conj().T) / 2
        lmin = float(np.linalg.eigvalsh(Gl)[0])
        if lmin <= tol * max(spectral_norm(Gl), 1.0):
            raise BlockSingular(f"block {label!r} of Gamma is not positive definite")
        ratio = 1.0
        for p in range(1, spec.sigma):
            Ol = B.conj().T @ (phase_vector(spec, i, p)[:, None] * B)
            ratio = max(ratio, relative_norm(Ol.conj().T @ Gl @ Ol, Gl, tol))
        full = B @ Gl @ B.conj().T
        h = spectral_norm(full * D)
        entries.append(BlockEntry(label, B.shape[1], ratio, lmin, h, 1 + 2 * h / lmin))
    global_ratio = max(relative_norm(conjugated(G, spec, i, p), G, tol) for p in range(1, spec.sigma))
    return BlockRatioReport(i, tuple(entries), global_ratio)


@dataclass(frozen=True)
class Madv2Result:
    value: float
    terms: dict  # (i, label) -> lambda_min / (2 ||Gamma^(l) o D_i||)
    excluded: tuple  # (i, label) blocks with vanishing Hadamard norm


def madv2_value(gamma, spec: FunctionSpec, lam, zeta, partitions, tol=DEFAULT_TOL) -> Madv2Result:
    """Block-wise simplified bound ``log(zeta^2 lambda) min_{i,l} lambda_min / (2 ||Gamma^(l) o D_i||)``.

    ``partitions`` maps each index ``i`` (1-based) to a :class:`ProjectorSet`
    that block-diagonalises ``Gamma`` and ``O_{i,1}``. The logarithm is
    natural, as required for the bound to be implied by the ratio form.
    """
    num = zeta ** 2 * lam
    if num <= 1 + tol:
        raise VacuousBound(f"zeta^2 lambda = {num!r} <= 1")
    G = check_hermitian(gamma, tol, "Gamma")
    scale = max(spectral_norm(G), 1.0)
    terms, excluded = {}, []
    for i, Pi in partitions.items():
        rep = verify_block_diagonal(G, spec, i, Pi, max(tol, 1e-9))
        if not rep.passed:
            raise InvariantViolation(f"projector set for i={i} does not block-diagonalise Gamma and O_{i},1")
        for b in block_ratio_bound(G, spec, i, Pi, tol).blocks:
            if b.hadamard_norm <= tol * scale:
                excluded.append((i, b.label))
            else:
                terms[(i, b.label)] = b.lambda_min / (2 * b.hadamard_norm)
    if not terms:
        raise AllBlocksTrivial("every block has a vanishing Hadamard norm")
    return Madv2Result(log(num) * min(terms.values()), terms, tuple(excluded))


class MultiplicativeAdversary(BaseEstimator):
    """Multiplicative adversary bound as an estimator.

    Parameters
    ----------
    gamma : array-like
        Positive definite adversary matrix over ``spec.inputs``. Rescaled
        to smallest eigenvalue 1 on fit; ``lam`` is rescaled with it.
    lam : float or None
        Good-subspace threshold; ``None`` means ``||Gamma||``.
    zeta : float
        Success-probability margin: the bound is for success ``eta + 4 zeta``.
    tol : float
        Tolerance for validation and eigenvalue banding.
    """

    def __init__(self, gamma=None, lam=None, zeta=0.5, tol=DEFAULT_TOL):
        self.gamma = gamma
        self.lam = lam
        self.zeta = zeta
        self.tol = tol

    def fit(self, spec: FunctionSpec, y=None):
        if self.gamma is None:
            raise InvariantViolation("gamma is required")
        v = validate_mult(self.gamma, self.tol)
        if v.gamma.shape[0] != spec.size:
            raise InvariantViolation(f"Gamma is {v.gamma.shape[0]}x{v.gamma.shape[0]}, |X| = {spec.size}")
        self.gamma_ = v.gamma
        self.rescale_factor_ = v.rescale
        self.eig_ = v.eig
        self.ratios_ = ratio_norms(self.gamma_, spec, self.tol)
        self.max_ratio_ = self.ratios_.max
        lam = v.eig.max if self.lam is None else self.lam / v.rescale
        self.lambda_value_ = lam
        sub = bad_projector(v.eig, lam, self.tol)
        self.bad_subspace_ = sub
        self.bad_projector_ = sub.bad
        self.good_projector_ = sub.good
        self.boundary_flagged_ = sub.flagged
        self.eta_ = eta(sub, spec)
        self.start_vector_ = start_vector(v.eig, self.tol)
        return self

    def score(self, spec=None, y=None):
        """MADV value ``log(zeta^2 lambda) / log(max ratio)``."""
        check_is_fitted(self, "max_ratio_")
        return madv_from_ratio(self.lambda_value_, self.zeta, self.max_ratio_, self.tol)

    @property
    def success_threshold_(self):
        check_is_fitted(self, "eta_")
        return self.eta_ + 4 * self.zeta

    @property
    def progress_threshold_(self):
        check_is_fitted(self, "lambda_value_")
        return self.zeta ** 2 * self.lambda_value_
