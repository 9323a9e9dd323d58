"""Additive adversary: validation and the ADV lower-bound formula."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateBoundWarning, InvariantViolation, ZeroDenominator
from .linalg import hermitian_eig, spectral_norm
from .query import FunctionSpec, difference_matrix
from .validation import DEFAULT_TOL, check_square, hermitian_residual


@dataclass(frozen=True)
class AdditiveReport:
    hermitian_residual: float
    nonzero: bool
    violations: tuple  # ((x, y), |Gamma[x, y]|) with f(x) == f(y)
    tol: float

    @property
    def passed(self):
        return self.nonzero and not self.violations and self.hermitian_residual <= self.tol


def validate_additive(gamma, spec: FunctionSpec, tol=DEFAULT_TOL) -> AdditiveReport:
    """Check ``Gamma`` is Hermitian, nonzero and vanishes on equal-output pairs."""
    G = check_square(gamma, "Gamma")
    if G.shape[0] != spec.size:
        raise InvariantViolation(f"Gamma is {G.shape[0]}x{G.shape[0]}, |X| = {spec.size}")
    scale = max(spectral_norm(G), 1.0)
    vals = np.array(spec.values)
    same = vals[:, None] == vals[None, :]
    bad = np.argwhere(same & (np.abs(G) > tol * scale))
    violations = tuple(((spec.inputs[a], spec.inputs[b]), float(abs(G[a, b]))) for a, b in bad)
    return AdditiveReport(hermitian_residual(G) / scale, bool(np.any(np.abs(G) > 0)), violations, tol)


def hadamard_norms(gamma, spec: FunctionSpec):
    """``||Gamma o D_i||`` for ``i = 1..n``."""
    G = check_square(gamma, "Gamma")
    return np.array([spectral_norm(G * difference_matrix(spec, i)) for i in range(1, spec.n + 1)])


def norm_ratio(gamma, spec: FunctionSpec, tol=DEFAULT_TOL) -> float:
    """``||Gamma|| / max_i ||Gamma o D_i||``."""
    G = check_square(gamma, "Gamma")
    denom = float(hadamard_norms(G, spec).max())
    if denom <= tol * max(spectral_norm(G), 1.0):
        raise ZeroDenominator("Gamma connects no inputs that differ in a single coordinate")
    return spectral_norm(G) / denom


def error_factor(epsilon, boolean_output=False):
    """``1/2 - sqrt(eps(1-eps)) - eps``; the ``- eps`` term is dropped for Boolean output."""
    root = sqrt(epsilon * (1 - epsilon))
    return 0.5 - root if boolean_output else 0.5 - root - epsilon


def adv_value(gamma, spec: FunctionSpec, epsilon=0.0, boolean_output=False, tol=DEFAULT_TOL) -> float:
    """Additive adversary lower bound for error ``epsilon``; clamped at 0."""
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    ratio = norm_ratio(gamma, spec, tol)
    factor = error_factor(epsilon, boolean_output)
    if factor <= 0:
        warnings.warn(
            f"error factor {factor:.6g} <= 0 at epsilon={epsilon}; bound clamped to 0",
            DegenerateBoundWarning,
            stacklevel=2,
        )
        return 0.0
    return factor * ratio


def preferred_vector(basis):
    """Unit vector in ``span(basis)`` closest to the uniform vector.

    Falls back to the first basis column when the uniform vector is
    orthogonal to the span. Sign is fixed so the largest entry is positive real.
    """
    dim = basis.shape[0]
    u = np.full(dim, 1 / sqrt(dim))
    v = basis @ (basis.conj().T @ u)
    if np.linalg.norm(v) <= 1e-10:
        v = basis[:, 0].copy()
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def principal_eigenvector(gamma, tol=DEFAULT_TOL):
    """Unit eigenvector for the eigenvalue of largest magnitude.

    Ties between ``+||Gamma||`` and ``-||Gamma||`` go to the positive one;
    within a degenerate eigenspace the vector is picked by
    :func:`preferred_vector`.
    """
    eig = hermitian_eig(gamma, tol)
    band = tol * max(eig.norm, 1.0)
    top = eig.max if eig.max >= eig.norm - band else eig.min
    return preferred_vector(eig.eigenspace(top, band))


# --- standard additive adversary matrices ---------------------------------


def complete_adversary(spec: FunctionSpec):
    """All-ones weight on every pair with different outputs."""
    vals = np.array(spec.values)
    return (vals[:, None] != vals[None, :]).astype(complex)


def hamming_adversary(spec: FunctionSpec):
    """All-ones weight on different-output pairs at Hamming distance 1.

    For OR this is the star between ``0^n`` and the unit vectors.
    """
    d = spec.digits
    dist = (d[:, None, :] != d[None, :, :]).sum(axis=2)
    return ((dist == 1) & (complete_adversary(spec).real > 0)).astype(complex)


ADDITIVE_GAMMAS = {"complete": complete_adversary, "hamming": hamming_adversary, "star": hamming_adversary}


class AdditiveAdversary(BaseEstimator):
    """Additive adversary bound as an estimator.

    Parameters
    ----------
    gamma : array-like or str
        Adversary matrix over ``spec.inputs`` or the name of a standard
        construction (``"complete"``, ``"hamming"``, ``"star"``).
    epsilon : float
        Allowed error probability of the algorithm.
    boolean_output : bool
        Use the strengthened final-state bound available for Boolean output.
    tol : float
        Validation tolerance.

    Attributes set by :meth:`fit`: ``gamma_``, ``report_``, ``norm_``,
    ``hadamard_norms_``, ``ratio_``, ``value_``, ``principal_vector_``,
    ``sign_flipped_``.
    """

    def __init__(self, gamma="complete", epsilon=0.0, boolean_output=False, tol=DEFAULT_TOL):
        self.gamma = gamma
        self.epsilon = epsilon
        self.boolean_output = boolean_output
        self.tol = tol

    def fit(self, spec: FunctionSpec, y=None):
        G = ADDITIVE_GAMMAS[self.gamma](spec) if isinstance(self.gamma, str) else check_square(self.gamma)
        report = validate_additive(G, spec, self.tol)
        if not report.passed:
            raise InvariantViolation(f"invalid additive adversary: {report}")
        eig = hermitian_eig(G, self.tol)
        # the progress argument needs W^0 = +||Gamma||; -Gamma is an equally valid adversary
        self.sign_flipped_ = bool(-eig.min > eig.max + self.tol * eig.norm)
        self.gamma_ = -G if self.sign_flipped_ else G
        self.report_ = report
        self.norm_ = spectral_norm(self.gamma_)
        self.hadamard_norms_ = hadamard_norms(self.gamma_, spec)
        self.ratio_ = norm_ratio(self.gamma_, spec, self.tol)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateBoundWarning)
            self.value_ = adv_value(self.gamma_, spec, self.epsilon, self.boolean_output, self.tol)
        self.principal_vector_ = principal_eigenvector(self.gamma_, self.tol)
        return self

    def score(self, spec=None, y=None):
        check_is_fitted(self, "value_")
        return self.value_

    @property
    def max_step_(self):
        """Per-query bound ``2 max_i ||Gamma o D_i||`` on the progress drop."""
        check_is_fitted(self, "hadamard_norms_")
        return 2 * float(self.hadamard_norms_.max())

    def final_bound(self, epsilon, boolean_output=None):
        """Upper bound on ``W^T`` for an algorithm with error ``epsilon``."""
        check_is_fitted(self, "norm_")
        strong = self.boolean_output if boolean_output is None else boolean_output
        root = sqrt(epsilon * (1 - epsilon))
        return 2 * (root if strong else root + epsilon) * self.norm_
