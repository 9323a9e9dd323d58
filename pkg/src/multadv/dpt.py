"""Direct products: ``k`` independent instances, ``Gamma' = Gamma^{(x) k}``.

The ratio ``Gamma'_{i',p} / Gamma'`` for a query into instance ``m`` is
``I (x) .. (x) (Gamma_{i,p} / Gamma) (x) .. (x) I``, so the composed maximum ratio
equals the base one while ``lambda' = lambda^{k/10}`` grows with ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb, e, floor, log

import numpy as np
from sklearn.utils.validation import check_is_fitted

from .exceptions import BadParameters, TooLarge
from .linalg import hermitian_eig
from .multiplicative import (
    MultiplicativeAdversary,
    bad_projector,
    boundary_band,
    eta,
    madv_from_ratio,
    ratio_norms,
)
from .query import FunctionSpec
from .validation import DEFAULT_TOL

MAX_INPUTS = 5000
SPLIT = 10  # lambda' = lambda^{k/SPLIT}


def _specs(spec, k):
    if isinstance(spec, FunctionSpec):
        if k is None or k < 1:
            raise BadParameters("k must be >= 1")
        return (spec,) * k
    specs = tuple(spec)
    if not specs or (k is not None and k != len(specs)):
        raise BadParameters("need a non-empty list of specs matching k")
    return specs


def composed_size(specs):
    out = 1
    for s in specs:
        out *= s.size
    return out


def compose_function(spec, k=None) -> FunctionSpec:
    """``f(x_1, .., x_k) = (f(x_1), .., f(x_k))``; outputs are comma-joined tuples.

    ``spec`` is one :class:`FunctionSpec` repeated ``k`` times or a list of
    specs (distinct functions, same alphabet). Inputs are ordered
    lexicographically by instance so they match ``np.kron`` ordering.
    """
    specs = _specs(spec, k)
    if len(specs) == 1:
        return specs[0]
    sigma = specs[0].sigma
    if any(s.sigma != sigma for s in specs):
        raise BadParameters("composed functions need a common input alphabet")
    size = composed_size(specs)
    if size > MAX_INPUTS:
        raise TooLarge(f"|X|^k = {size} exceeds {MAX_INPUTS}")
    inputs, values = [], []
    for combo in itertools.product(*(range(s.size) for s in specs)):
        inputs.append("".join(s.inputs[c] for s, c in zip(specs, combo)))
        values.append(",".join(s.values[c] for s, c in zip(specs, combo)))
    outputs = tuple(",".join(z) for z in itertools.product(*(s.outputs for s in specs)))
    name = "x".join(s.name or "f" for s in specs)
    return FunctionSpec(sum(s.n for s in specs), sigma, tuple(inputs), tuple(values), outputs, name)


@dataclass(frozen=True)
class ComposedAdversary:
    gammas: tuple  # base adversary per instance, each with lambda_min = 1
    specs: tuple
    lam: float  # common base lambda
    zeta: float
    eta: float  # max base eta
    base_ratio: float  # max base ratio over instances

    @property
    def k(self):
        return len(self.gammas)

    @property
    def lambda_k(self):
        return self.lam ** (self.k / SPLIT)

    @property
    def zeta_k(self):
        return self.zeta ** (self.k / SPLIT)

    @property
    def dim(self):
        return composed_size(self.specs)

    @cached_property
    def spec_k(self):
        return compose_function(list(self.specs))

    @cached_property
    def gamma_k(self):
        if self.dim > MAX_INPUTS:
            raise TooLarge(f"|X|^k = {self.dim} exceeds {MAX_INPUTS}")
        out = np.ones((1, 1), dtype=complex)
        for G in self.gammas:
            out = np.kron(out, G)
        return out

    @cached_property
    def product_eigenvalues(self):
        """Sorted k-fold products of the base spectra (formula path, no ``Gamma'`` needed)."""
        out = np.ones(1)
        for G in self.gammas:
            out = np.kron(out, np.linalg.eigvalsh(G))
        return np.sort(out)


def _base(adv):
    check_is_fitted(adv, "gamma_")
    return adv.gamma_, adv.lambda_value_, adv.eta_, adv.max_ratio_


def dpt_gamma(adv, spec, k=None, tol=DEFAULT_TOL) -> ComposedAdversary:
    """Tensor-power adversary.

    ``adv`` is a fitted :class:`MultiplicativeAdversary` used for every
    instance, or a list of fitted adversaries (one per instance, paired
    with a list ``spec``) for distinct functions sharing one ``lambda``.
    """
    if isinstance(adv, MultiplicativeAdversary):
        specs = _specs(spec, k)
        advs = (adv,) * len(specs)
    else:
        advs = tuple(adv)
        specs = _specs(list(spec), len(advs))
    if any(not isinstance(a, MultiplicativeAdversary) for a in advs):
        raise BadParameters("expected fitted MultiplicativeAdversary objects")
    bases = [_base(a) for a in advs]
    for (G, _, _, _), s in zip(bases, specs):
        if G.shape[0] != s.size:
            raise BadParameters("adversary and function sizes differ")
    lams = [b[1] for b in bases]
    if max(lams) - min(lams) > tol * max(lams):
        raise BadParameters("instances must share one lambda")
    zeta = advs[0].zeta
    return ComposedAdversary(tuple(b[0] for b in bases), specs, lams[0], zeta,
                             max(b[2] for b in bases), max(b[3] for b in bases))


@dataclass(frozen=True)
class TensorNormReport:
    k: int
    base_ratio: float
    composed_ratio: float
    ratio_residual: float
    eigen_residual: float  # sorted spectrum of Gamma' vs product multiset
    lambda_min: float
    norm: float

    def passed(self, tol=1e-9):
        return self.ratio_residual <= tol and self.eigen_residual <= tol


def verify_tensor_norm_identity(adv, spec, k, tol=DEFAULT_TOL) -> TensorNormReport:
    """Compute the composed maximum ratio from scratch on ``X^k`` and compare."""
    comp = dpt_gamma(adv, spec, k, tol)
    G = comp.gamma_k
    composed = ratio_norms(G, comp.spec_k, tol).max
    spectrum = hermitian_eig(G, tol).eigenvalues
    resid = float(np.max(np.abs(spectrum - comp.product_eigenvalues)))
    return TensorNormReport(comp.k, comp.base_ratio, composed, abs(composed - comp.base_ratio), resid,
                            float(spectrum[0]), float(spectrum[-1]))


@dataclass(frozen=True)
class DptEtaBound:
    eta: float
    k: int
    combinatorial: float  # min(1, eta^{9k/10} sum_{i <= k/10} C(k, i))
    chain_binomial: float  # k C(k, k/10) eta^{9k/10}, uncapped
    chain_exponential: float  # k (10 e)^{k/10} eta^{9k/10}, uncapped
    simplified: float  # min(1, eta^{2k/5})
    simplified_valid: bool  # eta <= 1/2 and k >= 361

    @property
    def note(self):
        return "" if self.simplified_valid else "preconditions not met (need eta <= 1/2 and k >= 361)"


def _exp(logv):
    return float(np.exp(logv)) if logv < 700 else float("inf")


def dpt_eta_bound(eta_value, k) -> DptEtaBound:
    """Success bound on the composed bad subspace; computed in log space."""
    if not 0 < eta_value <= 1:
        raise BadParameters("eta must lie in (0, 1]")
    if k < 1:
        raise BadParameters("k must be >= 1")
    le = log(eta_value)
    head = 9 * k / SPLIT * le
    m = floor(k / SPLIT)
    total = sum(comb(k, i) for i in range(m + 1))
    comb_log = log(total) + head
    chain_b = _exp(log(k) + log(comb(k, m)) + head)
    chain_e = _exp(log(k) + k / SPLIT * log(SPLIT * e) + head)
    return DptEtaBound(eta_value, k, min(1.0, _exp(comb_log)), chain_b, chain_e,
                       min(1.0, _exp(2 * k / 5 * le)), eta_value <= 0.5 and k >= 361)


@dataclass(frozen=True)
class DptMadv:
    k: int
    value: float  # (k/10) * base MADV
    base: float
    direct: float | None  # log(zeta'^2 lambda') / log(composed ratio), when the space fits

    @property
    def residual(self):
        return None if self.direct is None else abs(self.direct - self.value)


def dpt_madv(adv, spec, k, direct=None, tol=DEFAULT_TOL) -> DptMadv:
    """``(k/10) MADV(f)``, cross-checked on ``X^k`` when ``|X|^k`` fits the guard."""
    comp = dpt_gamma(adv, spec, k, tol)
    base = madv_from_ratio(comp.lam, comp.zeta, comp.base_ratio, tol)
    value = comp.k / SPLIT * base
    if direct is None:
        direct = comp.dim <= MAX_INPUTS
    d = None
    if direct:
        ratio = ratio_norms(comp.gamma_k, comp.spec_k, tol).max
        d = madv_from_ratio(comp.lambda_k, comp.zeta_k, ratio, tol)
    return DptMadv(comp.k, value, base, d)


@dataclass(frozen=True)
class ComposedBadReport:
    lambda_k: float
    rank_numeric: int
    rank_formula: int  # products of base eigenvalues below lambda'
    eta_numeric: float
    eta_bound: float  # combinatorial bound from the base eta

    @property
    def consistent(self):
        return self.rank_numeric == self.rank_formula


def composed_bad_subspace(adv, spec, k, tol=DEFAULT_TOL) -> ComposedBadReport:
    """Rank and success probability of ``Pi'_bad(lambda')`` against the formula path."""
    comp = dpt_gamma(adv, spec, k, tol)
    G = comp.gamma_k
    eig = hermitian_eig(G, tol)
    band = boundary_band(eig.norm, tol)
    lam = comp.lambda_k
    sub = bad_projector(eig, lam, tol)
    formula = int(np.count_nonzero(comp.product_eigenvalues < lam - band))
    return ComposedBadReport(lam, sub.rank, formula, eta(sub, comp.spec_k),
                             dpt_eta_bound(comp.eta, comp.k).combinatorial)
