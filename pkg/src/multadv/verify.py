"""Verification suites: each returns named checks with residuals."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, sqrt

import numpy as np

from .additive import AdditiveAdversary
from .constructions import Construction, build
from .constructions.search import search_block_norm
from .constructions.tfold import tfold_block_eigs
from .constructions.threshold import cutoff, or_block_eigs, threshold_block_matrices, threshold_hj
from .dpt import composed_bad_subspace, dpt_madv, verify_tensor_norm_identity
from .exceptions import TrivialRatio, VacuousBound
from .linalg import validate_projector_set
from .multiplicative import (
    MultiplicativeAdversary,
    bad_projector,
    block_ratio_bound,
    eta,
    ratio_norms,
    start_vector,
    verify_block_diagonal,
)
from .query import FunctionSpec
from .simulator import (
    error_per_input,
    grover_algorithm,
    grover_optimal_iterations,
    random_algorithm,
    run,
    success_probability,
    trace_from_states,
)

CHECK_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float  # how far past the limit (<= 0 or small means pass)
    detail: str = ""


def check_le(name, value, limit, tol=CHECK_TOL, detail=""):
    """``value <= limit + tol``; residual is ``value - limit``."""
    r = float(value - limit)
    return Check(name, bool(r <= tol), r, detail)


def check_close(name, a, b, tol=CHECK_TOL, detail=""):
    r = float(abs(a - b))
    return Check(name, bool(r <= tol), r, detail)


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)
    quantities: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def counts(self):
        return sum(c.passed for c in self.checks), len(self.checks)

    def add(self, check):
        self.checks.append(check)
        return check


def _fit_mult(con: Construction, zeta=0.5, tol=1e-9):
    return MultiplicativeAdversary(con.gamma, con.lam, zeta=zeta, tol=tol).fit(con.spec)


def suite_thm2(con: Construction, seeds=200, T=5, dim_W=2, tol=CHECK_TOL, seed0=0) -> SuiteReport:
    """Every observed ``W^{t+1}/W^t`` stays below ``max_{i,p} ||Gamma_{i,p}/Gamma||``."""
    rep = SuiteReport("thm2")
    bound = ratio_norms(con.gamma, con.spec).max
    delta = start_vector(con.gamma)
    worst, norm_drift = -np.inf, 0.0
    for s in range(seed0, seed0 + seeds):
        alg = random_algorithm(s, T, dim_W, con.spec.n, con.spec.sigma)
        states = run(alg, con.spec, delta)
        norm_drift = max(norm_drift, max(abs(st.norm - 1) for st in states))
        tr = trace_from_states(states, con.gamma)
        observed = float(np.nanmax(tr.ratios))
        worst = max(worst, observed)
        rep.add(check_le(f"ratio seed={s}", observed, bound, tol))
    rep.add(check_le("norm preservation", norm_drift, 0.0, 1e-10))
    rep.quantities.update(max_ratio_norm=bound, max_observed_ratio=worst, seeds=seeds)
    return rep


def grover_endtoend(n=4, iterations=1, zeta=None, tol=CHECK_TOL) -> SuiteReport:
    """Grover on ``search(n)`` against ``Gamma(q = 2/zeta^2)``: success >= eta + 4 zeta implies ``W^T >= zeta^2 lambda``.

    Success is measured on the ``delta``-weighted superposition of inputs.
    By default ``zeta`` is the largest margin the measured success allows.
    """
    rep = SuiteReport("thm2-endtoend")
    alg = grover_algorithm(n, iterations)
    probe = build("search", n, q=2.0)
    eta0 = eta(bad_projector(probe.gamma, probe.lam), probe.spec)
    delta = start_vector(probe.gamma)
    states = run(alg, probe.spec, delta)
    success = success_probability(states[-1], probe.spec, alg.output_projectors)
    if zeta is None:
        zeta = (success - eta0) / 4
    if zeta <= 0:
        rep.add(Check("success exceeds eta", False, float(eta0 - success)))
        rep.quantities.update(success=success, eta=eta0)
        return rep
    q = 2 / zeta ** 2
    con = build("search", n, q=q)
    adv = _fit_mult(con, zeta)
    tr = trace_from_states(run(alg, con.spec, start_vector(con.gamma)), con.gamma)
    target = zeta ** 2 * adv.lambda_value_
    rep.add(check_le("success >= eta + 4 zeta", adv.eta_ + 4 * zeta, success, tol))
    rep.add(check_le("W^T >= zeta^2 lambda", target, tr.W[-1], tol))
    rep.quantities.update(success=success, eta=adv.eta_, zeta=zeta, q=q, lam=adv.lambda_value_,
                          final_W=float(tr.W[-1]), threshold=target)
    return rep


def suite_thm1(spec: FunctionSpec, gamma="complete", seeds=200, T=5, dim_W=2, tol=CHECK_TOL,
               seed0=0) -> SuiteReport:
    """``W^0 = ||Gamma||`` and every step drops by at most ``2 max_i ||Gamma o D_i||``."""
    rep = SuiteReport("thm1")
    adv = AdditiveAdversary(gamma).fit(spec)
    delta = adv.principal_vector_
    step = adv.max_step_
    w0_res, worst = 0.0, -np.inf
    for s in range(seed0, seed0 + seeds):
        alg = random_algorithm(s, T, dim_W, spec.n, spec.sigma)
        tr = trace_from_states(run(alg, spec, delta), adv.gamma_)
        w0_res = max(w0_res, abs(tr.W[0] - adv.norm_))
        d = float(np.max(np.abs(tr.differences)))
        worst = max(worst, d)
        rep.add(check_le(f"step seed={s}", d, step, tol))
    rep.add(check_le("W^0 = ||Gamma||", w0_res, 0.0, tol))
    rep.quantities.update(norm=adv.norm_, max_step=step, max_observed_step=worst, seeds=seeds)
    if set(spec.outputs) == {str(k) for k in range(1, spec.n + 1)} and spec.size == spec.n:
        # final-state bound on Grover at its optimal iteration count (search only)
        alg = grover_algorithm(spec.n, grover_optimal_iterations(spec.n))
        states = run(alg, spec, delta)
        eps = float(np.nanmax(error_per_input(states[-1], spec, alg.output_projectors)))
        eps = min(max(eps, 0.0), 1.0)
        wT = trace_from_states(states, adv.gamma_).W[-1]
        rep.add(check_le("W^T <= 2(sqrt(eps(1-eps)) + eps)||Gamma||", wT, adv.final_bound(eps, False), tol))
        strong = adv.final_bound(eps, True)
        rep.quantities.update(grover_error=eps, grover_final_W=float(wT), strong_bound=strong,
                              strong_bound_held=bool(wT <= strong + tol))
    return rep


def suite_lemma1(con: Construction, indices=None, tol=CHECK_TOL) -> SuiteReport:
    """Block-diagonal structure, equality of global and block ratios, and the block bound."""
    rep = SuiteReport("lemma1")
    idx = list(range(1, con.spec.n + 1)) if indices is None else list(indices)
    ratios = []
    for i in idx:
        Pi = con.partition(i)
        pr = validate_projector_set(Pi, tol)
        rep.add(check_le(f"projectors i={i}", max(*pr.idempotence, *pr.hermiticity,
                                                   pr.orthogonality, pr.completeness), 0.0, tol))
        bd = verify_block_diagonal(con.gamma, con.spec, i, Pi, tol)
        rep.add(check_le(f"block diagonal i={i}", max(bd.gamma_residual, bd.oracle_residual), 0.0, tol))
        br = block_ratio_bound(con.gamma, con.spec, i, Pi)
        rep.add(check_le(f"equality i={i}", br.equality_residual, 0.0, tol))
        rep.add(check_le(f"block bound i={i}", -br.bound_slack, 0.0, tol))
        ratios.append(br.global_ratio)
    rep.add(check_le("coordinate symmetry", max(ratios) - min(ratios), 0.0, tol))
    rep.quantities.update(global_ratio=max(ratios), blocks=len(con.partition(idx[0])))
    return rep


def suite_dpt(con: Construction, k=2, zeta=0.9, tol=CHECK_TOL) -> SuiteReport:
    rep = SuiteReport("dpt")
    adv = _fit_mult(con, zeta)
    nr = verify_tensor_norm_identity(adv, con.spec, k)
    rep.add(check_le("norm identity", nr.ratio_residual, 0.0, tol))
    rep.add(check_le("product spectrum", nr.eigen_residual, 0.0, tol))
    rep.add(check_close("lambda_min = 1", nr.lambda_min, 1.0, tol))
    rep.add(check_close("||Gamma'|| = ||Gamma||^k", nr.norm, adv.eig_.max ** k, tol * adv.eig_.max ** k))
    quantities = dict(k=k, base_ratio=nr.base_ratio, composed_ratio=nr.composed_ratio)
    try:
        dm = dpt_madv(adv, con.spec, k)
        rep.add(check_le("madv direct = (k/10) base", dm.residual, 0.0, tol))
        quantities.update(madv=dm.value, madv_direct=dm.direct)
    except (TrivialRatio, VacuousBound) as exc:  # base bound undefined
        quantities.update(madv_error=type(exc).__name__)
    cb = composed_bad_subspace(adv, con.spec, k)
    rep.add(Check("bad rank matches product count", cb.consistent, float(cb.rank_numeric - cb.rank_formula)))
    rep.add(check_le("eta' <= combinatorial bound", cb.eta_numeric, cb.eta_bound, tol))
    quantities.update(bad_rank=cb.rank_numeric, eta_composed=cb.eta_numeric, eta_bound=cb.eta_bound)
    rep.quantities.update(quantities)
    return rep


def eta_reference(con: Construction):
    """Family bound on ``eta``: exact value for search, upper bounds otherwise."""
    p = con.params
    if con.family == "search":
        return 1 / p["n"], True
    if con.family == "tfold":
        t = p["t"]
        return (comb(p["n"], t // 2) / comb(p["n"], t), False) if t % 2 == 0 else (None, False)
    return 0.5, False


def suite_eta(con: Construction, tol=CHECK_TOL) -> SuiteReport:
    rep = SuiteReport("eta")
    value = eta(bad_projector(con.gamma, con.lam), con.spec)
    ref, exact = eta_reference(con)
    if ref is not None:
        if exact:
            rep.add(check_close("eta = 1/n", value, ref, 1e-12))
        else:
            rep.add(check_le("eta <= bound", value, ref, tol))
    rep.quantities.update(eta=value, bound=ref)
    return rep


def suite_eigs(con: Construction, tol=1e-8, rng_seed=0) -> SuiteReport:
    """Closed-form block eigenvalues and block matrices against numeric spectra."""
    rep = SuiteReport("eigs")
    p = con.params
    q = p["q"]
    if con.family == "search":
        r = search_block_norm(p["n"], q)
        rep.add(check_close("exact vs numeric", r.exact, r.numeric, tol))
        rep.add(check_close("exact vs global ratio", r.exact, ratio_norms(con.gamma, con.spec).max, tol))
        rep.quantities.update(exact=r.exact, asymptotic=r.asymptotic, gap=r.gap)
    elif con.family == "tfold":
        n, t = p["n"], p["t"]
        rng = np.random.default_rng(rng_seed)
        for j in range(t):
            be = tfold_block_eigs(n, t, q, j)
            rep.add(check_le(f"level {j} closed form", be.max_deviation, 0.0, tol))
            d = be.numeric.shape[0]
            Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            rot = tfold_block_eigs(n, t, q, j, rotate=Q)
            rep.add(check_le(f"level {j} basis independence", rot.max_deviation, 0.0, tol))
            rep.quantities[f"eigs_j{j}"] = be.closed_form.tolist()
    elif con.family == "threshold":
        n, t = p["n"], p["t"]
        for j in range(t - 1):
            m = threshold_block_matrices(n, t, q, j)
            rep.add(check_le(f"level {j} Gamma = U G U*", m.gamma_residual, 0.0, tol))
            rep.add(check_le(f"level {j} O_1 = Z", m.oracle_residual, 0.0, tol))
            rep.add(check_le(f"level {j} ratio spectrum", m.ratio_residual, 0.0, tol))
            if j < cutoff(t):
                h = threshold_hj(n, t, q, j)
                rep.add(check_le(f"level {j} H_j decomposition", h.rank2_residual, 0.0, tol))
                rep.add(check_le(f"level {j} H_j block", h.display_residual, 0.0, tol))
                rep.quantities[f"H_norm_j{j}"] = h.norm
                rep.quantities[f"cross_constant_j{j}"] = h.cross_constant
    elif con.family == "or":
        r = or_block_eigs(p["n"], q)
        rep.add(check_le("closed form vs numeric", r.max_deviation, 0.0, tol))
        rep.add(check_close("nontrivial product = 1", r.product, 1.0, 1e-9))
        rep.add(check_le("Gamma = U G U*", r.matrix_residual, 0.0, tol))
        rep.quantities.update(gamma=r.gamma, eigenvalues=r.closed_form.tolist(),
                              asymptotic=1 + 2 * (q - 1) / sqrt(q * p["n"]))
    return rep
