"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input or
parameters (the report is still printed, with an ``error`` entry).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .additive import ADDITIVE_GAMMAS, AdditiveAdversary
from .constructions import FAMILIES, build
from .exceptions import BadParameters, MultAdvError
from .multiplicative import (
    MultiplicativeAdversary,
    block_ratio_bound,
    madv2_value,
    madv_from_ratio,
    ratio_norms,
    start_vector,
    validate_mult,
)
from .query import builtin, load_function
from .simulator import (
    grover_algorithm,
    grover_success,
    random_algorithm,
    run,
    success_probability,
    trace_from_states,
)
from .validation import DEFAULT_TOL
from .verify import (
    Check,
    check_le,
    grover_endtoend,
    suite_dpt,
    suite_eigs,
    suite_eta,
    suite_lemma1,
    suite_thm1,
    suite_thm2,
)

log = logging.getLogger("multadv")

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _clean(obj):
    """Round floats to 15 significant digits; NaN and infinities become null."""
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.15g}") if math.isfinite(v) else None
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return obj if obj is None or isinstance(obj, str) else str(obj)


@dataclass
class RunReport:
    command: str
    parameters: dict
    quantities: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    error: dict | None = None
    timing: float | None = None

    def add_checks(self, checks, prefix=""):
        self.checks.extend(Check(prefix + c.name, c.passed, c.residual, c.detail) for c in checks)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self):
        if self.error is not None:
            return EXIT_INVALID
        return EXIT_OK if self.passed else EXIT_FAILED

    def to_dict(self):
        out = {
            "command": self.command,
            "parameters": self.parameters,
            "quantities": self.quantities,
            "checks": [{"name": c.name, "passed": c.passed, "residual": c.residual} for c in self.checks],
            "passed": self.passed and self.error is None,
        }
        if self.error is not None:
            out["error"] = self.error
        if self.timing is not None:
            out["timing_seconds"] = self.timing
        return _clean(out)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = [f"{self.command}"]
        for k, v in self.parameters.items():
            if v is not None:
                lines.append(f"  {k:<12} {v}")
        for k, v in _clean(self.quantities).items():
            lines.append(f"  {k:<28} {v}")
        if self.checks:
            npass = sum(c.passed for c in self.checks)
            lines.append(f"checks: {npass}/{len(self.checks)} passed")
            for c in self.checks:
                lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name:<44} residual {c.residual:.3e}")
        if self.error is not None:
            lines.append(f"error: {self.error['type']}: {self.error['message']}")
        return "\n".join(lines)


# --- argument helpers ----------------------------------------------------


def _spec(args):
    if args.file:
        return load_function(args.file)
    if not args.family:
        raise BadParameters("give --family or --file")
    return builtin(args.family, args.n, args.t)


def _construction(args, q=None):
    if not args.family:
        raise BadParameters("multiplicative commands need a built-in --family")
    return build(args.family, args.n, args.t, args.q if q is None else q)


def parse_gamma_option(text):
    """``name`` or ``name:key=val,key=val`` (e.g. ``search:q=2``)."""
    name, _, rest = text.partition(":")
    opts = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise BadParameters(f"bad --gamma option {item!r}; expected key=value")
        opts[k.strip()] = float(v) if k.strip() in ("q", "lambda", "zeta") else int(v)
    return name.strip(), opts


def _params(args, keys):
    return {k: getattr(args, k, None) for k in keys}


# --- commands ------------------------------------------------------------


def cmd_bound(args) -> RunReport:
    rep = RunReport(f"bound {args.kind}", _params(args, ["family", "file", "n", "t", "q", "lam", "zeta",
                                                          "epsilon", "gamma", "boolean", "tol"]))
    if args.kind == "additive":
        spec = _spec(args)
        adv = AdditiveAdversary(args.gamma or "complete", args.epsilon, args.boolean, args.tol).fit(spec)
        rep.quantities.update(value=adv.value_, norm=adv.norm_, ratio=adv.ratio_,
                              hadamard_norms=adv.hadamard_norms_, sign_flipped=adv.sign_flipped_)
        return rep
    if args.gamma_file:
        spec = _spec(args)
        gamma, lam = np.loadtxt(args.gamma_file, dtype=complex, ndmin=2), args.lam
    else:
        con = _construction(args)
        spec, gamma, lam = con.spec, con.gamma, con.lam
        lam = args.lam if args.lam is not None else lam
    v = validate_mult(gamma, args.tol)
    lam_scaled = (v.eig.max if lam is None else lam) / v.rescale
    ratios = ratio_norms(v.gamma, spec, args.tol)
    rep.quantities.update(max_ratio=ratios.max, ratios={f"{i},{p}": r for (i, p), r in ratios.ratios.items()},
                          lam=lam_scaled)
    if args.kind == "mult":
        rep.quantities["value"] = madv_from_ratio(lam_scaled, args.zeta, ratios.max, args.tol)
        adv = MultiplicativeAdversary(v.gamma, lam_scaled, args.zeta, args.tol).fit(spec)
        rep.quantities.update(eta=adv.eta_, success_threshold=adv.success_threshold_,
                              progress_threshold=adv.progress_threshold_, bad_rank=adv.bad_subspace_.rank,
                              boundary_flagged=adv.boundary_flagged_)
        return rep
    # mult2: block-wise bound
    if args.gamma_file:
        raise BadParameters("mult2 needs a built-in family (block structure)")
    parts = con.partitions()
    res = madv2_value(v.gamma, spec, lam_scaled, args.zeta, parts, args.tol)
    rep.quantities["value"] = res.value
    rep.quantities["value_mult"] = madv_from_ratio(lam_scaled, args.zeta, ratios.max, args.tol)
    br = block_ratio_bound(v.gamma, spec, 1, parts[1], args.tol)
    rep.quantities["blocks_i1"] = [
        {"label": str(b.label), "rank": b.rank, "ratio": b.ratio, "lambda_min": b.lambda_min,
         "hadamard_norm": b.hadamard_norm, "bound": b.bound}
        for b in br.blocks
        if b.hadamard_norm > args.tol
    ]
    rep.quantities["trivial_blocks_i1"] = sum(b.hadamard_norm <= args.tol for b in br.blocks)
    rep.quantities["excluded_blocks"] = len(res.excluded)
    return rep


def cmd_verify(args) -> RunReport:
    rep = RunReport(f"verify {args.suite}", _params(args, ["family", "n", "t", "q", "k", "gamma", "seeds", "tol"]))
    tol = args.tol if args.tol != DEFAULT_TOL else 1e-9
    if args.suite == "thm1":
        suite = suite_thm1(_spec(args), args.gamma or "complete", args.seeds, args.T, args.dim_W, tol)
    elif args.suite == "thm2":
        suite = suite_thm2(_construction(args), args.seeds, args.T, args.dim_W, tol)
        if args.family == "search":
            extra = grover_endtoend(args.n, 1 if args.n <= 4 else args.iters or 1, tol=tol)
            rep.add_checks(extra.checks, "grover: ")
            rep.quantities.update({f"grover_{k}": v for k, v in extra.quantities.items()})
    elif args.suite == "lemma1":
        suite = suite_lemma1(_construction(args), tol=tol)
    elif args.suite == "dpt":
        suite = suite_dpt(_construction(args), args.k, args.zeta, tol)
    elif args.suite == "eta":
        suite = suite_eta(_construction(args), tol)
    else:
        suite = suite_eigs(_construction(args), max(tol, 1e-8))
    rep.add_checks(suite.checks)
    rep.quantities.update(suite.quantities)
    return rep


def _attach_trace(rep, args, alg, spec, gamma_text, success=None):
    name, opts = parse_gamma_option(gamma_text)
    if name in ADDITIVE_GAMMAS:
        adv = AdditiveAdversary(name).fit(spec)
        tr = trace_from_states(run(alg, spec, adv.principal_vector_), adv.gamma_)
        rep.quantities.update(W=tr.W, max_step=adv.max_step_)
        rep.checks.append(check_le("steps <= 2 max ||Gamma o D_i||", float(np.max(np.abs(tr.differences))),
                                   adv.max_step_))
        return tr
    if name not in FAMILIES:
        raise BadParameters(f"unknown --gamma {name!r}")
    con = build(name, int(opts.get("n", spec.n)), opts.get("t", args.t), opts.get("q", args.q))
    if con.spec.inputs != spec.inputs:
        raise BadParameters("--gamma construction does not match the simulated function")
    zeta = opts.get("zeta", args.zeta)
    adv = MultiplicativeAdversary(con.gamma, con.lam, zeta, args.tol).fit(spec)
    delta = start_vector(adv.eig_)
    states = run(alg, spec, delta)
    tr = trace_from_states(states, adv.gamma_)
    rep.quantities.update(W=tr.W, max_ratio=adv.max_ratio_, eta=adv.eta_,
                          success_threshold=adv.success_threshold_, progress_threshold=adv.progress_threshold_)
    observed = float(np.nanmax(tr.ratios))
    rep.checks.append(check_le("ratios <= max ratio norm", observed, adv.max_ratio_))
    if alg.output_projectors is not None:
        s = success_probability(states[-1], spec, alg.output_projectors)
        rep.quantities["success_on_delta"] = s
        if s >= adv.success_threshold_:
            rep.checks.append(check_le("W^T >= zeta^2 lambda", adv.progress_threshold_, float(tr.W[-1])))
    return tr


def cmd_simulate(args) -> RunReport:
    rep = RunReport(f"simulate {args.algorithm}",
                    _params(args, ["family", "n", "t", "q", "zeta", "iters", "seed", "T", "dim_W", "gamma"]))
    if args.algorithm == "grover":
        spec = builtin("search", args.n)
        alg = grover_algorithm(args.n, args.iters)
        uniform = np.full(spec.size, 1 / math.sqrt(spec.size))
        s = success_probability(run(alg, spec, uniform)[-1], spec, alg.output_projectors)
        rep.quantities.update(success=s, success_formula=grover_success(args.n, args.iters))
    else:
        spec = _spec(args)
        alg = random_algorithm(args.seed, args.T, args.dim_W, spec.n, spec.sigma)
    gamma = args.gamma
    if gamma is None and args.algorithm == "random" and args.family:
        gamma = args.family
    tr = _attach_trace(rep, args, alg, spec, gamma) if gamma else None
    if tr is not None and args.out:
        Path(args.out).write_text(tr.to_csv(), encoding="utf-8")
        log.info("wrote trace to %s", args.out)
    return rep


# --- parser --------------------------------------------------------------


def _common(p):
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--file", help="truth-table file (header 'n sigma', rows '<digits> <label>')")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--zeta", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--gamma", default=None)
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--T", type=int, default=5)
    p.add_argument("--dim-W", dest="dim_W", type=int, default=2)
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    p.add_argument("--out", default=None, help="CSV path for progress traces")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="multadv", description="Adversary lower bounds for quantum query complexity.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="compute an adversary bound")
    b.add_argument("kind", choices=["additive", "mult", "mult2"])
    b.add_argument("--boolean", action="store_true", help="strengthened additive factor for Boolean output")
    b.add_argument("--gamma-file", default=None, help="text matrix for a custom multiplicative Gamma")
    _common(b)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["thm1", "thm2", "lemma1", "dpt", "eta", "eigs"])
    v.add_argument("--iters", type=int, default=None)
    _common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="simulate a query algorithm")
    s.add_argument("algorithm", choices=["grover", "random"])
    s.add_argument("--iters", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    _common(s)
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rep = args.func(args)
        except (MultAdvError, ValueError, ArithmeticError, FileNotFoundError) as exc:
            rep = RunReport(f"{args.command} {getattr(args, 'kind', None) or getattr(args, 'suite', None) or args.algorithm}",
                            {k: v for k, v in vars(args).items() if k not in ("func", "json", "verbose", "timing", "command")})
            rep.error = {"type": type(exc).__name__, "message": str(exc)}
    for w in caught:
        log.warning("%s: %s", w.category.__name__, w.message)
    if args.timing:
        rep.timing = time.perf_counter() - start
    print(rep.to_json() if args.json else rep.to_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
