"""Finite functions and their query-model matrices.

A :class:`FunctionSpec` is an explicit truth table ``f: X -> Sigma_O`` with
``X`` a subset of ``{0..sigma-1}^n``. Rows and columns of every matrix built
here are indexed by ``spec.inputs`` in the stored (lexicographic) order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np

from .exceptions import BadParameters, IndexOutOfRange, InvariantViolation, ParseError
from .linalg import spectral_norm


@dataclass(frozen=True)
class FunctionSpec:
    n: int
    sigma: int
    inputs: tuple
    values: tuple
    outputs: tuple = ()
    name: str = ""

    def __post_init__(self):
        inputs = tuple(str(x) for x in self.inputs)
        values = tuple(str(v) for v in self.values)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "values", values)
        if not self.outputs:
            seen = dict.fromkeys(values)
            object.__setattr__(self, "outputs", tuple(seen))
        else:
            object.__setattr__(self, "outputs", tuple(str(z) for z in self.outputs))
        self._check()

    def _check(self):
        if self.n < 1:
            raise InvariantViolation("n must be >= 1")
        if self.sigma < 2:
            raise InvariantViolation("sigma must be >= 2")
        if len(self.inputs) != len(self.values):
            raise InvariantViolation("inputs and values differ in length")
        if len(set(self.inputs)) != len(self.inputs):
            dup = next(x for x in self.inputs if self.inputs.count(x) > 1)
            raise InvariantViolation(f"duplicate input {dup!r}")
        for x in self.inputs:
            if len(x) != self.n:
                raise InvariantViolation(f"input {x!r} does not have length {self.n}")
            if any(not c.isdigit() or int(c) >= self.sigma for c in x):
                raise InvariantViolation(f"input {x!r} has a digit outside 0..{self.sigma - 1}")
        unknown = set(self.values) - set(self.outputs)
        if unknown:
            raise InvariantViolation(f"values {sorted(unknown)} not in the output alphabet")
        if len(self.inputs) < 2:
            raise InvariantViolation("need at least two inputs")
        if len(set(self.values)) < 2:
            raise InvariantViolation("need at least two distinct output values")

    @property
    def size(self):
        return len(self.inputs)

    @cached_property
    def digits(self):
        """``(|X|, n)`` integer array of input symbols."""
        return np.array([[int(c) for c in x] for x in self.inputs], dtype=int)

    def index(self, x):
        return self.inputs.index(x)

    def value(self, x):
        return self.values[self.index(x)]

    def output_mask(self, z):
        return np.array([v == z for v in self.values])


@dataclass(frozen=True)
class QueryMatrices:
    difference: tuple  # D_i, i = 1..n (0-based tuple)
    phase: tuple  # phase[i][p] = O_{i,p}
    output_proj: dict  # z -> F_z

    def D(self, i):
        return self.difference[i - 1]

    def O(self, i, p=1):
        return self.phase[i - 1][p]


def build_query_matrices(spec: FunctionSpec) -> QueryMatrices:
    d = spec.digits
    diff = tuple((d[:, i][:, None] != d[:, i][None, :]).astype(float) for i in range(spec.n))
    phase = tuple(
        tuple(np.diag(np.exp(2j * np.pi * p * d[:, i] / spec.sigma)) for p in range(spec.sigma))
        for i in range(spec.n)
    )
    F = {z: np.diag(spec.output_mask(z).astype(float)) for z in spec.outputs}
    return QueryMatrices(diff, phase, F)


def phase_vector(spec: FunctionSpec, i, p=1):
    """Diagonal of ``O_{i,p}`` (1-based ``i``)."""
    return np.exp(2j * np.pi * p * spec.digits[:, i - 1] / spec.sigma)


def difference_matrix(spec: FunctionSpec, i):
    col = spec.digits[:, i - 1]
    return (col[:, None] != col[None, :]).astype(float)


def verify_difference_identity(spec: FunctionSpec, i) -> float:
    """Residual of ``D_i = Y_{i,0} - (1/sigma) sum_p Y_{i,p}``, ``Y_{i,p} = O* E O``."""
    if not 1 <= i <= spec.n:
        raise IndexOutOfRange(f"index {i} outside 1..{spec.n}")
    m = spec.size
    E = np.ones((m, m), dtype=complex)
    acc = np.zeros((m, m), dtype=complex)
    for p in range(spec.sigma):
        o = phase_vector(spec, i, p)
        acc += o.conj()[:, None] * E * o[None, :]
    return spectral_norm(difference_matrix(spec, i) - (E - acc / spec.sigma))


# --- truth-table files ----------------------------------------------------


def parse_function(text: str, name="") -> FunctionSpec:
    """Parse the truth-table format: a header ``n sigma`` then ``digits label`` rows."""
    header = None
    inputs, values = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = line.split()
        col = len(line) - len(line.lstrip()) + 1
        if header is None:
            if len(tokens) != 2:
                raise ParseError("header must be 'n sigma'", lineno, col)
            try:
                header = (int(tokens[0]), int(tokens[1]))
            except ValueError:
                raise ParseError("header values must be integers", lineno, col) from None
            if header[0] < 1 or header[1] < 2:
                raise ParseError("need n >= 1 and sigma >= 2", lineno, col)
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected '<digits> <label>', got {len(tokens)} fields", lineno, col)
        digits, label = tokens
        n, sigma = header
        if len(digits) != n:
            raise ParseError(f"input {digits!r} has length {len(digits)}, expected {n}", lineno, col)
        for off, c in enumerate(digits):
            if not c.isdigit() or int(c) >= sigma:
                raise InvariantViolation(
                    f"line {lineno}, column {col + off}: digit {c!r} outside 0..{sigma - 1}"
                )
        if digits in inputs:
            raise InvariantViolation(f"line {lineno}: duplicate input {digits!r}")
        inputs.append(digits)
        values.append(label)
    if header is None:
        raise ParseError("empty file: missing 'n sigma' header", 1, 1)
    return FunctionSpec(header[0], header[1], tuple(inputs), tuple(values), name=name)


def load_function(path) -> FunctionSpec:
    path = Path(path)
    return parse_function(path.read_text(encoding="utf-8"), name=path.stem)


def dump_function(spec: FunctionSpec) -> str:
    lines = [f"{spec.n} {spec.sigma}"]
    lines += [f"{x} {v}" for x, v in zip(spec.inputs, spec.values)]
    return "\n".join(lines) + "\n"


# --- built-in families ----------------------------------------------------


def _weight_strings(n, weights):
    """Strings of the given Hamming weights in lexicographic order."""
    out = []
    for w in weights:
        for ones in itertools.combinations(range(n), w):
            bits = ["0"] * n
            for k in ones:
                bits[k] = "1"
            out.append("".join(bits))
    return sorted(out)


def search(n) -> FunctionSpec:
    """Exactly one 1 among ``n`` bits; output its 1-based position."""
    if n < 2:
        raise BadParameters("search needs n >= 2")
    X = _weight_strings(n, {1})
    return FunctionSpec(n, 2, X, [str(x.index("1") + 1) for x in X],
                        outputs=[str(i) for i in range(1, n + 1)], name=f"search({n})")


def subset_label(J):
    return "{" + ",".join(str(j) for j in sorted(J)) + "}"


def tfold(n, t) -> FunctionSpec:
    """Exactly ``t`` ones; output the set of their positions."""
    if not 1 <= t <= n:
        raise BadParameters("tfold needs 1 <= t <= n")
    if comb(n, t) < 2:
        raise BadParameters("tfold needs at least two inputs (t < n)")
    X = _weight_strings(n, {t})
    vals = [subset_label(k + 1 for k, c in enumerate(x) if c == "1") for x in X]
    outs = [subset_label(J) for J in itertools.combinations(range(1, n + 1), t)]
    return FunctionSpec(n, 2, X, vals, outputs=outs, name=f"tfold({n},{t})")


def threshold(n, t) -> FunctionSpec:
    """Hamming weight in ``{t-1, t}``; output ``|x| - t + 1``."""
    if not 1 <= t <= n:
        raise BadParameters("threshold needs 1 <= t <= n")
    X = _weight_strings(n, {t - 1, t})
    vals = [str(x.count("1") - t + 1) for x in X]
    return FunctionSpec(n, 2, X, vals, outputs=["0", "1"], name=f"threshold({n},{t})")


def or_function(n) -> FunctionSpec:
    if n < 2:
        raise BadParameters("or needs n >= 2")
    spec = threshold(n, 1)
    return FunctionSpec(spec.n, 2, spec.inputs, spec.values, spec.outputs, name=f"or({n})")


FAMILIES = {"search", "tfold", "threshold", "or"}


def builtin(family, n, t=None) -> FunctionSpec:
    if family == "search":
        return search(n)
    if family == "or":
        return or_function(n)
    if t is None:
        raise BadParameters(f"{family} needs t")
    if family == "tfold":
        return tfold(n, t)
    if family == "threshold":
        return threshold(n, t)
    raise BadParameters(f"unknown family {family!r}")
