"""Statevector simulation of query algorithms run on a superposition of inputs.

The global state is stored as an array of shape ``(|X|, n, sigma, dim_W)``
with row-major layout ``(x, i, p, w)``. Query index ``i`` is 0-based in
storage; the initial query cell ``|1, 0>`` is therefore ``(i=0, p=0)``.

Only the phase oracle ``|x>|i,p> -> exp(2 pi i p x_i / sigma)|x>|i,p>`` is
implemented. The register-encoding oracle ``|x>|i,p> -> |x>|i,p + x_i>``
is equivalent up to a Fourier transform on the ``p`` register, which can be
folded into the neighbouring accessible-memory unitaries.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import asin, sin, sqrt

import numpy as np

from .exceptions import DimensionMismatch, ImaginaryResidue, IncompleteProjectors, NonUnitary
from .linalg import ProjectorSet, random_unitary, spectral_norm, unitarity_residual
from .query import FunctionSpec
from .validation import DEFAULT_TOL, check_square, check_unit_vector


@dataclass(frozen=True)
class AlgorithmSpec:
    """Unitaries ``U_0 .. U_T`` on the accessible memory ``H_Q (x) H_W``."""

    unitaries: tuple
    n: int
    sigma: int = 2
    dim_W: int = 1
    output_projectors: ProjectorSet | None = None
    name: str = ""

    def __post_init__(self):
        us = tuple(check_square(U, "unitary") for U in self.unitaries)
        if not us:
            raise DimensionMismatch("an algorithm needs at least U_0")
        object.__setattr__(self, "unitaries", us)
        for t, U in enumerate(us):
            if U.shape[0] != self.dim_A:
                raise DimensionMismatch(
                    f"U_{t} has dimension {U.shape[0]}, accessible memory is {self.dim_A}"
                )
            res = unitarity_residual(U)
            if res > 1e-8:
                raise NonUnitary(f"U_{t} is not unitary (residual {res:.2e})")
        if self.output_projectors is not None and self.output_projectors.dim != self.dim_A:
            raise DimensionMismatch("output projectors do not act on the accessible memory")

    @property
    def T(self):
        return len(self.unitaries) - 1

    @property
    def dim_A(self):
        return self.n * self.sigma * self.dim_W


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray  # (|X|, n, sigma, dim_W)

    @property
    def dims(self):
        return self.amplitudes.shape

    @property
    def matrix(self):
        """``(|X|, dim_A)`` view whose row ``x`` is ``delta_x |psi_x>``."""
        return self.amplitudes.reshape(self.dims[0], -1)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def _check_compatible(alg: AlgorithmSpec, spec: FunctionSpec):
    if alg.n != spec.n or alg.sigma != spec.sigma:
        raise DimensionMismatch(
            f"algorithm is for (n={alg.n}, sigma={alg.sigma}), "
            f"function has (n={spec.n}, sigma={spec.sigma})"
        )


def oracle_phases(spec: FunctionSpec):
    """``(|X|, n, sigma)`` array of oracle phases."""
    p = np.arange(spec.sigma)
    return np.exp(2j * np.pi * spec.digits[:, :, None] * p[None, None, :] / spec.sigma)


def run(alg: AlgorithmSpec, spec: FunctionSpec, delta) -> list:
    """States ``Psi^0 .. Psi^T``; ``Psi^0`` is taken after ``U_0``."""
    _check_compatible(alg, spec)
    delta = check_unit_vector(delta, name="delta")
    if delta.shape[0] != spec.size:
        raise DimensionMismatch(f"delta has length {delta.shape[0]}, |X| = {spec.size}")
    shape = (spec.size, spec.n, spec.sigma, alg.dim_W)
    psi = np.zeros((spec.size, alg.dim_A), dtype=complex)
    psi[:, 0] = delta
    psi = psi @ alg.unitaries[0].T
    states = [StateVector(psi.reshape(shape))]
    phases = oracle_phases(spec)[..., None]
    for U in alg.unitaries[1:]:
        queried = (psi.reshape(shape) * phases).reshape(spec.size, -1)
        psi = queried @ U.T
        states.append(StateVector(psi.reshape(shape)))
    return states


def reduced_input_density(state: StateVector):
    """``rho[x, y] = delta_x delta_y^* <psi_y | psi_x>``."""
    M = state.matrix
    return M @ M.conj().T


def progress(Gamma, rho, tol=DEFAULT_TOL) -> float:
    """``W = Tr(Gamma^* rho)``, returned as a real number."""
    G = check_square(Gamma, "Gamma")
    R = check_square(rho, "rho")
    if G.shape != R.shape:
        raise DimensionMismatch(f"Gamma {G.shape} and rho {R.shape} differ")
    val = complex(np.sum(G.conj() * R))
    scale = max(spectral_norm(G), 1.0)
    if abs(val.imag) > tol * scale:
        raise ImaginaryResidue(f"progress has imaginary part {val.imag:.3e}")
    return val.real


def success_probability(state: StateVector, spec: FunctionSpec, projectors: ProjectorSet,
                        tol=DEFAULT_TOL) -> float:
    """Probability that measuring ``x`` and the output register gives ``b = f(x)``."""
    M = state.matrix
    if projectors.dim != M.shape[1]:
        raise DimensionMismatch("projectors do not act on the accessible memory")
    total = sum(projectors.projectors)
    if spectral_norm(total - np.eye(projectors.dim)) > tol:
        raise IncompleteProjectors("output projectors do not sum to the identity")
    by_label = dict(zip(map(str, projectors.labels), projectors.projectors))
    prob = 0.0
    for z in spec.outputs:
        P = by_label.get(z)
        if P is None:
            continue
        rows = M[spec.output_mask(z)]
        prob += float(np.sum(np.abs(rows @ P.T) ** 2))
    return prob


def error_per_input(state: StateVector, spec: FunctionSpec, projectors: ProjectorSet):
    """Per-input error probabilities, normalised by ``|delta_x|^2``."""
    M = state.matrix
    by_label = dict(zip(map(str, projectors.labels), projectors.projectors))
    out = np.zeros(spec.size)
    for k, z in enumerate(spec.values):
        w = float(np.vdot(M[k], M[k]).real)
        if w <= 0:
            out[k] = np.nan
            continue
        P = by_label.get(z)
        good = 0.0 if P is None else float(np.linalg.norm(P @ M[k]) ** 2)
        out[k] = 1.0 - good / w
    return out


@dataclass(frozen=True)
class ProgressTrace:
    W: np.ndarray
    ratios: np.ndarray  # ratios[t] = W^{t+1}/W^t, NaN where skipped
    differences: np.ndarray  # differences[t] = W^t - W^{t+1}

    @property
    def T(self):
        return len(self.W) - 1

    @property
    def skipped(self):
        return int(np.count_nonzero(np.isnan(self.ratios)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "W", "ratio", "difference"])
        for t, val in enumerate(self.W):
            if t == 0:
                w.writerow([t, f"{val:.15g}", "", ""])
            else:
                r = self.ratios[t - 1]
                w.writerow([t, f"{val:.15g}", "" if np.isnan(r) else f"{r:.15g}",
                            f"{self.differences[t - 1]:.15g}"])
        return buf.getvalue()


def trace_from_states(states, Gamma, tol=DEFAULT_TOL) -> ProgressTrace:
    W = np.array([progress(Gamma, reduced_input_density(s), tol) for s in states])
    ratios = np.full(len(W) - 1, np.nan)
    for t in range(len(W) - 1):
        if abs(W[t]) >= 1e-12:
            ratios[t] = W[t + 1] / W[t]
    return ProgressTrace(W, ratios, W[:-1] - W[1:])


def trace_progress(alg: AlgorithmSpec, spec: FunctionSpec, Gamma, delta,
                   tol=DEFAULT_TOL) -> ProgressTrace:
    return trace_from_states(run(alg, spec, delta), Gamma, tol)


# --- reference algorithms -------------------------------------------------


def index_projectors(n, sigma=2, dim_W=1) -> ProjectorSet:
    """``Pi_b = |b><b|_index (x) I_p (x) I_W`` labelled ``"1".."n"``."""
    block = sigma * dim_W
    bases = []
    for b in range(n):
        B = np.zeros((n * block, block), dtype=complex)
        B[b * block:(b + 1) * block] = np.eye(block)
        bases.append(B)
    return ProjectorSet.from_bases(bases, tuple(str(b + 1) for b in range(n)))


def grover_algorithm(n, iterations) -> AlgorithmSpec:
    """Grover search over the query index with the phase multiplier fixed to 1."""
    if n < 2 or iterations < 0:
        raise ValueError("need n >= 2 and iterations >= 0")
    dim = 2 * n
    start = np.zeros(dim)
    start[0] = 1.0
    target = np.zeros(dim)
    target[1::2] = 1 / sqrt(n)  # cells (i, p=1)
    u = start - target
    prep = np.eye(dim) - 2 * np.outer(u, u) / (u @ u)
    s = np.full(n, 1 / sqrt(n))
    diffusion = np.kron(2 * np.outer(s, s) - np.eye(n), np.eye(2))
    us = (prep,) + (diffusion,) * iterations
    return AlgorithmSpec(us, n, 2, 1, index_projectors(n), name=f"grover({n},{iterations})")


def grover_success(n, iterations):
    """Textbook ``sin^2((2k+1) theta)`` with ``sin theta = 1/sqrt(n)``."""
    theta = asin(1 / sqrt(n))
    return sin((2 * iterations + 1) * theta) ** 2


def grover_optimal_iterations(n):
    theta = asin(1 / sqrt(n))
    return max(0, int(round(np.pi / (4 * theta) - 0.5)))


def random_algorithm(seed, T, dim_W, n, sigma=2, output_projectors=None) -> AlgorithmSpec:
    """``T + 1`` Haar-random unitaries drawn from ``numpy.random.default_rng(seed)`` (PCG64)."""
    if T < 1:
        raise ValueError("need T >= 1")
    rng = np.random.default_rng(seed)
    dim = n * sigma * dim_W
    us = tuple(random_unitary(dim, rng) for _ in range(T + 1))
    return AlgorithmSpec(us, n, sigma, dim_W, output_projectors, name=f"random(seed={seed})")
