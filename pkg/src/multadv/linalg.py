"""Dense complex linear algebra used by every adversary computation.

All functions are pure. Tolerances are relative to the spectral norm of the
operand unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import NonConvergent, NotPositiveDefinite, ShapeMismatch
from .validation import DEFAULT_TOL, as_matrix, check_hermitian, check_same_shape, check_square


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    @property
    def min(self):
        return float(self.eigenvalues[0])

    @property
    def max(self):
        return float(self.eigenvalues[-1])

    @property
    def norm(self):
        return float(np.max(np.abs(self.eigenvalues))) if self.dim else 0.0

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def select(self, mask):
        """Orthonormal basis (columns) of the eigenvectors picked by ``mask``."""
        return self.eigenvectors[:, np.asarray(mask, dtype=bool)]

    def eigenspace(self, value, band):
        """Basis of the eigenspace with ``|lambda - value| <= band``."""
        return self.select(np.abs(self.eigenvalues - value) <= band)

    def degenerate_ranges(self, band):
        """Index ranges ``(start, stop)`` of eigenvalue clusters closer than ``band``."""
        ranges = []
        start = 0
        for k in range(1, self.dim + 1):
            if k == self.dim or self.eigenvalues[k] - self.eigenvalues[k - 1] > band:
                ranges.append((start, k))
                start = k
        return ranges


def hermitian_eig(M, tol=DEFAULT_TOL) -> HermitianEigenSystem:
    """Spectral decomposition of a Hermitian matrix.

    Backed by LAPACK ``zheevd`` through :func:`numpy.linalg.eigh`, which
    returns eigenvalues in ascending order.
    """
    A = check_hermitian(M, tol)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NonConvergent(str(exc)) from exc
    return HermitianEigenSystem(w, V)


def spectral_norm(M) -> float:
    """Largest singular value."""
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _pd_eig(M, tol, name):
    eig = hermitian_eig(M, tol)
    scale = max(eig.norm, 1.0)
    if eig.dim and eig.min <= tol * scale:
        raise NotPositiveDefinite(f"{name} is not positive definite (lambda_min = {eig.min:.3e})")
    return eig


def inv_sqrt_pd(M, tol=DEFAULT_TOL):
    """``M^{-1/2}`` for positive definite ``M``."""
    eig = _pd_eig(M, tol, "matrix")
    V = eig.eigenvectors
    return (V / np.sqrt(eig.eigenvalues)) @ V.conj().T


def sqrt_psd(M, tol=DEFAULT_TOL):
    """Square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol*||M||, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPositiveDefinite`.
    """
    eig = hermitian_eig(M, tol)
    band = tol * max(eig.norm, 1.0)
    if eig.dim and eig.min < -band:
        raise NotPositiveDefinite(f"matrix has negative eigenvalue {eig.min:.3e}")
    w = np.clip(eig.eigenvalues, 0.0, None)
    V = eig.eigenvectors
    return (V * np.sqrt(w)) @ V.conj().T


def relative_norm(A, B, tol=DEFAULT_TOL) -> float:
    """``||A / B||`` for positive definite ``A``, ``B``.

    Computed as the spectral norm of ``B^{-1/2} A B^{-1/2}``, which is
    similar to ``A B^{-1}`` and therefore shares its (positive) spectrum.
    """
    A = check_square(A, "A")
    B = check_square(B, "B")
    check_same_shape(A, B)
    _pd_eig(A, tol, "A")
    R = inv_sqrt_pd(B, tol)
    C = R @ A @ R
    return float(np.linalg.eigvalsh((C + C.conj().T) / 2)[-1])


def relative_spectrum(A, B, tol=DEFAULT_TOL):
    """Ascending eigenvalues of ``A B^{-1}`` (real, positive for PD inputs)."""
    A = check_square(A, "A")
    B = check_square(B, "B")
    check_same_shape(A, B)
    R = inv_sqrt_pd(B, tol)
    C = R @ A @ R
    return np.linalg.eigvalsh((C + C.conj().T) / 2)


def hadamard(A, B):
    """Entrywise product."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ShapeMismatch(f"shape mismatch: {A.shape} vs {B.shape}")
    return A * B


def kronecker(A, B):
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def kronecker_power(A, k):
    out = np.ones((1, 1), dtype=complex)
    for _ in range(k):
        out = np.kron(out, A)
    return out


def random_unitary(dim, rng):
    """Haar-distributed unitary: QR of a complex Gaussian with phase fix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def unitarity_residual(U):
    U = as_matrix(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1]), 2))


# --- projector sets -------------------------------------------------------


class ProjectorSet:
    """Labelled orthogonal projectors over a common space.

    Built either from dense projectors or, via :meth:`from_bases`, from
    orthonormal column bases. In the second case the dense projectors are
    only formed on request, so large block decompositions stay cheap.
    """

    def __init__(self, projectors, labels=()):
        projs = tuple(check_square(P, "projector") for P in projectors)
        if not projs:
            raise ValueError("a projector set needs at least one projector")
        dims = {P.shape[0] for P in projs}
        if len(dims) != 1:
            raise ShapeMismatch(f"projectors have differing dimensions {sorted(dims)}")
        self.__dict__["projectors"] = projs
        self._init(projs[0].shape[0], len(projs), labels)

    def _init(self, dim, count, labels):
        labels = tuple(labels) if labels else tuple(range(count))
        if len(labels) != count:
            raise ValueError("labels and projectors differ in length")
        self.dim = dim
        self.labels = labels
        self._count = count

    @classmethod
    def from_bases(cls, bases, labels=()):
        """Build from orthonormal column bases; projector = B B*."""
        bases = tuple(np.asarray(B, dtype=complex).reshape(np.shape(B)[0], -1) for B in bases)
        if not bases:
            raise ValueError("a projector set needs at least one projector")
        dims = {B.shape[0] for B in bases}
        if len(dims) != 1:
            raise ShapeMismatch(f"bases have differing dimensions {sorted(dims)}")
        out = cls.__new__(cls)
        out.__dict__["bases"] = bases
        out._init(bases[0].shape[0], len(bases), labels)
        return out

    @classmethod
    def identity(cls, dim):
        return cls.from_bases([np.eye(dim)], ("I",))

    def __len__(self):
        return self._count

    @property
    def from_basis(self):
        return "projectors" not in self.__dict__

    @cached_property
    def projectors(self):
        return tuple(B @ B.conj().T for B in self.bases)

    @cached_property
    def bases(self):
        out = []
        for P in self.projectors:
            w, V = np.linalg.eigh((P + P.conj().T) / 2)
            out.append(V[:, w > 0.5])
        return tuple(out)

    @property
    def ranks(self):
        return tuple(B.shape[1] for B in self.bases)


@dataclass(frozen=True)
class ProjectorReport:
    idempotence: tuple
    hermiticity: tuple
    orthogonality: float
    worst_pair: tuple | None
    completeness: float
    tol: float

    @property
    def idempotent(self):
        return max(self.idempotence) <= self.tol and max(self.hermiticity) <= self.tol

    @property
    def orthogonal(self):
        return self.orthogonality <= self.tol

    @property
    def complete(self):
        return self.completeness <= self.tol

    @property
    def passed(self):
        return self.idempotent and self.orthogonal and self.complete


def validate_projector_set(Pi: ProjectorSet, tol=DEFAULT_TOL) -> ProjectorReport:
    """Measure idempotence, pairwise orthogonality and completeness residuals."""
    bases = Pi.bases
    if Pi.from_basis:
        # P = B B*: P^2 - P = B (G - I) B* shares its nonzero spectrum with (G - I) G
        grams = [B.conj().T @ B for B in bases]
        idem = tuple(spectral_norm((G - np.eye(len(G))) @ G) if len(G) else 0.0 for G in grams)
        herm = (0.0,) * len(bases)
    else:
        idem = tuple(spectral_norm(P @ P - P) for P in Pi.projectors)
        herm = tuple(spectral_norm(P - P.conj().T) for P in Pi.projectors)
    # ||P_a P_b|| = ||B_a* B_b|| for orthonormal bases; one Gram matrix covers every pair
    edges = np.cumsum([0] + [B.shape[1] for B in bases])
    C = np.concatenate(bases, axis=1)
    gram = C.conj().T @ C
    worst, pair = 0.0, None
    for a in range(len(bases)):
        for b in range(a + 1, len(bases)):
            block = gram[edges[a]:edges[a + 1], edges[b]:edges[b + 1]]
            r = float(np.linalg.norm(block, 2)) if block.size else 0.0
            if r > worst:
                worst, pair = r, (Pi.labels[a], Pi.labels[b])
    if Pi.from_basis:
        # sum_a P_a = C C*, whose spectrum is that of the Gram matrix padded with zeros
        w = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        comp = float(np.max(np.abs(w - 1), initial=0.0))
        if C.shape[1] < Pi.dim:
            comp = max(comp, 1.0)
    else:
        comp = spectral_norm(sum(Pi.projectors) - np.eye(Pi.dim))
    return ProjectorReport(idem, herm, worst, pair, comp, tol)


# --- orthonormalisation ---------------------------------------------------


class OrthonormalBasis(NamedTuple):
    basis: np.ndarray  # (dim, rank), orthonormal columns
    rank: int
    coefficients: np.ndarray  # (m, rank) with basis == V @ coefficients
    kept: tuple  # indices of input vectors that contributed a new direction


def orthonormalize(vectors: Sequence, tol=1e-10) -> OrthonormalBasis:
    """Modified Gram-Schmidt with one re-orthogonalisation pass.

    Vectors are processed in the given order; a vector whose residual
    after projection has norm ``<= tol`` is dropped. The returned
    coefficients express every basis vector in terms of the inputs.
    """
    V = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in vectors])
    dim, m = V.shape
    Q = np.zeros((dim, 0), dtype=complex)
    C = np.zeros((m, 0), dtype=complex)
    kept = []
    for k in range(m):
        w = V[:, k].copy()
        coef = np.zeros(m, dtype=complex)
        coef[k] = 1.0
        for _ in range(2):
            h = Q.conj().T @ w
            w = w - Q @ h
            coef = coef - C @ h
        nrm = np.linalg.norm(w)
        if nrm <= tol:
            continue
        Q = np.column_stack([Q, w / nrm])
        C = np.column_stack([C, coef / nrm])
        kept.append(k)
    return OrthonormalBasis(Q, Q.shape[1], C, tuple(kept))


def projector_onto(vectors, tol=1e-10):
    """Orthogonal projector onto the span of ``vectors``."""
    Q = orthonormalize(vectors, tol).basis
    return Q @ Q.conj().T
