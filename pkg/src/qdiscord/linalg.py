"""Dense complex linear algebra for small quantum systems.

Matrices are plain ``numpy`` complex arrays. Multipartite operators use a
row-major, big-endian subsystem layout: the first entry of ``dims`` is the
most significant index factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
MAX_DIM = 32

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class NonPhysicalStateError(ValueError):
    """Raised when a matrix fails a density-matrix invariant."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix together with its subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        n = m.shape[0]
        if m.shape[1] != n:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != n:
            raise ValueError(f"dims {dims} do not factor dimension {n}")
        if n > MAX_DIM:
            raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise NonPhysicalStateError(f"not Hermitian: max |M - M^H| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NonPhysicalStateError(f"trace {tr.real:.12g} differs from 1")
        lo = hermitian_eig(m).eigenvalues[-1]
        if lo < -PSD_TOL:
            raise NonPhysicalStateError(f"negative eigenvalue {lo:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_pure(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        v = np.asarray(psi, dtype=np.complex128).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), tuple(dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def tensor(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def tensor_states(*states: DensityMatrix) -> DensityMatrix:
    out = states[0].matrix
    dims = list(states[0].dims)
    for s in states[1:]:
        out = tensor(out, s.matrix)
        dims.extend(s.dims)
    return DensityMatrix(out, tuple(dims))


def _check_keep(dims: Sequence[int], keep: Iterable[int]) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise IndexError(f"subsystem index out of range for dims {tuple(dims)}: {keep}")
    return keep


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of a raw matrix; kept subsystems stay in their original order."""
    keep = _check_keep(dims, keep)
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    t = np.asarray(m).reshape(tuple(dims) * 2)
    # bring kept row axes, kept column axes, then paired dropped axes
    perm = keep + [n + k for k in keep] + drop + [n + d for d in drop]
    t = t.transpose(perm)
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[d] for d in drop])) if drop else 1
    t = t.reshape(dk, dk, dd, dd)
    return np.trace(t, axis1=2, axis2=3)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = _check_keep(rho.dims, keep)
    reduced = partial_trace_matrix(rho.matrix, rho.dims, keep)
    # restore exact Hermiticity lost to summation order
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced, tuple(rho.dims[k] for k in keep))


def partial_transpose(m: np.ndarray, dims: Sequence[int], sys: int) -> np.ndarray:
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return t.transpose(axes).reshape(m.shape)


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    # unitary J with J^H [[app, apq], [conj(apq), aqq]] J diagonal
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    else:
        t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=np.complex128)


def hermitian_eig(m, tol: float = 1e-9) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues are returned in descending order with matching eigenvector
    columns.

    Raises:
        ValueError: if ``m`` is not square or deviates from Hermitian by more
            than ``tol``.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"matrix must be square, got {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if n else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian: max |M - M^H| = {dev:.3e}")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, np.linalg.norm(a))

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                j = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ j
    else:  # pragma: no cover - convergence is quadratic for n <= 32
        raise RuntimeError("Jacobi eigensolver did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def _entropy_from_eigenvalues(w: np.ndarray) -> float:
    lo = w.min()
    if lo < -PSD_TOL:
        raise NonPhysicalStateError(f"negative eigenvalue {lo:.3e}")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Von Neumann entropy in bits; ``0 log 0`` is taken as 0."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    return _entropy_from_eigenvalues(hermitian_eig(m).eigenvalues)


def entropies_batched(ms: np.ndarray) -> np.ndarray:
    """Entropies of a stack of Hermitian PSD matrices (shape ``(..., d, d)``)."""
    if ms.shape[-1] == 2:
        half_tr = 0.5 * (ms[..., 0, 0].real + ms[..., 1, 1].real)
        gap = np.sqrt((0.5 * (ms[..., 0, 0].real - ms[..., 1, 1].real)) ** 2 + np.abs(ms[..., 0, 1]) ** 2)
        w = np.stack([half_tr - gap, half_tr + gap], axis=-1)
    else:
        w = np.linalg.eigvalsh(ms)
    w = np.where(w > 0, w, 1.0)
    return -np.sum(w * np.log2(w), axis=-1)


def haar_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random ``d x d`` unitaries from QR of Ginibre matrices.

    The phases of ``diag(R)`` are moved into ``Q`` so the distribution is
    exactly Haar rather than biased by the QR sign convention.
    """
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_unitaries(d, 1, rng)[0]


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
