"""Bell, Werner and Bell-diagonal two-qubit states.

Bell vectors are labelled by a phase bit ``a`` and a parity bit ``b``::

    beta_ab = (|0, b> + (-1)**a |1, 1 xor b>) / sqrt(2)

so ``beta_11`` is the singlet. A Bell-diagonal state is fixed by its
correlation vector ``c_j = Tr(rho sigma_j x sigma_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PAULI_X, PAULI_Y, PAULI_Z, DensityMatrix, tensor

BELL_LABELS = ((0, 0), (0, 1), (1, 0), (1, 1))
SINGLET = (1, 1)
WEIGHT_TOL = 1e-10
BELL_DIAGONAL_TOL = 1e-9

_PAIR_PAULIS = tuple(tensor(p, p) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def bell_state(a: int, b: int) -> np.ndarray:
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError(f"Bell labels must be bits, got ({a}, {b})")
    v = np.zeros(4, dtype=np.complex128)
    v[b] = 1.0
    v[2 + (1 - b)] = (-1) ** a
    return v / np.sqrt(2.0)


# columns beta_00, beta_01, beta_10, beta_11
BELL_BASIS = np.column_stack([bell_state(a, b) for a, b in BELL_LABELS])


@dataclass(frozen=True)
class CVector:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for c in self.as_array():
            if not np.isfinite(c) or abs(c) > 1.0 + WEIGHT_TOL:
                raise ValueError(f"correlation coefficients must lie in [-1, 1]: {self}")
        w = bell_weights(self)
        bad = {k: v for k, v in w.items() if v < -WEIGHT_TOL or v > 1.0 + WEIGHT_TOL}
        if bad:
            raise ValueError(f"{self} does not describe a state; Bell weights {bad}")

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


def bell_weights(c: CVector) -> dict[tuple[int, int], float]:
    """Eigenvalues of the Bell-diagonal state with correlation vector ``c``."""
    c1, c2, c3 = c.c1, c.c2, c.c3
    return {
        (a, b): 0.25 * (1 + (-1) ** a * c1 - (-1) ** (a + b) * c2 + (-1) ** b * c3)
        for a, b in BELL_LABELS
    }


def c_from_weights(weights: dict[tuple[int, int], float]) -> CVector:
    """Inverse of :func:`bell_weights`."""
    l00, l01, l10, l11 = (weights[k] for k in BELL_LABELS)
    return CVector(l00 + l01 - l10 - l11, -l00 + l01 + l10 - l11, l00 - l01 + l10 - l11)


def bell_mixture(weights: dict[tuple[int, int], float]) -> DensityMatrix:
    w = np.array([weights.get(k, 0.0) for k in BELL_LABELS], dtype=float)
    if np.any(w < -WEIGHT_TOL) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"Bell weights must be a probability vector, got {w}")
    m = (BELL_BASIS * np.clip(w, 0.0, None)) @ BELL_BASIS.conj().T
    return DensityMatrix(m, (2, 2))


def werner(F: float) -> DensityMatrix:
    """Singlet fidelity ``F`` mixed with equal weight on the other Bell states."""
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {F}")
    rest = (1.0 - F) / 3.0
    return bell_mixture({(0, 0): rest, (0, 1): rest, (1, 0): rest, SINGLET: F})


def werner_c(F: float) -> CVector:
    x = (1.0 - 4.0 * F) / 3.0
    return CVector(x, x, x)


def bell_diagonal_from_c(c: CVector) -> DensityMatrix:
    m = np.eye(4, dtype=np.complex128)
    for cj, pp in zip(c.as_array(), _PAIR_PAULIS):
        m = m + cj * pp
    return DensityMatrix(0.25 * m, (2, 2))


def to_bell_basis(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return BELL_BASIS.conj().T @ m @ BELL_BASIS


def bell_offdiagonal(rho: DensityMatrix) -> float:
    b = to_bell_basis(rho)
    return float(np.max(np.abs(b - np.diag(np.diag(b)))))


def is_bell_diagonal(rho: DensityMatrix, tol: float = BELL_DIAGONAL_TOL) -> bool:
    return tuple(rho.dims) == (2, 2) and bell_offdiagonal(rho) <= tol


def bell_fidelity(rho: DensityMatrix, label: tuple[int, int] = SINGLET) -> float:
    v = bell_state(*label)
    return float(np.real(v.conj() @ rho.matrix @ v))


def c_from_state(rho: DensityMatrix, tol: float = BELL_DIAGONAL_TOL) -> CVector:
    """Correlation vector of a Bell-diagonal two-qubit state.

    Raises:
        ValueError: if ``rho`` is not two qubits, or has Bell-basis coherences
            larger than ``tol``. Projecting silently would corrupt discord values.
    """
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    off = bell_offdiagonal(rho)
    if off > tol:
        raise ValueError(f"state is not Bell-diagonal: max Bell-basis off-diagonal {off:.3e}")
    c = [float(np.real(np.trace(rho.matrix @ pp))) for pp in _PAIR_PAULIS]
    return CVector(*np.clip(c, -1.0, 1.0))


