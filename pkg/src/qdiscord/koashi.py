"""A higher-dimensional family with computable, additive discord.

States are specified through their purification

    |psi>_ABC = sum_i lambda_i |a_i>|i>|b_i>

with normalized but not necessarily orthogonal ``a_i`` (on A) and ``b_i``
(on C). Measuring B in ``{|i>}`` leaves A in a pure state, so the classical
correlation equals ``S(A)`` and the discord is ``S(B) - S(AB)``. The A|C
marginal is a mixture of product states and therefore separable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import classical_correlation_numeric, discord_numeric
from .linalg import (
    MAX_DIM,
    PAULI_Y,
    DensityMatrix,
    haar_state,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    tensor,
    von_neumann_entropy,
)

MAX_SUBSYSTEM_DIM = 4
SPEC_TOL = 1e-10
PPT_TOL = 1e-10
EIG_FLOOR = 1e-14

_YY = tensor(PAULI_Y, PAULI_Y)


@dataclass(frozen=True, eq=False)
class ClassStateSpec:
    schmidt_weights: np.ndarray
    a_vectors: np.ndarray  # row i is |a_i>
    b_vectors: np.ndarray  # row i is |b_i>

    def __post_init__(self):
        lam = np.asarray(self.schmidt_weights, dtype=float).ravel()
        a = np.atleast_2d(np.asarray(self.a_vectors, dtype=np.complex128))
        b = np.atleast_2d(np.asarray(self.b_vectors, dtype=np.complex128))
        n = lam.size
        if a.shape[0] != n or b.shape[0] != n:
            raise ValueError("need one a-vector and one b-vector per Schmidt weight")
        if np.any(lam < 0) or abs(np.sum(lam**2) - 1.0) > SPEC_TOL:
            raise ValueError("Schmidt weights must be nonnegative with unit sum of squares")
        for name, vs in (("a", a), ("b", b)):
            err = np.max(np.abs(np.linalg.norm(vs, axis=1) - 1.0))
            if err > SPEC_TOL:
                raise ValueError(f"{name}-vectors must be normalized (error {err:.2e})")
        dims = (a.shape[1], n, b.shape[1])
        if max(dims) > MAX_SUBSYSTEM_DIM:
            raise ValueError(f"subsystem dimensions {dims} exceed the cap {MAX_SUBSYSTEM_DIM}")
        object.__setattr__(self, "schmidt_weights", lam)
        object.__setattr__(self, "a_vectors", a)
        object.__setattr__(self, "b_vectors", b)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.a_vectors.shape[1], self.schmidt_weights.size, self.b_vectors.shape[1]

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """``p_ij = lambda_i lambda_j <b_j|b_i>``."""
        lam = self.schmidt_weights
        return np.outer(lam, lam) * (self.b_vectors.conj() @ self.b_vectors.T).T


def random_class_spec(
    d_a: int, d_b: int, d_c: int, rng: np.random.Generator, product: bool = False
) -> ClassStateSpec:
    """Random spec; ``product=True`` forces ``lambda = (1, 0, ...)``."""
    if product:
        lam = np.zeros(d_b)
        lam[0] = 1.0
    else:
        lam = rng.random(d_b) + 0.05
        lam /= np.linalg.norm(lam)
    a = np.stack([haar_state(d_a, rng) for _ in range(d_b)])
    b = np.stack([haar_state(d_c, rng) for _ in range(d_b)])
    return ClassStateSpec(lam, a, b)


def purify_class(spec: ClassStateSpec) -> np.ndarray:
    lam, a, b = spec.schmidt_weights, spec.a_vectors, spec.b_vectors
    d_a, d_b, d_c = spec.dims
    psi = np.einsum("i,ix,iy->xiy", lam, a, b).reshape(d_a * d_b * d_c)
    return psi / np.linalg.norm(psi)


def build_class_state(spec: ClassStateSpec) -> DensityMatrix:
    d_a, d_b, _ = spec.dims
    p = spec.coefficient_matrix
    m = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for i in range(d_b):
        ki = np.zeros(d_b)
        ki[i] = 1.0
        vi = np.kron(spec.a_vectors[i], ki)
        for j in range(d_b):
            kj = np.zeros(d_b)
            kj[j] = 1.0
            m += p[i, j] * np.outer(vi, np.kron(spec.a_vectors[j], kj).conj())
    return DensityMatrix(0.5 * (m + m.conj().T), (d_a, d_b))


def tripartite_marginals(psi: np.ndarray, dims: tuple[int, int, int]) -> dict[str, DensityMatrix]:
    """Reduced states of a pure tripartite vector, computed without forming ``|psi><psi|``."""
    t = np.asarray(psi, dtype=np.complex128).reshape(dims)
    t = t / np.linalg.norm(t)
    d_a, d_b, d_c = dims

    def dm(m, sub):
        m = m.reshape(int(np.prod(sub)), -1)
        return DensityMatrix(0.5 * (m + m.conj().T), sub)

    return {
        "AB": dm(np.einsum("abc,dec->abde", t, t.conj()), (d_a, d_b)),
        "AC": dm(np.einsum("abc,dbe->acde", t, t.conj()), (d_a, d_c)),
        "A": dm(np.einsum("abc,dbc->ad", t, t.conj()), (d_a,)),
        "B": dm(np.einsum("abc,aec->be", t, t.conj()), (d_b,)),
        "C": dm(np.einsum("abc,abe->ce", t, t.conj()), (d_c,)),
    }


def discord_class_analytic(spec: ClassStateSpec) -> float:
    rho = build_class_state(spec)
    return von_neumann_entropy(partial_trace(rho, [1])) - von_neumann_entropy(rho)


def _binary_entropy(p: float) -> float:
    return -sum(x * math.log2(x) for x in (p, 1.0 - p) if x > 0)


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence.

    With ``rho = X X^H`` the spin-flip eigenvalues are the singular values of
    ``X^T (sigma_y x sigma_y) X``, which avoids square roots of noise-level
    eigenvalues.
    """
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {rho.dims}")
    spec = hermitian_eig(rho.matrix)
    keep = spec.eigenvalues > EIG_FLOOR
    x = spec.eigenvectors[:, keep] * np.sqrt(spec.eigenvalues[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(x.T @ _YY @ x, compute_uv=False)
    lam[: sv.size] = sv
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def entanglement_of_formation_2q(rho: DensityMatrix) -> float:
    c = min(concurrence(rho), 1.0)
    return _binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def koashi_winter_residual(psi: np.ndarray) -> float:
    """``|D(AB) - E_F(AC) - S(A|C)|`` for a pure three-qubit state."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.size != 8 or abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("expected a normalized three-qubit state vector")
    m = tripartite_marginals(psi, (2, 2, 2))
    d = discord_numeric(m["AB"]).discord
    e_f = entanglement_of_formation_2q(m["AC"])
    s_a_given_c = von_neumann_entropy(m["AC"]) - von_neumann_entropy(m["C"])
    return abs(d - e_f - s_a_given_c)


def separability_check_AC(spec: ClassStateSpec) -> tuple[bool, float]:
    """Partial-transpose test on the A|C marginal of the purification."""
    d_a, _, d_c = spec.dims
    rho_ac = tripartite_marginals(purify_class(spec), spec.dims)["AC"]
    pt = partial_transpose(rho_ac.matrix, (d_a, d_c), 1)
    lo = float(hermitian_eig(pt).eigenvalues[-1])
    return lo >= -PPT_TOL, lo


@dataclass(frozen=True)
class AdditivityReport:
    D_single: float
    D_n_copies_analytic: float
    n: int
    C_numeric: float
    S_A: float
    E_F_AC: float
    residual_eq8: float
    is_ppt: bool


def additivity_report(spec: ClassStateSpec, n: int, seed: int = 0) -> AdditivityReport:
    if n < 1:
        raise ValueError("n must be at least 1")
    d_a, d_b, d_c = spec.dims
    marg = tripartite_marginals(purify_class(spec), spec.dims)
    d_single = von_neumann_entropy(marg["B"]) - von_neumann_entropy(marg["AB"])
    c_num, _ = classical_correlation_numeric(marg["AB"], seed=seed)
    is_ppt, _ = separability_check_AC(spec)
    # the A|C marginal is a product-state mixture by construction
    e_f = entanglement_of_formation_2q(marg["AC"]) if (d_a, d_c) == (2, 2) else 0.0
    s_a_given_c = von_neumann_entropy(marg["AC"]) - von_neumann_entropy(marg["C"])
    return AdditivityReport(
        D_single=d_single,
        D_n_copies_analytic=n * d_single,
        n=n,
        C_numeric=c_num,
        S_A=von_neumann_entropy(marg["A"]),
        E_F_AC=e_f,
        residual_eq8=abs(d_single - e_f - s_a_given_c),
        is_ppt=is_ppt,
    )


def discord_class_n_copies(spec: ClassStateSpec, n: int) -> float | None:
    """``S(B^n) - S((AB)^n)`` from explicit tensor powers, or None if too large.

    Independent of the ``n * D_single`` shortcut used in
    :func:`additivity_report`; only feasible while ``(d_A d_B)**n <= 32``.
    """
    rho = build_class_state(spec)
    if rho.dim**n > MAX_DIM:
        return None
    rho_b = partial_trace(rho, [1]).matrix
    ab, b = rho.matrix, rho_b
    for _ in range(n - 1):
        ab = tensor(ab, rho.matrix)
        b = tensor(b, rho_b)
    return von_neumann_entropy(b) - von_neumann_entropy(ab)
