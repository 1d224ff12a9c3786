"""Exact simulation of the BBPSSW recurrence purification round.

Two copies of a Werner pair are rotated by a unilateral sigma_y, coupled by a
bilateral CNOT (pair 0 controls, pair 1 is the target), and pair 1 is measured
in the computational basis on both sides. Pair 0 is kept on coincident
outcomes, rotated back and twirled into Werner form.

Four-qubit operators use the subsystem order ``A0 B0 A1 B1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlations import CorrelationReport, correlation_report
from .linalg import PAULI_I, PAULI_Y, DensityMatrix, partial_trace_matrix, tensor
from .states import SINGLET, bell_fidelity, bell_state, werner

NULL_EVENT_TOL = 1e-14


def _cnot_permutation() -> np.ndarray:
    u = np.zeros((16, 16), dtype=np.complex128)
    for idx in range(16):
        a0, b0, a1, b1 = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        out = (a0 << 3) | (b0 << 2) | ((a1 ^ a0) << 1) | (b1 ^ b0)
        u[out, idx] = 1.0
    return u


BILATERAL_CNOT = _cnot_permutation()
_SIGMA_Y_A = tensor(PAULI_Y, PAULI_I)
_SINGLET_PROJ = np.outer(bell_state(*SINGLET), bell_state(*SINGLET).conj())


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def unilateral_sigma_y(rho: DensityMatrix) -> DensityMatrix:
    """Apply sigma_y on A; swaps Bell weights 00 <-> 11 and 01 <-> 10."""
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    return DensityMatrix(_SIGMA_Y_A @ rho.matrix @ _SIGMA_Y_A.conj().T, (2, 2))


def bilateral_cnot(rho_pair0: DensityMatrix, rho_pair1: DensityMatrix) -> DensityMatrix:
    for r in (rho_pair0, rho_pair1):
        if tuple(r.dims) != (2, 2):
            raise ValueError(f"expected two-qubit pairs, got dims {r.dims}")
    joint = tensor(rho_pair0.matrix, rho_pair1.matrix)
    return DensityMatrix(BILATERAL_CNOT @ joint @ BILATERAL_CNOT.T, (2, 2, 2, 2))


def measure_coincidence(rho4: DensityMatrix) -> tuple[DensityMatrix, float]:
    """Keep pair 0 when both halves of pair 1 read the same bit.

    Returns the renormalized pair-0 state and the success probability.
    Raises ``ValueError`` if coincidence has (numerically) zero probability.
    """
    if tuple(rho4.dims) != (2, 2, 2, 2):
        raise ValueError(f"expected a four-qubit state A0 B0 A1 B1, got dims {rho4.dims}")
    kept = np.zeros((4, 4), dtype=np.complex128)
    for bits in (0b00, 0b11):
        proj = np.zeros((4, 4))
        proj[bits, bits] = 1.0
        p4 = tensor(np.eye(4), proj)
        kept += partial_trace_matrix(p4 @ rho4.matrix @ p4, rho4.dims, [0, 1])
    p = float(np.real(np.trace(kept)))
    if p < NULL_EVENT_TOL:
        raise ValueError(f"coincidence probability {p:.3e} is zero; cannot condition on it")
    return DensityMatrix(_hermitize(kept / p), (2, 2)), p


def twirl_to_werner(rho: DensityMatrix) -> DensityMatrix:
    """Bilateral SU(2) twirl: keep the singlet fidelity, equalize the rest."""
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    F = min(max(bell_fidelity(rho), 0.0), 1.0)
    return DensityMatrix(F * _SINGLET_PROJ + (1.0 - F) / 3.0 * (np.eye(4) - _SINGLET_PROJ), (2, 2))


def _su2_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Haar SU(2) matrices from uniform triples via a uniform unit quaternion."""
    r1 = np.sqrt(1.0 - u[:, 0])
    r2 = np.sqrt(u[:, 0])
    t1 = 2.0 * np.pi * u[:, 1]
    t2 = 2.0 * np.pi * u[:, 2]
    a = r1 * np.sin(t1) + 1j * r1 * np.cos(t1)
    b = r2 * np.sin(t2) + 1j * r2 * np.cos(t2)
    out = np.empty((u.shape[0], 2, 2), dtype=np.complex128)
    out[:, 0, 0] = a
    out[:, 0, 1] = -np.conj(b)
    out[:, 1, 0] = b
    out[:, 1, 1] = np.conj(a)
    return out


def _uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    # one Philox block (four doubles) per sample; sample i reads block i,
    # so any chunking of the sample range gives the same stream
    gen = np.random.Generator(np.random.Philox(key=seed, counter=start))
    return gen.random((count, 4))[:, :3]


def twirl_monte_carlo(rho: DensityMatrix, samples: int, seed: int, chunk: int = 8192) -> DensityMatrix:
    """Average of ``(U x U) rho (U x U)^H`` over ``samples`` Haar-random SU(2) draws."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    acc = np.zeros((4, 4), dtype=np.complex128)
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        us = _su2_from_uniforms(_uniform_block(seed, start, n))
        uu = np.einsum("nij,nkl->nikjl", us, us).reshape(n, 4, 4)
        acc += np.einsum("nij,jk,nlk->il", uu, rho.matrix, uu.conj())
    return DensityMatrix(_hermitize(acc / samples), (2, 2))


def purification_closed_form(F: float) -> dict[str, float]:
    """Closed-form Bell weights and fidelities of one round started from Werner(F)."""
    norm = 8 * F * F - 4 * F + 5
    return {
        "p_success": norm / 9.0,
        "w00": (10 * F * F - 2 * F + 1) / norm,
        "w10": (6 * F - 6 * F * F) / norm,
        "w01": (2 * F * F - 4 * F + 2) / norm,
        "w11": (2 * F * F - 4 * F + 2) / norm,
        "F_out": (10 * F * F - 2 * F + 1) / norm,
        "F_twirl_only": (2 * F * F - 4 * F + 2) / norm,
        "c1": (16 * F * F - 8 * F + 1) / norm,
        "c3": (12 * F - 3) / norm,
    }


@dataclass(frozen=True)
class RoundStates:
    initial: DensityMatrix
    intermediate: DensityMatrix
    final: DensityMatrix
    twirl_only: DensityMatrix
    p_success: float


def simulate_round(F: float) -> RoundStates:
    """Run one round on two Werner(F) copies and return every stage's state."""
    rho = werner(F)
    rotated = unilateral_sigma_y(rho)
    kept, p = measure_coincidence(bilateral_cnot(rotated, rotated))
    return RoundStates(
        initial=rho,
        intermediate=kept,
        final=twirl_to_werner(unilateral_sigma_y(kept)),
        twirl_only=twirl_to_werner(kept),
        p_success=p,
    )


@dataclass(frozen=True)
class RoundRecord:
    F_in: float
    F_out: float
    p_success: float
    initial: CorrelationReport
    intermediate: CorrelationReport
    final: CorrelationReport

    @property
    def D_in(self) -> float:
        return self.initial.discord

    @property
    def D_intermediate(self) -> float:
        return self.intermediate.discord

    @property
    def D_final(self) -> float:
        return self.final.discord

    @property
    def I_in(self) -> float:
        return self.initial.mutual_information

    @property
    def I_intermediate(self) -> float:
        return self.intermediate.mutual_information

    @property
    def I_final(self) -> float:
        return self.final.mutual_information

    @property
    def C_in(self) -> float:
        return self.initial.classical_correlation

    @property
    def C_intermediate(self) -> float:
        return self.intermediate.classical_correlation

    @property
    def C_final(self) -> float:
        return self.final.classical_correlation


def bbpssw_round(F: float) -> RoundRecord:
    s = simulate_round(F)
    return RoundRecord(
        F_in=F,
        F_out=bell_fidelity(s.final),
        p_success=s.p_success,
        initial=correlation_report(s.initial),
        intermediate=correlation_report(s.intermediate),
        final=correlation_report(s.final),
    )


@dataclass
class PurificationTrace:
    rounds: list[RoundRecord] = field(default_factory=list)
    cumulative_yield: float = 1.0

    @property
    def fidelities(self) -> list[float]:
        if not self.rounds:
            return []
        return [self.rounds[0].F_in] + [r.F_out for r in self.rounds]

    @property
    def nondecreasing(self) -> bool:
        f = self.fidelities
        return all(b >= a - 1e-12 for a, b in zip(f, f[1:]))


def iterate(F0: float, rounds: int) -> PurificationTrace:
    """Chain ``rounds`` purification rounds; each consumes two pairs to keep at most one."""
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    trace = PurificationTrace()
    F = F0
    for _ in range(rounds):
        rec = bbpssw_round(F)
        trace.rounds.append(rec)
        trace.cumulative_yield *= rec.p_success / 2.0
        F = min(max(rec.F_out, 0.0), 1.0)
    return trace
