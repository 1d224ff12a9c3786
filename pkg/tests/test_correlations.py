import math

import numpy as np
import pytest

from conftest import random_density
from qdiscord.correlations import (
    CorrelationReport,
    MeasurementBasis,
    brute_force_oracle,
    classical_correlation_analytic,
    classical_correlation_numeric,
    computational_basis,
    conditional_entropy,
    correlation_report,
    discord_bell_diagonal,
    discord_numeric,
    mutual_information,
    mutual_information_bell_diagonal,
    qubit_basis,
    report_from_c,
)
from qdiscord.linalg import DensityMatrix, haar_unitary, partial_trace, tensor, tensor_states, von_neumann_entropy
from qdiscord.states import BELL_LABELS, CVector, bell_diagonal_from_c, bell_state, c_from_weights, werner, werner_c


def h2(p):
    return -sum(x * math.log2(x) for x in (p, 1 - p) if x > 0)


def bell_projector(a, b):
    return DensityMatrix.from_pure(bell_state(a, b), (2, 2))


def random_bell_diagonal(rng):
    w = rng.dirichlet(np.ones(4))
    return c_from_weights(dict(zip(BELL_LABELS, w)))


# mutual information


def test_mutual_information_examples(rng):
    assert mutual_information(bell_projector(0, 0)) == pytest.approx(2.0, abs=1e-12)
    prod = DensityMatrix(tensor(random_density(2, rng), random_density(2, rng)), (2, 2))
    assert mutual_information(prod) == pytest.approx(0.0, abs=1e-12)
    expected = 2 - von_neumann_entropy(werner(0.7))
    assert mutual_information(werner(0.7)) == pytest.approx(expected, abs=1e-12)


def test_mutual_information_additive_over_pairs(rng):
    rho = DensityMatrix(random_density(4, rng), (2, 2))
    sigma = DensityMatrix(random_density(4, rng), (2, 2))
    joint = tensor_states(rho, sigma)  # order A B A' B'
    total = mutual_information(joint, a=(0, 2))
    assert total == pytest.approx(mutual_information(rho) + mutual_information(sigma), abs=1e-9)


def test_mutual_information_needs_a_split():
    with pytest.raises(ValueError):
        mutual_information(werner(0.5), a=(0, 1))
    with pytest.raises(ValueError):
        mutual_information(DensityMatrix(np.eye(2) / 2, (2,)))


# measurement bases and conditional entropy


def test_qubit_basis_invariants():
    for theta, phi in [(0.0, 0.0), (0.3, 1.2), (math.pi, 5.0), (2.0, 3.0)]:
        b = qubit_basis(theta, phi)
        ps = b.projectors
        assert np.allclose(sum(ps), np.eye(2), atol=1e-10)
        for p in ps:
            assert np.allclose(p @ p, p, atol=1e-10)
            assert np.linalg.matrix_rank(p, tol=1e-10) == 1


def test_basis_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        MeasurementBasis(np.array([[1, 1], [0, 1]]))


def test_conditional_entropy_product_state(rng):
    ra = random_density(2, rng)
    rho = DensityMatrix(tensor(ra, random_density(2, rng)), (2, 2))
    for theta, phi in [(0.1, 0.2), (1.3, 4.0)]:
        assert conditional_entropy(rho, qubit_basis(theta, phi)) == pytest.approx(von_neumann_entropy(ra), abs=1e-12)


def test_conditional_entropy_bell_computational():
    assert conditional_entropy(bell_projector(0, 0), computational_basis(2)) == pytest.approx(0, abs=1e-12)


def test_conditional_entropy_werner_by_hand():
    # <0|_B rho |0>_B = (1-F)/3 I + (4F-1)/6 |1><1|, normalized spectrum {2(1-F)/3, (1+2F)/3}
    F = 0.8
    assert conditional_entropy(werner(F), computational_basis(2)) == pytest.approx(h2(2 * (1 - F) / 3), abs=1e-12)


def test_conditional_entropy_skips_null_outcomes():
    rho = DensityMatrix(tensor(np.eye(2) / 2, np.diag([1.0, 0.0])), (2, 2))
    assert conditional_entropy(rho, computational_basis(2)) == pytest.approx(1.0, abs=1e-12)


# classical correlation


def test_classical_correlation_examples(rng):
    prod = DensityMatrix(tensor(random_density(2, rng), random_density(2, rng)), (2, 2))
    assert classical_correlation_numeric(prod)[0] == pytest.approx(0, abs=1e-9)
    assert classical_correlation_numeric(bell_projector(0, 0))[0] == pytest.approx(1.0, abs=1e-9)


def test_classical_correlation_analytic_examples():
    assert classical_correlation_analytic(CVector(0, 0, 0)) == 0.0
    assert classical_correlation_analytic(CVector(1, -1, 1)) == pytest.approx(1.0, abs=1e-15)
    for F in (0.3, 0.6, 0.9):
        c = abs((4 * F - 1) / 3)
        expected = 0.5 * ((1 + c) * math.log2(1 + c) + ((1 - c) * math.log2(1 - c) if c < 1 else 0))
        assert classical_correlation_analytic(werner_c(F)) == pytest.approx(expected, abs=1e-14)


def test_numeric_matches_analytic_on_bell_diagonal(rng):
    for _ in range(15):
        c = random_bell_diagonal(rng)
        rho = bell_diagonal_from_c(c)
        val, basis = classical_correlation_numeric(rho)
        assert val == pytest.approx(classical_correlation_analytic(c), abs=1e-6)
        assert isinstance(basis, MeasurementBasis)


def test_unsupported_b_dimension():
    rho = DensityMatrix(np.eye(10) / 10, (2, 5))
    with pytest.raises(ValueError, match="unsupported"):
        classical_correlation_numeric(rho)


def test_sampled_path_product_state_and_determinism(rng):
    prod = DensityMatrix(tensor(random_density(2, rng), random_density(3, rng)), (2, 3))
    assert classical_correlation_numeric(prod, n_bases=200)[0] == pytest.approx(0, abs=1e-9)
    rho = DensityMatrix(random_density(6, rng), (2, 3))
    a = classical_correlation_numeric(rho, seed=7, n_bases=300)[0]
    b = classical_correlation_numeric(rho, seed=7, n_bases=300)[0]
    assert a == b


def test_sampled_path_agrees_with_embedded_qubit(rng):
    # a qutrit B whose third level is unpopulated behaves like a qubit B
    m2 = random_density(4, rng)
    m3 = np.zeros((6, 6), dtype=complex)
    idx = [0, 1, 3, 4]
    m3[np.ix_(idx, idx)] = m2
    c2 = classical_correlation_numeric(DensityMatrix(m2, (2, 2)))[0]
    c3 = classical_correlation_numeric(DensityMatrix(m3, (2, 3)))[0]
    assert c3 == pytest.approx(c2, abs=1e-3)
    assert c3 <= c2 + 1e-9


# discord


def test_discord_bell_diagonal_examples():
    assert discord_bell_diagonal(CVector(-1, -1, -1)) == pytest.approx(1.0, abs=1e-15)
    assert discord_bell_diagonal(CVector(0, 0, 0)) == pytest.approx(0.0, abs=1e-15)


def test_eq6_self_consistency(rng):
    for _ in range(50):
        c = random_bell_diagonal(rng)
        lhs = discord_bell_diagonal(c)
        rhs = mutual_information_bell_diagonal(c) - classical_correlation_analytic(c)
        assert abs(lhs - rhs) <= 1e-12
        assert lhs >= -1e-12


def test_analytic_mutual_information_matches_entropies(rng):
    for _ in range(10):
        c = random_bell_diagonal(rng)
        assert mutual_information_bell_diagonal(c) == pytest.approx(
            mutual_information(bell_diagonal_from_c(c)), abs=1e-10
        )


def test_discord_numeric_werner():
    rep = discord_numeric(werner(0.8))
    assert rep.discord == pytest.approx(discord_bell_diagonal(werner_c(0.8)), abs=1e-6)
    assert rep.method == "numeric"
    assert rep.optimizer.grid_size == 97 * 192
    assert rep.optimizer.improvement >= 0


def test_discord_zero_for_classical_classical_state():
    p = [0.5, 0.3, 0.2]
    m = sum(pi * np.kron(np.diag(np.eye(3)[i]), np.diag(np.eye(3)[i])) for i, pi in enumerate(p))
    rho = DensityMatrix(m, (3, 3))
    assert discord_numeric(rho, n_bases=500).discord == pytest.approx(0, abs=1e-7)
    m2 = 0.6 * np.diag([1, 0, 0, 0]) + 0.4 * np.diag([0, 0, 0, 1])
    assert discord_numeric(DensityMatrix(m2, (2, 2))).discord == pytest.approx(0, abs=1e-7)


def test_report_discord_identity():
    rep = CorrelationReport(1.25, 0.5, method="analytic")
    assert rep.discord == 0.75
    rep = report_from_c(werner_c(0.9))
    assert abs(rep.discord - (rep.mutual_information - rep.classical_correlation)) <= 1e-12


def test_correlation_report_dispatch(rng):
    assert correlation_report(werner(0.6)).method == "analytic"
    assert correlation_report(DensityMatrix(random_density(4, rng), (2, 2))).method == "numeric"


def test_general_states_bounds_and_oracle(rng):
    for _ in range(8):
        rho = DensityMatrix(random_density(4, rng, rank=int(rng.integers(1, 5))), (2, 2))
        rep = discord_numeric(rho)
        assert -1e-9 <= rep.classical_correlation <= rep.mutual_information + 1e-9
        assert rep.discord >= -1e-9
        grid = brute_force_oracle(rho, grid=(64, 128))
        assert grid <= rep.classical_correlation + 1e-12
        assert rep.classical_correlation - grid <= 1e-3


def test_local_unitary_invariance(rng):
    for _ in range(4):
        rho = DensityMatrix(random_density(4, rng), (2, 2))
        u = tensor(haar_unitary(2, rng), haar_unitary(2, rng))
        rotated = DensityMatrix(u @ rho.matrix @ u.conj().T, (2, 2))
        assert discord_numeric(rotated).discord == pytest.approx(discord_numeric(rho).discord, abs=1e-6)


# brute-force oracle


def test_oracle_lower_bound_and_convergence():
    rho = werner(0.9)
    exact = classical_correlation_analytic(werner_c(0.9))
    assert brute_force_oracle(rho, grid=(16, 32)) <= exact + 1e-12
    assert abs(brute_force_oracle(rho, grid=(256, 512)) - exact) <= 1e-5


def test_oracle_monotone_on_nested_grids(rng):
    # a tilted Bell-diagonal state puts the optimum off the grid axes
    c = CVector(0.5, -0.3, 0.2)
    u = tensor(haar_unitary(2, rng), haar_unitary(2, rng))
    rho = DensityMatrix(u @ bell_diagonal_from_c(c).matrix @ u.conj().T, (2, 2))
    values = [brute_force_oracle(rho, grid=(4 * 2**k, 8 * 2**k)) for k in range(6)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    assert abs(values[-1] - classical_correlation_analytic(c)) <= 1e-5


@pytest.mark.parametrize("dims", [(2, 3, 2), (3, 3, 3), (2, 4, 2)])
def test_sampled_path_reaches_known_optimum(dims):
    # for this family measuring B in the computational basis is optimal, so C = S(A)
    from qdiscord.koashi import build_class_state, random_class_spec

    for t in range(3):
        rho = build_class_state(random_class_spec(*dims, np.random.default_rng([5, t])))
        c, _ = classical_correlation_numeric(rho)
        assert c == pytest.approx(von_neumann_entropy(partial_trace(rho, [0])), abs=1e-8)
