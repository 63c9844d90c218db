import math

import numpy as np
import pytest

from shiftlab.operators import (
    OperatorWindow,
    adjoint_window,
    adjoint_window_square,
    chain_continuity_probe,
    eigenvector_f1,
    jordan_chain,
    shift_window,
)
from shiftlab.weights import WeightSequence

UNW = WeightSequence.preset("unweighted")
BER = WeightSequence.preset("bergman")
QAS = WeightSequence.preset("quasianalytic_sqrt")
PRESETS = (UNW, BER, QAS)


class TestWindows:
    def test_shift_unweighted(self):
        M = shift_window(UNW, 2).matrix
        assert np.array_equal(M, np.array([[0, 0], [1, 0], [0, 1]], dtype=complex))

    def test_shift_weight_values(self):
        assert shift_window(BER, 1).matrix[1, 0] == pytest.approx(math.sqrt(0.5))
        assert shift_window(QAS, 1).matrix[1, 0] == pytest.approx(math.e)

    def test_adjoint_unweighted(self):
        M = adjoint_window(UNW, 2).matrix
        assert np.array_equal(M, np.array([[0, 1, 0], [0, 0, 1]], dtype=complex))

    def test_adjoint_is_conjugate_transpose(self):
        S = shift_window(BER, 8).matrix
        A = adjoint_window(BER, 8).matrix
        assert np.array_equal(A, S.conj().T)

    def test_adjoint_weight_values(self):
        assert adjoint_window(BER, 1).matrix[0, 1] == pytest.approx(math.sqrt(0.5))

    def test_square_adjoint_structure(self):
        A = adjoint_window_square(BER, 6).matrix
        assert A.shape == (6, 6)
        assert A[0, 1] == pytest.approx(math.sqrt(0.5))
        assert np.all(A[np.tril_indices(6)] == 0)

    def test_csv_roundtrip(self, tmp_path):
        win = shift_window(BER, 4)
        path = tmp_path / "win.csv"
        win.to_csv(path)
        back = OperatorWindow.from_csv(path)
        assert np.allclose(back.matrix, win.matrix)


class TestEigenvector:
    def test_lambda_zero_gives_e0(self):
        for w in PRESETS:
            f = eigenvector_f1(w, 0.0, 50).vectors[0]
            expected = np.zeros(50, dtype=complex)
            expected[0] = 1.0
            assert np.array_equal(f, expected)

    def test_unweighted_geometric_norm(self):
        f = eigenvector_f1(UNW, 0.6, 200).vectors[0]
        assert np.linalg.norm(f) ** 2 == pytest.approx(1.5625, abs=1e-9)

    def test_bergman_derivative_norm(self):
        f = eigenvector_f1(BER, 0.5, 200).vectors[0]
        assert np.linalg.norm(f) ** 2 == pytest.approx(16.0 / 9.0, abs=1e-9)

    def test_membership_flag_outside_radius(self):
        chain = eigenvector_f1(UNW, 1.1, 100)
        assert not chain.l2_member
        assert chain.tail_bound == math.inf

    def test_tail_bound_inside_radius(self):
        chain = eigenvector_f1(UNW, 0.5, 100)
        # exact geometric tail for unit weights
        exact = 0.25 ** 100 / (1 - 0.25)
        assert chain.l2_member
        assert chain.tail_bound == pytest.approx(exact, rel=1e-10)


def brute_force_second_vector(w, lam, n_coords):
    """Independent oracle: solve the leading linear system for f_2.

    Unknowns x_1 .. x_{n_coords-1} (x_0 = 0 by normalization) with
    equations alpha_n x_{n+1} - lam x_n = beta_n.
    """
    alpha = [w.alpha_at(k) for k in range(n_coords)]
    beta = [lam ** n / w.pi_product(n) for n in range(n_coords)]
    A = np.zeros((n_coords - 1, n_coords - 1), dtype=complex)
    b = np.zeros(n_coords - 1, dtype=complex)
    for n in range(n_coords - 1):  # equation index n: alpha_n x_{n+1} - lam x_n = beta_n
        A[n, n] = alpha[n]
        if n >= 1:
            A[n, n - 1] = -lam
        b[n] = beta[n]
    x = np.linalg.solve(A, b)
    return np.concatenate([[0.0], x])


class TestJordanChain:
    def test_bergman_gamma2_vs_brute_force(self):
        chain = jordan_chain(BER, 0.5, 2, 200)
        oracle = brute_force_second_vector(BER, 0.5, 4)
        assert chain.vectors[1][2] == pytest.approx(math.sqrt(3.0), rel=1e-12)
        assert np.allclose(chain.vectors[1][:4], oracle, rtol=1e-12, atol=0)

    def test_unweighted_gamma_closed_form(self):
        lam = 0.37 - 0.21j
        chain = jordan_chain(UNW, lam, 2, 120)
        n = np.arange(1, 120)
        expected = n * lam ** (n - 1)
        assert np.allclose(chain.vectors[1][1:], expected, rtol=1e-12, atol=0)

    def test_lambda_zero_second_vector(self):
        for w in PRESETS:
            chain = jordan_chain(w, 0.0, 2, 30)
            f2 = chain.vectors[1]
            assert f2[0] == 0
            assert f2[1] == pytest.approx(1.0 / w.alpha_at(0), rel=1e-14)
            assert np.all(f2[2:] == 0)

    def test_leading_zero_structure(self):
        chain = jordan_chain(BER, 0.3 + 0.2j, 3, 60)
        for k, vec in enumerate(chain.vectors, start=1):
            assert np.all(vec[: k - 1] == 0)
            lead = vec[k - 1]
            assert lead.imag == 0 and lead.real > 0

    def test_link_residuals_small(self):
        N = 400
        for w in PRESETS:
            r_point = math.exp(w.log_pi(N) / N)
            boundary = 0.9 * r_point * np.exp(1.1j)
            for lam in (0.3, 0.5j, -0.6, boundary):
                chain = jordan_chain(w, lam, 3, N)
                for k in range(1, 3):
                    scale = np.linalg.norm(chain.vectors[k - 1])
                    assert chain.residuals[k] <= 1e-10 * scale

    def test_window_too_small(self):
        with pytest.raises(ValueError):
            jordan_chain(UNW, 0.5, 3, 4)

    def test_norm_nondecreasing_in_radius(self):
        for w in PRESETS:
            for k in (1, 2):
                norms = []
                for r in np.linspace(0.05, 0.7, 8):
                    chain = jordan_chain(w, r * np.exp(0.4j), k, 150)
                    norms.append(np.linalg.norm(chain.vectors[-1]))
                assert all(b >= a - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_chain_coefficients_independent_of_lambda(self):
        # coordinates factor as c_{k,j} lam^(j-k+1) with positive c_{k,j}
        # determined by the weights alone
        N = 40
        lams = (0.3, 0.5j, -0.2 + 0.4j)
        for w in PRESETS:
            normalized = []
            for lam in lams:
                chain = jordan_chain(w, lam, 3, N)
                per_vector = []
                for k in range(1, 4):
                    j = np.arange(k - 1, N)
                    c = chain.vectors[k - 1][k - 1 :] / np.asarray(lam, complex) ** (j - (k - 1))
                    per_vector.append(c)
                normalized.append(per_vector)
            for k in range(3):
                base = normalized[0][k]
                assert np.all(base.real > 0)
                assert np.max(np.abs(base.imag)) <= 1e-13 * np.max(base.real)
                for other in normalized[1:]:
                    assert np.allclose(other[k], base, rtol=1e-10, atol=0)


class TestKernelDimension:
    @pytest.mark.parametrize("w", PRESETS, ids=lambda w: w.kind)
    def test_windowed_kernel_is_one_dimensional(self, w):
        N = 120
        r_point = math.exp(w.log_pi(N) / N)
        A = adjoint_window(w, N).matrix
        for lam in (0.2, -0.5j, 0.6 * r_point):
            B = A.copy()
            B[:, :N] -= lam * np.eye(N)
            s = np.linalg.svd(B, compute_uv=False)
            # (N+1)-column map with N rows: nullity = N+1 - rank
            rank = int(np.sum(s > 1e-8 * s[0]))
            assert (N + 1) - rank == 1


class TestContinuityProbe:
    def test_unweighted_small_modulus(self):
        mod = chain_continuity_probe(UNW, 1, 0.5, 360, N=200)
        assert mod <= 0.02

    def test_refinement_halves_modulus(self):
        coarse = chain_continuity_probe(BER, 1, 0.4, 90, N=150)
        fine = chain_continuity_probe(BER, 1, 0.4, 180, N=150)
        assert fine <= coarse / 2 * 1.5

    def test_zero_radius(self):
        assert chain_continuity_probe(QAS, 1, 0.0, 16, N=100) == 0.0

    def test_radius_outside_estimate_rejected(self):
        with pytest.raises(ValueError):
            chain_continuity_probe(BER, 1, 1.5, 8, N=100)
