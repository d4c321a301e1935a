import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pomcert.errors import DimensionMismatch, ResidualExceeded, StructuralError
from pomcert.operators import (
    SIGMA_I,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    anticommutator,
    dichotomic_from_matrix,
    eig_hermitian,
    hermitian_from_matrix,
    is_unitary,
    operator_norm,
    random_hermitian,
    random_unitary,
    tensor,
)
from pomcert.optimal import canonical_observables, make_rng


class TestHermitian:
    def test_identity(self):
        op = hermitian_from_matrix(np.eye(2), tol=1e-12)
        assert op.hermiticity_residual == 0
        assert op.dim == 2

    def test_sigma_y(self):
        assert hermitian_from_matrix(SIGMA_Y).hermiticity_residual == 0

    def test_upper_triangular_rejected(self):
        with pytest.raises(ResidualExceeded):
            hermitian_from_matrix([[0, 1], [0, 0]])

    @pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), [[np.nan, 0], [0, 1]]])
    def test_malformed(self, bad):
        with pytest.raises(Exception):
            hermitian_from_matrix(bad)

    def test_array_protocol(self):
        op = hermitian_from_matrix(SIGMA_Z)
        np.testing.assert_array_equal(np.asarray(op), SIGMA_Z)


class TestDichotomic:
    @pytest.mark.parametrize("m", [SIGMA_X, SIGMA_Y, SIGMA_Z, np.kron(SIGMA_X, SIGMA_Z)])
    def test_paulis(self, m):
        obs = dichotomic_from_matrix(m)
        assert obs.squared_identity_residual == 0
        assert obs.trace_magnitude == 0

    def test_not_involution(self):
        with pytest.raises(ResidualExceeded):
            dichotomic_from_matrix(2 * SIGMA_Z)

    def test_traced(self):
        with pytest.raises(ResidualExceeded):
            dichotomic_from_matrix(np.diag([1, 1, 1, -1]))


class TestAnticommutator:
    def test_distinct_paulis(self):
        np.testing.assert_array_equal(anticommutator(SIGMA_X, SIGMA_Y), np.zeros((2, 2)))

    def test_self(self):
        np.testing.assert_array_equal(anticommutator(SIGMA_Z, SIGMA_Z), 2 * SIGMA_I)

    def test_tensor_case(self):
        a = np.kron(SIGMA_X, SIGMA_I)
        b = np.kron(SIGMA_X, SIGMA_Z)
        # direct 4x4 product oracle
        expected = a @ b + b @ a
        np.testing.assert_array_equal(anticommutator(a, b), expected)
        np.testing.assert_array_equal(anticommutator(a, b), 2 * np.kron(SIGMA_I, SIGMA_Z))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            anticommutator(SIGMA_X, np.eye(4))


class TestNorm:
    def test_identity(self):
        assert operator_norm(np.eye(4)) == pytest.approx(1)

    def test_x_plus_z(self):
        # characteristic polynomial of [[1,1],[1,-1]]: l^2 - 2
        assert operator_norm(SIGMA_X + SIGMA_Z) == pytest.approx(np.sqrt(2), abs=1e-14)

    def test_canonical_triple(self):
        b = canonical_observables(3).observables
        assert operator_norm(b.sum(axis=0)) == pytest.approx(np.sqrt(3), abs=1e-14)


class TestEig:
    def test_sigma_z(self):
        w, _ = eig_hermitian(SIGMA_Z)
        np.testing.assert_allclose(w, [-1, 1])

    def test_sigma_x_vectors(self):
        w, v = eig_hermitian(SIGMA_X)
        np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
        for k, ref in enumerate([np.array([1, -1]) / np.sqrt(2), np.array([1, 1]) / np.sqrt(2)]):
            assert abs(abs(np.vdot(ref, v[:, k])) - 1) < 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_random_reconstruction(self, seed):
        h = random_hermitian(8, make_rng(seed))
        w, v = eig_hermitian(h)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(h @ v - v @ np.diag(w))) <= 1e-10

    def test_nonfinite(self):
        with pytest.raises(StructuralError):
            eig_hermitian(np.array([[np.inf, 0], [0, 1]]))


class TestTensor:
    def test_z_identity(self):
        np.testing.assert_array_equal(tensor(SIGMA_Z, SIGMA_I), np.diag([1, 1, -1, -1]))

    def test_unit(self):
        m = np.arange(9).reshape(3, 3)
        np.testing.assert_array_equal(tensor(np.eye(1), m), m)

    def test_x_y_antidiagonal(self):
        out = tensor(SIGMA_X, SIGMA_Y)
        anti = np.fliplr(out).diagonal()
        np.testing.assert_array_equal(anti, [-1j, 1j, -1j, 1j])
        assert np.count_nonzero(out) == 4


class TestUnitary:
    def test_identity(self):
        assert is_unitary(np.eye(3)) == (True, 0.0)

    def test_diag(self):
        ok, res = is_unitary(np.diag([1, 2]))
        assert not ok and res == pytest.approx(3)

    @pytest.mark.parametrize("dim", [1, 2, 5, 12])
    def test_random(self, dim):
        ok, res = is_unitary(random_unitary(dim, make_rng(dim)))
        assert ok and res <= 1e-12

    def test_seeded_reproducible(self):
        np.testing.assert_array_equal(random_unitary(4, make_rng(3)), random_unitary(4, make_rng(3)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6))
def test_conjugation_preserves_spectrum(seed, dim):
    rng = make_rng(seed)
    h = random_hermitian(dim, rng)
    u = random_unitary(dim, rng)
    w1, _ = eig_hermitian(h)
    w2, _ = eig_hermitian(u @ h @ u.conj().T)
    np.testing.assert_allclose(w1, w2, atol=1e-10)
