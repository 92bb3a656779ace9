import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contraction_lab.errors import NonFiniteError, NonSymmetricError
from contraction_lab.linalg import (
    is_negative_definite,
    log_norm_2,
    max_eigenvalue,
    spectral_norm,
    symmetric_eigenvalues,
    symmetric_part,
)


def random_symmetric(rng, n, scale=1.0):
    a = rng.normal(size=(n, n), scale=scale)
    return (a + a.T) / 2


class TestMaxEigenvalue:
    def test_identity(self):
        assert max_eigenvalue(np.eye(2)) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        assert max_eigenvalue(np.diag([-1.0, -3.0])) == pytest.approx(-1.0, abs=1e-12)

    def test_two_by_two(self):
        assert max_eigenvalue([[2.0, 1.0], [1.0, 2.0]]) == pytest.approx(3.0, abs=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetricError):
            max_eigenvalue([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFiniteError):
            max_eigenvalue([[np.nan, 0.0], [0.0, 1.0]])

    def test_matches_lapack_oracle(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a = random_symmetric(rng, n, scale=rng.uniform(0.1, 10))
            expected = np.linalg.eigvalsh(a)
            got = symmetric_eigenvalues(a)
            assert np.allclose(got, expected, rtol=1e-10, atol=1e-12)

    def test_similarity_invariance(self, rng):
        # QR of a random matrix gives a random orthogonal Q; the largest
        # eigenvalue of Q D Q^T must equal the largest diagonal of D.
        for _ in range(100):
            n = int(rng.integers(2, 9))
            q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            d = rng.normal(size=n, scale=5)
            a = symmetric_part(q @ np.diag(d) @ q.T)
            assert max_eigenvalue(a) == pytest.approx(d.max(), rel=1e-9, abs=1e-10)


class TestSpectralNorm:
    def test_zero(self):
        assert spectral_norm(np.zeros((3, 3))) == 0.0

    def test_diagonal_abs_max(self):
        assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0, abs=1e-12)

    def test_single_singular_value(self):
        assert spectral_norm([[0.0, 2.0], [0.0, 0.0]]) == pytest.approx(2.0, abs=1e-12)

    def test_matches_numpy(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n))
            assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-9, abs=1e-11)


class TestLogNorm:
    def test_identity(self):
        assert log_norm_2(np.eye(3)) == pytest.approx(1.0, abs=1e-12)

    def test_skew_symmetric(self):
        assert log_norm_2([[0.0, 1.0], [-1.0, 0.0]]) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal(self):
        assert log_norm_2(np.diag([-1.0, -2.0])) == pytest.approx(-1.0, abs=1e-12)

    def test_bounded_by_spectral_norm(self, rng):
        for _ in range(200):
            a = rng.normal(size=(4, 4))
            assert log_norm_2(a) <= spectral_norm(a) + 1e-10


class TestNegativeDefinite:
    def test_strictly_negative(self):
        assert is_negative_definite(np.diag([-1.0, -1.0]), margin=0.5)

    def test_zero_eigenvalue_fails_strict(self):
        assert not is_negative_definite(np.diag([-1.0, 0.0]), margin=0.0)

    def test_with_margin(self):
        assert is_negative_definite([[-2.0, 1.0], [1.0, -2.0]], margin=0.9)

    def test_margin_boundary(self):
        assert not is_negative_definite([[-2.0, 1.0], [1.0, -2.0]], margin=1.1)

    def test_rejects_negative_margin(self):
        with pytest.raises(ValueError):
            is_negative_definite(np.eye(2), margin=-1.0)


class TestOrderingLemma:
    """mu_2 is monotone along the positive-semidefinite order."""

    def test_thousand_cases(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            a = random_symmetric(rng, n, scale=3.0)
            r = rng.normal(size=(n, n))
            b = a + r.T @ r  # b - a is positive semidefinite
            assert log_norm_2(a) <= log_norm_2(b) + 1e-10


class TestProductLemma:
    """mu_2(AB) <= ||A||_2 ||B||_2."""

    def test_thousand_cases(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n), scale=rng.uniform(0.1, 3))
            b = rng.normal(size=(n, n), scale=rng.uniform(0.1, 3))
            assert log_norm_2(a @ b) <= spectral_norm(a) * spectral_norm(b) + 1e-9


class TestSubadditivity:
    def test_thousand_cases(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n))
            b = rng.normal(size=(n, n))
            assert log_norm_2(a + b) <= log_norm_2(a) + log_norm_2(b) + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=6))
def test_diagonal_max_eigenvalue_is_max_entry(entries):
    assert max_eigenvalue(np.diag(entries)) == pytest.approx(max(entries), rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 5),
    st.floats(0.1, 10),
    st.integers(0, 2**32 - 1),
)
def test_scaling_homogeneity(n, scale, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    assert spectral_norm(scale * a) == pytest.approx(scale * spectral_norm(a), rel=1e-10, abs=1e-12)
    assert log_norm_2(scale * a) == pytest.approx(scale * log_norm_2(a), rel=1e-10, abs=1e-10)
