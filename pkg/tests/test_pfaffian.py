import numpy as np
import pytest
from hypothesis import given, strategies as st

from matchkernel.pfaffian import check_skew, pfaffian, pfaffian_batch


def random_skew(rng, n, complex_=True):
    A = rng.normal(size=(n, n))
    if complex_:
        A = A + 1j * rng.normal(size=(n, n))
    return A - A.T


def laplace_pfaffian(M):
    """Expansion along the first row; exponential, fine up to 10x10."""
    n = M.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        keep = [k for k in range(n) if k not in (0, j)]
        total += (-1) ** (j + 1) * M[0, j] * laplace_pfaffian(M[np.ix_(keep, keep)])
    return total


def test_two_by_two():
    assert pfaffian(np.array([[0, 2.5], [-2.5, 0]])) == 2.5


def test_four_by_four_closed_form():
    M = np.zeros((4, 4))
    M[0, 1] = M[2, 3] = 1
    assert pfaffian(M - M.T) == pytest.approx(1.0, abs=1e-15)


def test_four_by_four_general(rng):
    M = random_skew(rng, 4)
    closed = M[0, 1] * M[2, 3] - M[0, 2] * M[1, 3] + M[0, 3] * M[1, 2]
    assert abs(pfaffian(M) - closed) < 1e-13


def test_empty_is_one():
    assert pfaffian(np.zeros((0, 0))) == 1
    assert np.array_equal(pfaffian_batch(np.zeros((3, 0, 0))), np.ones(3))


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_matches_laplace(rng, n):
    for _ in range(5):
        M = random_skew(rng, n)
        assert abs(pfaffian(M) - laplace_pfaffian(M)) <= 1e-10 * max(1, abs(laplace_pfaffian(M)))


@pytest.mark.parametrize("n", range(2, 41, 2))
def test_square_is_determinant(rng, n):
    for cplx in (True, False):
        M = random_skew(rng, n, cplx)
        pf, det = pfaffian(M), np.linalg.det(M)
        assert abs(pf ** 2 - det) <= 1e-8 * abs(det)


def test_real_input_gives_real_output(rng):
    assert isinstance(pfaffian(random_skew(rng, 6, False)), float)
    assert pfaffian_batch(random_skew(rng, 6, False)[None]).dtype == np.float64


@given(st.integers(1, 10), st.data())
def test_swap_flips_sign(m, data):
    rng = np.random.default_rng(m)
    n = 2 * m
    M = random_skew(rng, n)
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(0, n - 1).filter(lambda v: v != i))
    perm = np.arange(n)
    perm[[i, j]] = perm[[j, i]]
    P = M[np.ix_(perm, perm)]
    assert abs(pfaffian(P) + pfaffian(M)) <= 1e-10 * max(1, abs(pfaffian(M)))


@given(st.integers(1, 8), st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_scaling(m, lam):
    M = random_skew(np.random.default_rng(m), 2 * m)
    expected = lam ** m * pfaffian(M)
    assert abs(pfaffian(lam * M) - expected) <= 1e-8 * abs(expected)


def test_block_multiplicative(rng):
    for a, b in [(2, 2), (4, 6), (8, 2), (10, 12)]:
        A, B = random_skew(rng, a), random_skew(rng, b)
        D = np.zeros((a + b, a + b), dtype=complex)
        D[:a, :a], D[a:, a:] = A, B
        expected = pfaffian(A) * pfaffian(B)
        assert abs(pfaffian(D) - expected) <= 1e-8 * abs(expected)


def test_singular_is_exact_zero(rng):
    v = rng.normal(size=(6, 2))
    M = v @ np.array([[0, 1], [-1, 0]]) @ v.T          # rank 2
    assert pfaffian(M) == 0
    assert pfaffian(np.zeros((4, 4))) == 0


def test_batch_matches_single(rng):
    stack = np.stack([random_skew(rng, 8) for _ in range(6)])
    got = pfaffian_batch(stack)
    assert np.allclose(got, [pfaffian(m) for m in stack], rtol=1e-13)
    assert np.array_equal(stack, stack.copy())  # input untouched


def test_input_not_modified(rng):
    M = random_skew(rng, 8)
    keep = M.copy()
    pfaffian(M)
    assert np.array_equal(M, keep)


class TestErrors:
    def test_odd(self):
        with pytest.raises(ValueError, match="odd"):
            pfaffian(np.zeros((3, 3)))

    def test_not_skew(self):
        with pytest.raises(ValueError, match="skew"):
            pfaffian(np.array([[0, 1], [1, 0]]))

    def test_skew_tolerance_is_relative(self):
        M = np.array([[0, 1e6], [-1e6 + 1e-5, 0]])
        check_skew(M)

    def test_non_square(self):
        with pytest.raises(ValueError):
            pfaffian(np.zeros((2, 4)))

    def test_batch_shape(self):
        with pytest.raises(ValueError):
            pfaffian_batch(np.zeros((2, 2)))
