import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from robustfl import linalg
from robustfl.errors import ValidationError

# zero or at least 1e-3 in magnitude: subnormal entries make the pseudoinverse overflow
finite = st.one_of(st.just(0.0), st.floats(1e-3, 1e3), st.floats(-1e3, -1e-3))
matrices = st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(lambda s: arrays(float, s, elements=finite))


def sv_oracle(a):
    """Singular values from the eigenvalues of the smaller Gram matrix."""
    g = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    return np.sqrt(np.clip(np.linalg.eigvalsh(g), 0, None))


def test_singular_values_examples():
    np.testing.assert_array_equal(linalg.singular_values(np.eye(2)), [1, 1])
    np.testing.assert_allclose(linalg.singular_values(np.diag([3.0, 2.0])), [2, 3])
    np.testing.assert_array_equal(linalg.singular_values(np.zeros((2, 3))), [0, 0])


def test_singular_values_ascending_and_length(rng):
    a = rng.standard_normal((3, 7))
    s = linalg.singular_values(a)
    assert s.shape == (3,)
    assert np.all(np.diff(s) >= 0)
    np.testing.assert_allclose(s, sv_oracle(a), rtol=1e-10)


def test_nonfinite_rejected():
    with pytest.raises(ValidationError):
        linalg.singular_values(np.array([[1.0, np.nan]]))
    with pytest.raises(ValidationError):
        linalg.min_singular_value(np.array([[np.inf]]))


def test_min_singular_value_examples(rng):
    assert linalg.min_singular_value(np.diag([3.0, 2.0])) == pytest.approx(2.0)
    a = rng.standard_normal((3, 5))
    a[1] = 0.0
    assert linalg.min_singular_value(a) == pytest.approx(0.0, abs=1e-14)
    b = rng.standard_normal((4, 4))
    assert linalg.min_singular_value(2.5 * b) == pytest.approx(2.5 * linalg.min_singular_value(b), rel=1e-12)


def test_pseudoinverse_examples():
    np.testing.assert_allclose(linalg.pseudoinverse(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(linalg.pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_allclose(linalg.pseudoinverse(np.array([[3.0, 4.0]])), [[0.12], [0.16]])


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_moore_penrose_identities(a):
    scale = max(1.0, np.abs(a).max())
    a = a / scale
    p = linalg.pseudoinverse(a)
    tol = 1e-8
    np.testing.assert_allclose(a @ p @ a, a, atol=tol)
    np.testing.assert_allclose(p @ a @ p, p, atol=tol * max(1.0, np.abs(p).max() ** 2))
    np.testing.assert_allclose((a @ p).T, a @ p, atol=tol * max(1.0, np.abs(p).max()))
    np.testing.assert_allclose((p @ a).T, p @ a, atol=tol * max(1.0, np.abs(p).max()))


def test_double_pseudoinverse_full_rank(rng):
    for shape in [(3, 3), (2, 5), (6, 4)]:
        a = rng.standard_normal(shape)
        np.testing.assert_allclose(linalg.pseudoinverse(linalg.pseudoinverse(a)), a, atol=1e-8)


def test_numerical_rank_examples(rng):
    assert linalg.numerical_rank(np.eye(4)) == 4
    assert linalg.numerical_rank(np.outer(rng.standard_normal(3), rng.standard_normal(5))) == 1
    assert linalg.numerical_rank(np.zeros((3, 3))) == 0
    with pytest.raises(ValidationError):
        linalg.numerical_rank(np.eye(2), rel_tol=0.0)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_max_singular_value_is_spectral_norm(a):
    expected = sv_oracle(a).max()
    assert linalg.spectral_norm(a) == pytest.approx(expected, rel=1e-10, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_permutation_invariance(a, rnd):
    rows = list(range(a.shape[0]))
    cols = list(range(a.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    np.testing.assert_allclose(
        linalg.singular_values(a[rows][:, cols]), linalg.singular_values(a), rtol=1e-10, atol=1e-9
    )
