import numpy as np
import pytest

from vnelab.algebra import (AlgebraElement, AlgebraShape, ShapeMismatch,
                            diagonal_shape, is_projection, l2_inner, l2_norm,
                            operator_norm, trace)


def test_shape_validation():
    with pytest.raises(ValueError):
        AlgebraShape([])
    with pytest.raises(ValueError):
        AlgebraShape([(0, 1.0)])
    with pytest.raises(ValueError):
        AlgebraShape([(2, 0.0)])
    s = AlgebraShape([(2, 1.0), (3, 0.5)])
    assert s.l2_dim == 4 + 9


def test_trace_weights():
    s = AlgebraShape([(2, 1.0), (1, 3.0)])
    x = AlgebraElement(s, [np.diag([1.0, 2.0]), np.array([[4.0]])])
    assert trace(x) == pytest.approx(1 + 2 + 3 * 4)
    assert trace(s.identity()) == pytest.approx(2 + 3)


def test_l2_round_trip_and_inner():
    s = AlgebraShape([(2, 2.0), (3, 0.25)])
    rng = np.random.default_rng(0)
    a = s.random_element(rng)
    b = s.random_element(rng)
    va, vb = a.to_l2(), b.to_l2()
    assert abs(np.vdot(vb, va) - l2_inner(a, b)) < 1e-12
    back = AlgebraElement.from_l2(s, va)
    assert operator_norm(back - a) < 1e-12
    assert l2_norm(a) == pytest.approx(np.linalg.norm(va))


def test_operator_norm_matches_numpy():
    s = AlgebraShape([(3, 1.0), (2, 1.0)])
    rng = np.random.default_rng(1)
    x = s.random_element(rng)
    expected = max(np.linalg.norm(b, ord=2) for b in x.blocks)
    assert operator_norm(x) == pytest.approx(expected)


def test_projection_detection():
    s = AlgebraShape([(2, 1.0)])
    p = AlgebraElement(s, [np.diag([1.0, 0.0])])
    assert is_projection(p)
    assert not is_projection(AlgebraElement(s, [np.diag([1.0, 0.5])]))
    v = np.array([[1.0, 1.0], [1.0, 1.0]]) / 2
    assert is_projection(AlgebraElement(s, [v]))


def test_diagonal_shape_and_values():
    s = diagonal_shape(3)
    x = AlgebraElement.diagonal(s, [1.0, 2.0, 3.0])
    assert np.allclose(x.diag_values(), [1, 2, 3])
    assert trace(x) == pytest.approx(6.0)
    with pytest.raises(ShapeMismatch):
        AlgebraElement.diagonal(AlgebraShape([(2, 1.0)]), [1.0])


def test_algebra_operations():
    s = AlgebraShape([(2, 1.0)])
    rng = np.random.default_rng(2)
    a = s.random_element(rng)
    b = s.random_element(rng)
    assert operator_norm((a + b) - (b + a)) < 1e-15
    assert operator_norm((a @ b).adjoint() - (b.adjoint() @ a.adjoint())) < 1e-12
    assert operator_norm(2.0 * a - (a + a)) < 1e-15


def test_shape_mismatch_raises():
    a = AlgebraShape([(2, 1.0)]).identity()
    b = AlgebraShape([(3, 1.0)]).identity()
    with pytest.raises(ShapeMismatch):
        a + b
