"""Finite-dimensional semifinite algebras: direct sums of matrix blocks.

An algebra is a direct sum of full complex matrix blocks; the trace is a
weighted sum of the blockwise matrix traces (weights > 0 keep it faithful).
The associated L2 space carries the inner product <a,b> = sum_k w_k tr(b_k* a_k).
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "AlgebraShape",
    "AlgebraElement",
    "trace",
    "l2_inner",
    "operator_norm",
    "is_projection",
    "diagonal_shape",
]


class ShapeMismatch(ValueError):
    """Elements live on different algebra shapes."""


class AlgebraShape:
    """Direct sum shape: a sequence of (block dimension, trace weight)."""

    def __init__(self, blocks):
        blocks = tuple((int(d), float(w)) for d, w in blocks)
        if not blocks:
            raise ValueError("shape needs at least one block")
        for d, w in blocks:
            if d < 1:
                raise ValueError("block dims must be >= 1")
            if w <= 0:
                raise ValueError("trace weights must be > 0")
        self.blocks = blocks
        self.dims = tuple(d for d, _ in blocks)
        self.weights = tuple(w for _, w in blocks)
        # L2 coordinates: blocks flattened in order, scaled by sqrt(weight)
        self.l2_dim = sum(d * d for d in self.dims)
        self._offsets = np.concatenate([[0], np.cumsum([d * d for d in self.dims])])

    def identity(self):
        return AlgebraElement(self, [np.eye(d, dtype=complex) for d in self.dims])

    def zero(self):
        return AlgebraElement(self, [np.zeros((d, d), dtype=complex) for d in self.dims])

    def random_element(self, rng):
        return AlgebraElement(self, [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in self.dims
        ])

    def __eq__(self, other):
        return isinstance(other, AlgebraShape) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"AlgebraShape({self.blocks})"


def diagonal_shape(n, weights=None):
    """Abelian algebra on n points: n one-dimensional blocks."""
    if weights is None:
        weights = [1.0] * n
    return AlgebraShape([(1, w) for w in weights])


class AlgebraElement:
    """Element of a multi-matrix algebra: one square matrix per block."""

    def __init__(self, shape, blocks):
        blocks = [np.asarray(b, dtype=complex) for b in blocks]
        if len(blocks) != len(shape.dims):
            raise ShapeMismatch("wrong number of blocks")
        for b, d in zip(blocks, shape.dims):
            if b.shape != (d, d):
                raise ShapeMismatch(f"block has shape {b.shape}, expected ({d},{d})")
        self.shape = shape
        self.blocks = blocks

    def _check(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch("elements live on different shapes")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return AlgebraElement(self.shape, [scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self):
        return AlgebraElement(self.shape, [b.conj().T for b in self.blocks])

    def to_l2(self):
        """Coordinates in the weighted-orthonormal matrix-unit basis."""
        return np.concatenate([
            np.sqrt(w) * b.ravel() for b, w in zip(self.blocks, self.shape.weights)
        ])

    @classmethod
    def from_l2(cls, shape, vec):
        blocks = []
        for (d, w), off in zip(shape.blocks, shape._offsets):
            blocks.append(vec[off:off + d * d].reshape(d, d) / np.sqrt(w))
        return cls(shape, blocks)

    @classmethod
    def diagonal(cls, shape, diag):
        """Diagonal element of an abelian (all blocks 1x1) shape."""
        if any(d != 1 for d in shape.dims):
            raise ShapeMismatch("diagonal() needs an abelian shape")
        return cls(shape, [np.array([[v]], dtype=complex) for v in diag])

    def diag_values(self):
        if any(d != 1 for d in self.shape.dims):
            raise ShapeMismatch("diag_values() needs an abelian shape")
        return np.array([b[0, 0] for b in self.blocks])

    def __repr__(self):
        return f"AlgebraElement({self.shape!r})"


def trace(x):
    """Weighted trace: sum_k weight_k * tr(x_k)."""
    return complex(sum(w * np.trace(b) for b, w in zip(x.blocks, x.shape.weights)))


def l2_inner(a, b):
    """<a, b> = sum_k weight_k * tr(b_k* a_k)."""
    a._check(b)
    return complex(sum(
        w * np.sum(bk.conj() * ak)
        for ak, bk, w in zip(a.blocks, b.blocks, a.shape.weights)
    ))


def l2_norm(a):
    return float(np.sqrt(max(l2_inner(a, a).real, 0.0)))


def operator_norm(x):
    """Largest singular value over all blocks."""
    return max(float(np.linalg.svd(b, compute_uv=False)[0]) if b.size else 0.0
               for b in x.blocks)


def is_projection(p, tol=1e-10):
    """True iff p is selfadjoint and idempotent up to tol in operator norm."""
    return (operator_norm(p @ p - p) <= tol
            and operator_norm(p.adjoint() - p) <= tol)
