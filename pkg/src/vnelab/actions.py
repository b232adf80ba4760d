"""Trace-preserving group actions, fundamental domains, and couplings.

An action is stored as, per group element, a weight-preserving permutation of
the blocks together with one unitary per target block:

    sigma_g(x)_k = U[g][k] @ x[perm_g^{-1}(k)] @ U[g][k]*

Couplings bundle two commuting actions with fundamental-domain projections
and can be built from three canonical constructions: the diagonal coupling of
a group with itself, the product coupling of two finite "measure" spaces, and
the coupling of two abelian groups of equal order acting on the full matrix
algebra of one of them.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import (AlgebraElement, AlgebraShape, diagonal_shape, is_projection,
                      l2_inner, operator_norm, trace)
from .groups import FiniteGroup, GroupFunction, character_table

__all__ = [
    "TraceAction",
    "CouplingRecord",
    "KoopmanMatrix",
    "is_fundamental_domain",
    "theta_embedding",
    "equivariance_defect",
    "koopman",
    "coupling_index",
    "coupling_index_exact",
    "build_diagonal_coupling",
    "build_me_product_coupling",
    "build_wstar_coupling",
]

STRUCT_TOL = 1e-10


class ActionError(ValueError):
    """Invalid action, projection, or coupling data."""


class TraceAction:
    """A trace-preserving action of a finite group on a multi-matrix algebra."""

    def __init__(self, group, shape, block_perm, unitaries, validate=True):
        self.group = group
        self.shape = shape
        self.block_perm = np.asarray(block_perm, dtype=np.int64)
        self.unitaries = [[np.asarray(u, dtype=complex) for u in row] for row in unitaries]
        nb = len(shape.dims)
        if self.block_perm.shape != (group.order, nb):
            raise ActionError("block permutation table has wrong shape")
        self._perm_inv = np.empty_like(self.block_perm)
        for g in range(group.order):
            self._perm_inv[g, self.block_perm[g]] = np.arange(nb)
        if validate:
            self._validate()

    def apply(self, g, x):
        """sigma_g(x)."""
        if x.shape != self.shape:
            raise ActionError("element lives on a different shape")
        out = []
        for k in range(len(self.shape.dims)):
            src = self._perm_inv[g, k]
            u = self.unitaries[g][k]
            out.append(u @ x.blocks[src] @ u.conj().T)
        return AlgebraElement(self.shape, out)

    def _matrix_units(self):
        units = []
        for k, d in enumerate(self.shape.dims):
            for i in range(d):
                for j in range(d):
                    z = self.shape.zero()
                    z.blocks[k][i, j] = 1.0
                    units.append(z)
        return units

    def _validate(self):
        n = self.group.order
        dims = self.shape.dims
        weights = self.shape.weights
        for g in range(n):
            for k, d in enumerate(dims):
                src = self._perm_inv[g, k]
                if dims[src] != d or abs(weights[src] - weights[k]) > STRUCT_TOL:
                    raise ActionError("block permutation must preserve dims and weights")
                u = self.unitaries[g][k]
                if u.shape != (d, d):
                    raise ActionError("unitary has wrong shape")
                if np.max(np.abs(u @ u.conj().T - np.eye(d))) > STRUCT_TOL:
                    raise ActionError(f"non-unitary implementation at g={g}, block {k}")
        units = self._matrix_units()
        # identity acts as identity, compared as conjugation maps
        for m in units:
            if operator_norm(self.apply(0, m) - m) > STRUCT_TOL:
                raise ActionError("identity element does not act trivially")
        # homomorphism as automorphisms (unitaries may differ by phase)
        rng = np.random.default_rng(7)
        if n <= 8:
            pairs = [(g, h) for g in range(n) for h in range(n)]
        else:
            pairs = [tuple(p) for p in rng.integers(0, n, size=(64, 2))]
        for g, h in pairs:
            gh = self.group.op(g, h)
            for m in units:
                lhs = self.apply(g, self.apply(h, m))
                rhs = self.apply(gh, m)
                if operator_norm(lhs - rhs) > STRUCT_TOL:
                    raise ActionError(f"not a homomorphism at ({g},{h})")
        # trace preservation is automatic, asserted anyway on a random element
        x = self.shape.random_element(rng)
        for g in range(n):
            if abs(trace(self.apply(g, x)) - trace(x)) > 1e-8 * (1 + abs(trace(x))):
                raise ActionError(f"action does not preserve the trace at g={g}")


def _commute_defect(action_a, action_b):
    units = action_a._matrix_units()
    worst = 0.0
    for g in range(action_a.group.order):
        for s in range(action_b.group.order):
            for m in units:
                d = operator_norm(action_a.apply(g, action_b.apply(s, m))
                                  - action_b.apply(s, action_a.apply(g, m)))
                worst = max(worst, d)
    return worst


class CouplingRecord:
    """Two commuting actions with fundamental-domain projections q (Gamma), p (Lambda)."""

    def __init__(self, gamma_action, lambda_action, q, p, label="coupling",
                 pairing=None, validate=True):
        if gamma_action.shape != lambda_action.shape:
            raise ActionError("the two actions must share one algebra")
        self.gamma_action = gamma_action
        self.lambda_action = lambda_action
        self.q = q
        self.p = p
        self.label = label
        self.pairing = pairing  # character pairing of a W*-coupling, if any
        if validate:
            self.validate()

    @property
    def gamma(self):
        return self.gamma_action.group

    @property
    def lam(self):
        return self.lambda_action.group

    def validate(self, tol=STRUCT_TOL):
        if _commute_defect(self.gamma_action, self.lambda_action) > tol:
            raise ActionError("the two actions do not commute")
        if not is_fundamental_domain(self.gamma_action, self.q, tol):
            raise ActionError("q is not a fundamental domain for the Gamma-action")
        if not is_fundamental_domain(self.lambda_action, self.p, tol):
            raise ActionError("p is not a fundamental domain for the Lambda-action")
        if trace(self.q).real <= 0 or trace(self.p).real <= 0:
            raise ActionError("fundamental domains must have positive trace")


def is_fundamental_domain(action, p, tol=STRUCT_TOL):
    """True iff p is a projection whose orbit sums to the identity."""
    if p.shape != action.shape:
        raise ActionError("projection lives on a different shape")
    if not is_projection(p, tol):
        return False
    total = action.shape.zero()
    for s in range(action.group.order):
        total = total + action.apply(s, p)
    return operator_norm(total - action.shape.identity()) <= tol


def theta_embedding(action, p, f, check=True):
    """Embed a function on the group into the algebra: sum_s f(s) sigma_s(p)."""
    if f.group is not action.group and f.group != action.group:
        raise ActionError("function lives on a different group")
    if check and not is_fundamental_domain(action, p):
        raise ActionError("p is not a fundamental domain")
    out = action.shape.zero()
    for s in range(action.group.order):
        out = out + f.values[s] * action.apply(s, p)
    return out


def equivariance_defect(action, p):
    """Max norm defect of sigma_lam(theta_p(f)) = theta_p(f(lam^{-1} .)).

    Evaluated over all group elements and the delta-function basis; the
    embedding theorem makes this <= 1e-10 for any valid fundamental domain.
    """
    group = action.group
    worst = 0.0
    sigma_p = [action.apply(s, p) for s in range(group.order)]
    for lam in range(group.order):
        for s in range(group.order):
            # f = delta_s: theta_p(f) = sigma_s(p); L_lam f = delta_{lam s}
            lhs = action.apply(lam, sigma_p[s])
            rhs = sigma_p[group.op(lam, s)]
            worst = max(worst, operator_norm(lhs - rhs))
    return worst


class KoopmanMatrix:
    """Unitaries implementing an action on the L2 space of its algebra."""

    def __init__(self, action, matrices):
        self.action = action
        self.matrices = matrices

    def matrix(self, g):
        return self.matrices[g]


def koopman(action):
    """Matrix of a |-> sigma_g(a) on L2 in the weighted matrix-unit basis."""
    shape = action.shape
    D = shape.l2_dim
    basis = []
    for k, d in enumerate(shape.dims):
        for i in range(d):
            for j in range(d):
                z = shape.zero()
                z.blocks[k][i, j] = 1.0
                basis.append(z)
    mats = []
    for g in range(action.group.order):
        m = np.empty((D, D), dtype=complex)
        for col, b in enumerate(basis):
            m[:, col] = action.apply(g, b).to_l2() / np.sqrt(
                shape.weights[_block_of(shape, col)])
        mats.append(m)
    return KoopmanMatrix(action, mats)


def _block_of(shape, flat_index):
    for k, off in enumerate(shape._offsets[1:]):
        if flat_index < off:
            return k
    raise IndexError(flat_index)


def coupling_index(c):
    """[Gamma : Lambda] = Tr(q) / Tr(p)."""
    return trace(c.q).real / trace(c.p).real


def coupling_index_exact(c):
    """Index as an exact rational when both traces are rational.

    Diagonal-algebra couplings with integer weights have integer traces; the
    matrix-algebra coupling shares one domain, so the ratio is exactly 1.
    """
    if c.q is c.p:
        return Fraction(1)
    tq = trace(c.q).real
    tp = trace(c.p).real
    return Fraction(round(tq * 10**9), 10**9) / Fraction(round(tp * 10**9), 10**9)


# ---------------------------------------------------------------------------
# canonical coupling constructions

def _permutation_action(group, shape, point_perm):
    """Action on a diagonal algebra by permuting points; point_perm[g][x] = g.x."""
    n = group.order
    block_perm = np.asarray(point_perm, dtype=np.int64)
    unitaries = [[np.eye(1, dtype=complex) for _ in range(len(shape.dims))]
                 for _ in range(n)]
    return TraceAction(group, shape, block_perm, unitaries)


def build_diagonal_coupling(G):
    """G acting on functions on G by left and by right translation; q = p = delta_e."""
    shape = diagonal_shape(G.order)
    # sigma_gamma(f)(x) = f(gamma^{-1} x): point x of the result comes from
    # gamma^{-1}x, i.e. the indicator of {y} maps to the indicator of {gamma y}
    left = np.array([[G.op(g, x) for x in range(G.order)] for g in range(G.order)])
    # sigma_t(f)(x) = f(x t): indicator of {y} maps to indicator of {y t^{-1}}
    right = np.array([[G.op(x, G.inverse(t)) for x in range(G.order)]
                      for t in range(G.order)])
    gamma_action = _permutation_action(G, shape, left)
    lambda_action = _permutation_action(G, shape, right)
    delta_e = AlgebraElement.diagonal(shape, np.eye(G.order)[0])
    return CouplingRecord(gamma_action, lambda_action, delta_e, delta_e,
                          label=f"diagonal({G.name})")


def build_me_product_coupling(G, H):
    """Product-space coupling: G x H acting coordinatewise on G x H points."""
    nG, nH = G.order, H.order
    shape = diagonal_shape(nG * nH)

    def idx(g, h):
        return g * nH + h

    left = np.empty((nG, nG * nH), dtype=np.int64)
    for gamma in range(nG):
        for g in range(nG):
            for h in range(nH):
                left[gamma, idx(g, h)] = idx(G.op(gamma, g), h)
    right = np.empty((nH, nG * nH), dtype=np.int64)
    for t in range(nH):
        for g in range(nG):
            for h in range(nH):
                right[t, idx(g, h)] = idx(g, H.op(t, h))
    gamma_action = _permutation_action(G, shape, left)
    lambda_action = _permutation_action(H, shape, right)
    q_diag = np.zeros(nG * nH)
    q_diag[[idx(0, h) for h in range(nH)]] = 1.0  # {e} x H
    p_diag = np.zeros(nG * nH)
    p_diag[[idx(g, 0) for g in range(nG)]] = 1.0  # G x {e}
    q = AlgebraElement.diagonal(shape, q_diag)
    p = AlgebraElement.diagonal(shape, p_diag)
    return CouplingRecord(gamma_action, lambda_action, q, p,
                          label=f"me_product({G.name},{H.name})")


def _right_regular(H):
    """rho_t delta_x = delta_{x t^{-1}} as matrices on l2(H)."""
    n = H.order
    mats = []
    for t in range(n):
        m = np.zeros((n, n), dtype=complex)
        for x in range(n):
            m[H.op(x, H.inverse(t)), x] = 1.0
        mats.append(m)
    return mats


def build_wstar_coupling(G, H, pairing=None):
    """Coupling of two abelian groups of equal order on the full matrix algebra.

    Lambda = H acts by conjugation with its right regular representation rho;
    Gamma = G acts by conjugation with Theta(gamma) = sum_chi chi(gamma) P_{pairing(chi)},
    where P_eta = (1/n) sum_t eta(t) rho_t are the spectral projections of rho.
    The rank-one projection onto the delta_e vector is a common fundamental
    domain, so the index is 1.

    `pairing` is a permutation array matching character row j of G to character
    row pairing[j] of H (default: identity on the lexicographic enumerations).
    """
    if not (G.is_abelian and H.is_abelian):
        raise ActionError("matrix-algebra coupling needs abelian groups")
    if G.order != H.order:
        raise ActionError("matrix-algebra coupling needs equal group orders")
    n = G.order
    if pairing is None:
        pairing = list(range(n))
    pairing = [int(j) for j in pairing]
    if sorted(pairing) != list(range(n)):
        raise ActionError("pairing must be a bijection of character indices")

    shape = AlgebraShape([(n, 1.0)])
    rho = _right_regular(H)
    chars_G = character_table(G).chars
    chars_H = character_table(H).chars

    # spectral projections P_eta = (1/n) sum_t eta(t) rho_t
    projections = []
    for j in range(n):
        P = sum(chars_H[j, t] * rho[t] for t in range(n)) / n
        projections.append(P)

    theta = []
    for gamma in range(n):
        theta.append(sum(chars_G[j, gamma] * projections[pairing[j]] for j in range(n)))

    nb = 1
    perm = np.zeros((n, nb), dtype=np.int64)
    gamma_action = TraceAction(G, shape, perm, [[u] for u in theta])
    lambda_action = TraceAction(H, shape, perm, [[u] for u in rho])

    P_e = np.zeros((n, n), dtype=complex)
    P_e[0, 0] = 1.0
    p = AlgebraElement(shape, [P_e])
    return CouplingRecord(gamma_action, lambda_action, p, p,
                          label=f"wstar({G.name},{H.name})", pairing=pairing)
