"""Norms and structure of multipliers on finite groups.

The completely bounded (Herz-Schur) norm of a function phi is computed as the
optimal value of the factorization program

    minimize  t
    s.t.      [[S, A], [A*, T]] >= 0,   A[s,t] = phi(t^-1 s),
              diag(S) = diag(T) = t,

which can pin the diagonals to t without loss: adding a nonnegative diagonal
to a psd completion keeps it psd.  The Q norm is the dual pairing supremum
over the unit ball of that norm.  Both programs are complex SDPs solved
through the 2x2 realification.

Independent oracles for abelian groups come from the Fourier transform: the
cb norm is the l1 norm of the Fourier coefficients, and the dual norm is the
largest absolute character sum.
"""
from __future__ import annotations

import numpy as np

from . import sdp
from .groups import GroupFunction, character_table, fourier_coefficients

__all__ = [
    "Multiplier",
    "WitnessPair",
    "b2_norm",
    "b2_norm_with_certificate",
    "abelian_b2_oracle",
    "abelian_q_oracle",
    "q_norm",
    "is_positive_definite",
    "gram_matrix",
    "gns_witnesses",
    "extract_witnesses",
]

GNS_EIGENVALUE_CLAMP = 1e-10


class WitnessPair:
    """Vector families xi, eta with phi(t^-1 s) = <xi(s), eta(t)>."""

    def __init__(self, xi, eta):
        self.xi = np.asarray(xi, dtype=complex)    # (order, d)
        self.eta = np.asarray(eta, dtype=complex)  # (order, d)
        if self.xi.shape != self.eta.shape:
            raise ValueError("xi and eta must have matching shapes")
        self.dimension = self.xi.shape[1]
        self.sup_xi = float(np.max(np.linalg.norm(self.xi, axis=1)))
        self.sup_eta = float(np.max(np.linalg.norm(self.eta, axis=1)))

    def pairing_matrix(self):
        """Matrix [<xi(s), eta(t)>]_{s,t}."""
        return self.xi @ self.eta.conj().T

    def reproduction_error(self, phi):
        """Max deviation of <xi(s), eta(t)> from phi(t^-1 s)."""
        return float(np.max(np.abs(self.pairing_matrix() - gram_matrix(phi))))


class Multiplier:
    """A group function with write-once cached norms and witnesses."""

    def __init__(self, function):
        self.function = function
        self._b2 = None
        self._q = None
        self._witnesses = None

    @property
    def b2(self):
        if self._b2 is None:
            self._b2 = b2_norm(self.function)
        return self._b2

    @property
    def q(self):
        if self._q is None:
            self._q = q_norm(self.function)
        return self._q

    @property
    def witnesses(self):
        if self._witnesses is None:
            self._witnesses = extract_witnesses(self.function)
        return self._witnesses


def gram_matrix(phi):
    """G[s, t] = phi(t^-1 s)."""
    group = phi.group
    n = group.order
    idx = group.mul[group.inv].T  # idx[s, t] = t^-1 s
    return phi.values[idx]


def _b2_problem(phi):
    """Realified factorization SDP; variable layout: [R (4n x 4n), t (1 x 1)]."""
    group = phi.group
    n = group.order
    A = gram_matrix(phi)  # A[s, t] = phi(t^-1 s)
    dim = 4 * n + 1
    t_idx = 4 * n

    constraints = []
    rhs = []

    def elementary(a, b, value):
        """Realified Hermitian with entry `value` at (a, b) of the 2n complex matrix."""
        E = np.zeros((dim, dim))
        re, im = value.real / 2, value.imag / 2
        # [[Re, -Im], [Im, Re]] quadrants of the 4n block
        E[a, b] += re
        E[b, a] += re
        E[2 * n + a, 2 * n + b] += re
        E[2 * n + b, 2 * n + a] += re
        E[2 * n + a, b] += im
        E[b, 2 * n + a] += im
        E[a, 2 * n + b] -= im
        E[2 * n + b, a] -= im
        return E

    for i in range(n):
        for j in range(n):
            a, b = i, n + j
            Ere = elementary(a, b, 1.0 + 0j)
            constraints.append(Ere)
            rhs.append(2.0 * A[i, j].real)
            Eim = elementary(a, b, 1j)
            constraints.append(Eim)
            rhs.append(2.0 * A[i, j].imag)
    for a in range(2 * n):
        E = elementary(a, a, 1.0 + 0j)
        E[t_idx, t_idx] = -2.0
        constraints.append(E)
        rhs.append(0.0)

    C = np.zeros((dim, dim))
    C[t_idx, t_idx] = 1.0
    return sdp.SdpProblem(dim, C, constraints, np.array(rhs))


def b2_norm_with_certificate(phi, tol=1e-7, max_iter=200):
    """cb norm together with the optimal factorization matrix.

    Returns (norm, H, solution) where H is the complex 2n x 2n block matrix
    [[S, A], [A*, T]] recovered from the realified optimum.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    problem = _b2_problem(phi)
    solver_tol = min(tol, 1e-8)
    solution = sdp.solve(problem, tol=solver_tol, max_iter=max_iter)
    if solution.status != "optimal":
        raise sdp.SdpError(f"cb-norm program ended with status {solution.status}",
                           solution=solution)
    n = phi.group.order
    value = float(solution.X[4 * n, 4 * n])
    H = sdp.unrealify(solution.X[:4 * n, :4 * n])
    return value, H, solution


def b2_norm(phi, tol=1e-7, max_iter=200):
    """Herz-Schur (completely bounded) norm via the factorization SDP."""
    value, _, _ = b2_norm_with_certificate(phi, tol=tol, max_iter=max_iter)
    return value


def abelian_b2_oracle(phi):
    """l1 norm of the Fourier transform; equals the cb norm on abelian groups."""
    coeffs = fourier_coefficients(phi)
    return float(np.sum(np.abs(coeffs)))


def abelian_q_oracle(psi):
    """max_chi |sum_s psi(s) chi(s)|; equals the Q norm on abelian groups."""
    table = character_table(psi.group)
    return float(np.max(np.abs(table.chars @ psi.values)))


def _q_problem(psi):
    """Realified dual-pairing SDP over the unit ball of the cb norm.

    Variable: the 2n x 2n complex block matrix [[S, U], [U*, T]] with
    diag = 1, U[s, t] = u(t^-1 s) constant along group-difference classes;
    objective: maximize Re sum_g psi(g) u(g) read off the t = e column.
    """
    group = psi.group
    n = group.order
    dim = 4 * n

    def elementary(a, b, value):
        E = np.zeros((dim, dim))
        re, im = value.real / 2, value.imag / 2
        E[a, b] += re
        E[b, a] += re
        E[2 * n + a, 2 * n + b] += re
        E[2 * n + b, 2 * n + a] += re
        E[2 * n + a, b] += im
        E[b, 2 * n + a] += im
        E[a, 2 * n + b] -= im
        E[2 * n + b, a] -= im
        return E

    constraints = []
    rhs = []
    for a in range(2 * n):
        constraints.append(elementary(a, a, 1.0 + 0j))
        rhs.append(2.0)
    for g in range(n):
        for t in range(1, n):
            s = group.op(t, g)  # entry (s, n+t) carries u(t^-1 s) = u(g)
            for val in (1.0 + 0j, 1j):
                E = elementary(s, n + t, val) - elementary(g, n + 0, val)
                constraints.append(E)
                rhs.append(0.0)

    C = np.zeros((dim, dim))
    for g in range(n):
        C -= elementary(g, n + 0, psi.values[g])
    return sdp.SdpProblem(dim, C, constraints, np.array(rhs))


def q_norm(psi, tol=1e-7, max_iter=200):
    """Q norm: sup |sum psi(s) u(s)| over the cb-norm unit ball.

    The ball is invariant under unimodular scalar multiples of u, so the
    supremum of the modulus equals the supremum of the real part; a single
    SDP suffices.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    problem = _q_problem(psi)
    solver_tol = min(tol, 1e-8)
    solution = sdp.solve(problem, tol=solver_tol, max_iter=max_iter)
    if solution.status != "optimal":
        raise sdp.SdpError(f"Q-norm program ended with status {solution.status}",
                           solution=solution)
    return float(-solution.primal_obj / 2.0)


def is_positive_definite(phi, tol=1e-10):
    """True iff the Gram matrix [phi(t^-1 s)] has min eigenvalue >= -tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    G = gram_matrix(phi)
    G = (G + G.conj().T) / 2
    return float(np.linalg.eigvalsh(G)[0]) >= -tol


def _factor_psd(G, clamp=GNS_EIGENVALUE_CLAMP):
    """F with F F* = G for Hermitian psd G (small negatives clamped to 0)."""
    w, V = np.linalg.eigh((G + G.conj().T) / 2)
    w = np.where(w < clamp, np.maximum(w, 0.0), w)
    w[w < 0] = 0.0
    return V * np.sqrt(w)


def gns_witnesses(phi):
    """Witnesses of a positive definite function from its Gram factorization.

    xi = eta = rows of F where F F* = [phi(t^-1 s)]; both sup norms equal
    sqrt(phi(e)).
    """
    G = gram_matrix(phi)
    Gh = (G + G.conj().T) / 2
    if float(np.linalg.eigvalsh(Gh)[0]) < -GNS_EIGENVALUE_CLAMP:
        raise ValueError("function is not positive definite")
    F = _factor_psd(Gh)
    return WitnessPair(F, F)


def extract_witnesses(phi, tol=1e-7):
    """Near-optimal witnesses read off the cb-norm SDP certificate.

    Guarantees reproduction error <= tol and sup_xi * sup_eta <= cb norm + tol,
    with the two sup norms balanced.
    """
    value, H, _ = b2_norm_with_certificate(phi, tol=tol)
    n = phi.group.order
    F = _factor_psd(H, clamp=0.0)
    xi = F[:n]
    eta = F[n:]
    sup_xi = float(np.max(np.linalg.norm(xi, axis=1)))
    sup_eta = float(np.max(np.linalg.norm(eta, axis=1)))
    if sup_xi > 0 and sup_eta > 0:
        c = np.sqrt(sup_eta / sup_xi)
        xi = xi * c
        eta = eta / c
    return WitnessPair(xi, eta)
