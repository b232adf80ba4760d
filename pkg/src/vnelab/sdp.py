"""Dense semidefinite programming over real symmetric matrices.

Standard form:

    minimize    <C, X>
    subject to  <A_i, X> = b_i,  i = 1..m
                X >= 0  (positive semidefinite)

solved by a primal-dual interior-point method with Nesterov-Todd scaling and
a Mehrotra predictor-corrector step.  Everything is dense; constraint
matrices are internally stored in a padded coordinate format because the norm
programs built on top of this module have only a handful of nonzeros per
constraint.

Complex Hermitian data enters through the 2x2 block realification
[[Re, -Im], [Im, Re]], which preserves positive semidefiniteness both ways
and doubles trace inner products.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "SdpError",
    "solve",
    "realify",
    "unrealify",
    "record_solves",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
INFEASIBILITY_BOUND = 1e8
STEP_FRACTION = 0.98


class SdpError(RuntimeError):
    """Solver failure with diagnostics attached."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


@dataclass
class SdpProblem:
    """min <C,X> s.t. <A_i,X> = b_i, X psd; all matrices dimension x dimension."""

    dimension: int
    objective: np.ndarray
    constraints: list = field(default_factory=list)
    rhs: np.ndarray = None

    def __post_init__(self):
        d = self.dimension
        self.objective = _sym(np.asarray(self.objective, dtype=float), d)
        if not self.constraints:
            raise ValueError("constraint list must be nonempty")
        self.constraints = [_sym(np.asarray(a, dtype=float), d) for a in self.constraints]
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.rhs.shape != (len(self.constraints),):
            raise ValueError("rhs length must match the constraint count")


@dataclass
class SdpSolution:
    status: str                 # "optimal" | "infeasible" | "numerical-failure"
    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    gap: float
    iterations: int
    primal_obj: float
    dual_obj: float
    primal_residual: float
    dual_residual: float


def _sym(a, d):
    if a.shape != (d, d):
        raise ValueError(f"matrix has shape {a.shape}, expected ({d},{d})")
    return (a + a.T) / 2


# optional registry used by the acceptance suite to audit every solve
_SOLVE_LOG = None


@contextmanager
def record_solves():
    """Collect a summary of every solve performed inside the context."""
    global _SOLVE_LOG
    prev, _SOLVE_LOG = _SOLVE_LOG, []
    try:
        yield _SOLVE_LOG
    finally:
        _SOLVE_LOG = prev


class _SparseConstraints:
    """Constraints in padded (row, col, value) coordinate form."""

    def __init__(self, constraints, dim):
        m = len(constraints)
        nnz = [np.nonzero(a) for a in constraints]
        k = max(1, max(len(r) for r, _ in nnz))
        self.rows = np.zeros((m, k), dtype=np.intp)
        self.cols = np.zeros((m, k), dtype=np.intp)
        self.vals = np.zeros((m, k))
        for i, (a, (r, c)) in enumerate(zip(constraints, nnz)):
            self.rows[i, :len(r)] = r
            self.cols[i, :len(r)] = c
            self.vals[i, :len(r)] = a[r, c]
        self.m = m
        self.k = k
        self.dim = dim

    def apply(self, Z):
        """[<A_i, Z>]_i."""
        return np.sum(self.vals * Z[self.rows, self.cols], axis=1)

    def apply_adjoint(self, y):
        """sum_i y_i A_i."""
        out = np.zeros((self.dim, self.dim))
        np.add.at(out, (self.rows.ravel(), self.cols.ravel()),
                  (self.vals * y[:, None]).ravel())
        return out

    def schur(self, W):
        """M_ij = <A_i, W A_j W> for symmetric W."""
        M = np.zeros((self.m, self.m))
        for p in range(self.k):
            vp = self.vals[:, p]
            if not np.any(vp):
                continue
            rp, cp = self.rows[:, p], self.cols[:, p]
            for q in range(self.k):
                vq = self.vals[:, q]
                if not np.any(vq):
                    continue
                rq, cq = self.rows[:, q], self.cols[:, q]
                M += np.outer(vp, vq) * W[np.ix_(rp, rq)] * W[np.ix_(cp, cq)]
        return (M + M.T) / 2


def _max_step(X, dX):
    """Largest alpha in (0, 1] with X + alpha dX psd (X assumed pd)."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        # fall back on an eigenvalue floor
        w, V = np.linalg.eigh(X)
        L = V @ np.diag(np.sqrt(np.maximum(w, 1e-14))) @ V.T
        L = np.linalg.cholesky(L @ L.T + 1e-14 * np.eye(X.shape[0]))
    Y = sla.solve_triangular(L, dX, lower=True)
    Y = sla.solve_triangular(L, Y.T, lower=True)
    lam_min = float(np.linalg.eigvalsh((Y + Y.T) / 2)[0])
    if lam_min >= 0:
        return 1.0
    return min(1.0, -1.0 / lam_min)


def _nt_scaling(X, S):
    """NT scaling data: W with W S W = X, S^{-1}, W^{1/2} and W^{-1/2}."""
    w, V = np.linalg.eigh(S)
    w = np.maximum(w, 1e-300)
    sq = V * np.sqrt(w)
    isq = V / np.sqrt(w)
    S_half = sq @ V.T
    S_ihalf = isq @ V.T
    B = S_half @ X @ S_half
    wb, Vb = np.linalg.eigh((B + B.T) / 2)
    wb = np.maximum(wb, 1e-300)
    B_half = (Vb * np.sqrt(wb)) @ Vb.T
    W = S_ihalf @ B_half @ S_ihalf
    W = (W + W.T) / 2
    S_inv = isq @ isq.T
    ww, WV = np.linalg.eigh(W)
    ww = np.maximum(ww, 1e-300)
    G = (WV * np.sqrt(ww)) @ WV.T
    G_inv = (WV / np.sqrt(ww)) @ WV.T
    return W, S_inv, G, G_inv


def _corrector_rhs(sigma_mu, G, G_inv, S, dX_a, dS_a):
    """Mehrotra corrector right-hand side for dX + W dS W = Rc.

    Solved as a Lyapunov equation in the NT-scaled space, where primal and
    dual iterates coincide (V = G' S G = G^-1 X G^-T).
    """
    V = G.T @ S @ G
    V = (V + V.T) / 2
    v, Q = np.linalg.eigh(V)
    v = np.maximum(v, 1e-300)
    dXs = G_inv @ dX_a @ G_inv.T
    dSs = G.T @ dS_a @ G
    Ca = dXs @ dSs
    Ca = Q.T @ (Ca + Ca.T) @ Q
    rhs = -Ca
    idx = np.arange(len(v))
    rhs[idx, idx] += 2.0 * sigma_mu - 2.0 * v * v
    Rc_s = rhs / (v[:, None] + v[None, :])
    Rc_s = Q @ Rc_s @ Q.T
    return G @ Rc_s @ G.T


def solve(problem, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
          infeasibility_bound=INFEASIBILITY_BOUND):
    """Solve the SDP; deterministic for identical inputs.

    Returns an SdpSolution.  Status "optimal" guarantees relative duality gap
    and feasibility residuals below tol; "infeasible" is reported when the
    dual objective diverges past infeasibility_bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = problem.dimension
    C = problem.objective
    b = problem.rhs
    A = _SparseConstraints(problem.constraints, d)
    m = A.m

    scale = max(1.0, float(np.linalg.norm(C) / np.sqrt(d)), float(np.max(np.abs(b))))
    X = scale * np.eye(d)
    S = scale * np.eye(d)
    y = np.zeros(m)

    norm_b = 1.0 + float(np.linalg.norm(b))
    norm_C = 1.0 + float(np.linalg.norm(C))
    eye = np.eye(d)

    sol = None
    for it in range(1, max_iter + 1):
        rp = b - A.apply(X)
        Rd = C - A.apply_adjoint(y) - S
        pobj = float(np.sum(C * X))
        dobj = float(b @ y)
        mu = float(np.sum(X * S)) / d
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pres = float(np.linalg.norm(rp)) / norm_b
        dres = float(np.linalg.norm(Rd)) / norm_C
        sol = SdpSolution("running", X, y, S, gap, it - 1, pobj, dobj, pres, dres)

        if max(gap, pres, dres) <= tol:
            sol.status = "optimal"
            break
        if dobj > infeasibility_bound:
            sol.status = "infeasible"
            break
        if pobj < -infeasibility_bound:
            sol.status = "numerical-failure"
            break

        try:
            W, S_inv, G, G_inv = _nt_scaling(X, S)
            M = A.schur(W)
            # tiny regularization guards near-degenerate optimal faces
            cho = sla.cho_factor(M + (1e-13 * np.trace(M) / m + 1e-300) * np.eye(m))

            def newton(Rc):
                rhs = rp - A.apply(Rc) + A.apply(W @ Rd @ W)
                dy = sla.cho_solve(cho, rhs)
                dy += sla.cho_solve(cho, rhs - M @ dy)  # one refinement round
                dS = Rd - A.apply_adjoint(dy)
                dX = Rc - W @ dS @ W
                return (dX + dX.T) / 2, dy, dS

            # predictor
            dX_a, dy_a, dS_a = newton(-X)
            ap = _max_step(X, dX_a)
            ad = _max_step(S, dS_a)
            mu_aff = float(np.sum((X + ap * dX_a) * (S + ad * dS_a))) / d
            sigma = min(1.0, max((max(mu_aff, 0.0) / mu) ** 3, 1e-8))

            # corrector
            Rc = _corrector_rhs(sigma * mu, G, G_inv, S, dX_a, dS_a)
            dX, dy, dS = newton(Rc)
            ap = min(1.0, STEP_FRACTION * _max_step(X, dX))
            ad = min(1.0, STEP_FRACTION * _max_step(S, dS))
            if ap < 1e-10 and ad < 1e-10:
                sol.status = "numerical-failure"
                break
            X = X + ap * dX
            S = S + ad * dS
            y = y + ad * dy
        except (np.linalg.LinAlgError, sla.LinAlgError):
            sol.status = "numerical-failure"
            break
    else:
        sol.status = "numerical-failure"
        sol.iterations = max_iter

    sol.X, sol.y, sol.S = X, y, S
    if _SOLVE_LOG is not None:
        _SOLVE_LOG.append({
            "status": sol.status,
            "gap": sol.gap,
            "primal_residual": sol.primal_residual,
            "dual_residual": sol.dual_residual,
            "iterations": sol.iterations,
        })
    if sol.status == "numerical-failure":
        raise SdpError(
            f"SDP did not converge after {sol.iterations} iterations "
            f"(gap={sol.gap:.3e}, primal residual={sol.primal_residual:.3e}, "
            f"dual residual={sol.dual_residual:.3e})", solution=sol)
    return sol


# ---------------------------------------------------------------------------
# realification helpers

def realify(H):
    """Complex (Hermitian) H -> real [[Re, -Im], [Im, Re]].

    tr(realify(E) @ realify(H)) = 2 Re tr(E H); psd is preserved both ways.
    """
    H = np.asarray(H, dtype=complex)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def unrealify(R):
    """Average a real symmetric 2n x 2n matrix back to a complex Hermitian n x n.

    Inverse of realify on its range; on general symmetric input this projects
    onto the complex-structure-invariant part (which keeps psd).
    """
    n = R.shape[0] // 2
    re = (R[:n, :n] + R[n:, n:]) / 2
    im = (R[n:, :n] - R[:n, n:]) / 2
    H = re + 1j * im
    return (H + H.conj().T) / 2
