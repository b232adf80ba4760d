"""Transport of multipliers through a coupling.

The induction map sends a function phi on Lambda to

    phi_hat(gamma) = (1/Tr p) Tr(sigma_gamma(theta_p(phi)) p)
                   = (1/Tr p) Tr(theta_p(phi) sigma_{gamma^-1}(p)),

which is linear in phi and therefore represented by the row-stochastic kernel

    K[gamma, s] = Tr(sigma^Lambda_s(p) sigma^Gamma_{gamma^-1}(p)) / Tr(p).

The induced witness vectors live in (L2 of the coupling algebra) tensor C^d
and certify that phi_hat is again a Herz-Schur multiplier with no larger
cb norm.
"""
from __future__ import annotations

import numpy as np

from .actions import koopman, theta_embedding
from .algebra import l2_inner, trace
from .groups import GroupFunction
from .multipliers import (WitnessPair, b2_norm, gram_matrix, gns_witnesses,
                          is_positive_definite, q_norm)

__all__ = [
    "InductionKernel",
    "InducedWitnesses",
    "induction_kernel",
    "induce_multiplier",
    "adjoint_on_l1",
    "induce_witnesses",
    "verify_lemma",
]


class InductionError(ValueError):
    pass


class InductionKernel:
    """|Gamma| x |Lambda| row-stochastic matrix representing the induction map."""

    def __init__(self, coupling, K, trace_form_defect):
        self.coupling = coupling
        self.K = K
        # max entrywise disagreement of the two displayed trace expressions
        self.trace_form_defect = trace_form_defect

    @property
    def gamma(self):
        return self.coupling.gamma

    @property
    def lam(self):
        return self.coupling.lam


def induction_kernel(c, p=None):
    """Kernel of the induction map of a validated coupling.

    `p` overrides the coupling's Lambda-fundamental domain (the map depends on
    this choice; the default is the domain stored in the record).  Both trace
    forms of the induced function are evaluated and cross-checked entrywise.
    """
    if p is None:
        p = c.p
    tp = trace(p).real
    sig_lam_p = [c.lambda_action.apply(s, p) for s in range(c.lam.order)]
    K = np.empty((c.gamma.order, c.lam.order))
    defect = 0.0
    for gamma in range(c.gamma.order):
        ginv = c.gamma.inverse(gamma)
        moved_p = c.gamma_action.apply(ginv, p)
        for s in range(c.lam.order):
            # Tr(theta-term sigma_{gamma^-1}(p)) entrywise in phi
            v1 = trace(sig_lam_p[s] @ moved_p).real
            # Tr(sigma_gamma(sigma_s(p)) p): the other displayed form
            v2 = trace(c.gamma_action.apply(gamma, sig_lam_p[s]) @ p).real
            defect = max(defect, abs(v1 - v2))
            K[gamma, s] = v1 / tp
    return InductionKernel(c, K, defect)


def induce_multiplier(kernel, phi):
    """phi_hat(gamma) = sum_s K[gamma, s] phi(s)."""
    if phi.group != kernel.lam:
        raise InductionError("multiplier lives on the wrong group")
    return GroupFunction(kernel.gamma, kernel.K @ phi.values)


def adjoint_on_l1(kernel, psi):
    """Pre-adjoint on summable functions: (Phi* psi)(s) = sum_gamma psi(gamma) K[gamma, s]."""
    if psi.group != kernel.gamma:
        raise InductionError("function lives on the wrong group")
    return GroupFunction(kernel.lam, kernel.K.T @ psi.values)


class InducedWitnesses(WitnessPair):
    """Witness pair on Gamma induced from a pair on Lambda through a coupling."""

    def __init__(self, coupling, base, xi, eta):
        super().__init__(xi, eta)
        self.coupling = coupling
        self.base = base


def induce_witnesses(c, w, phi=None):
    """Induced vectors xi_hat(gamma) = (Tr p)^{-1/2} sum_s sigma_gamma(sigma_s(p)) p (x) xi(s).

    `w` must be a valid witness pair on the coupling's Lambda group (checked
    against `phi` when given).  The returned pair satisfies
    <xi_hat(g1), eta_hat(g2)> = phi_hat(g2^-1 g1) with sup norms bounded by
    those of the base pair.
    """
    lam = c.lam
    if w.xi.shape[0] != lam.order:
        raise InductionError("witness pair does not match the Lambda group")
    if phi is not None and w.reproduction_error(phi) > 1e-10:
        raise InductionError("witness pair does not reproduce the given function")
    p = c.p
    tp = trace(p).real
    sig_lam_p = [c.lambda_action.apply(s, p) for s in range(lam.order)]
    d = w.dimension
    D = c.gamma_action.shape.l2_dim
    xi_hat = np.zeros((c.gamma.order, D * d), dtype=complex)
    eta_hat = np.zeros((c.gamma.order, D * d), dtype=complex)
    for gamma in range(c.gamma.order):
        for s in range(lam.order):
            vec = (c.gamma_action.apply(gamma, sig_lam_p[s]) @ p).to_l2()
            xi_hat[gamma] += np.kron(vec, w.xi[s])
            eta_hat[gamma] += np.kron(vec, w.eta[s])
    xi_hat /= np.sqrt(tp)
    eta_hat /= np.sqrt(tp)
    return InducedWitnesses(c, w, xi_hat, eta_hat)


def verify_lemma(c, phi, tol=1e-6, norm_tol=1e-7, include_q_check=True):
    """Check every finite-scale conclusion of the induction lemma on one input.

    Returns a report dict; failures are entries, not exceptions.
    """
    kernel = induction_kernel(c)
    phi_hat = induce_multiplier(kernel, phi)

    b2_phi = b2_norm(phi, tol=norm_tol)
    b2_hat = b2_norm(phi_hat, tol=norm_tol)
    margin = b2_phi - b2_hat

    phi_pd = is_positive_definite(phi, tol=1e-10)
    hat_gram_min = float(np.linalg.eigvalsh(
        (gram_matrix(phi_hat) + gram_matrix(phi_hat).conj().T) / 2)[0])

    report = {
        "coupling": c.label,
        "kernel_row_sum_defect": float(np.max(np.abs(kernel.K.sum(axis=1) - 1.0))),
        "kernel_min_entry": float(kernel.K.min()),
        "kernel_trace_form_defect": kernel.trace_form_defect,
        "b2_phi": b2_phi,
        "b2_phi_hat": b2_hat,
        "contractivity_margin": margin,
        "phi_positive_definite": phi_pd,
        "phi_hat_gram_min_eigenvalue": hat_gram_min,
        "phi_at_identity": complex(phi.values[0]),
        "phi_hat_at_identity": complex(phi_hat.values[0]),
        "sup_norm_phi": phi.sup_norm(),
        "sup_norm_phi_hat": phi_hat.sup_norm(),
    }
    if c.pairing is not None:
        report["pairing"] = list(c.pairing)

    checks = {
        "contractivity": margin >= -tol,
        "sup_norm_contraction": phi_hat.sup_norm() <= phi.sup_norm() + 1e-12,
        "kernel_stochastic": (report["kernel_row_sum_defect"] <= 1e-10
                              and report["kernel_min_entry"] >= -1e-12
                              and kernel.trace_form_defect <= 1e-12),
    }
    if phi_pd:
        checks["positive_definiteness_preserved"] = hat_gram_min >= -1e-8
        if abs(phi.values[0] - 1.0) < 1e-12:
            checks["normalization_preserved"] = abs(phi_hat.values[0] - 1.0) <= 1e-12

    # Koopman coefficient identity: phi_hat(gamma) = <sigma0_gamma(theta_p(phi)), p> / Tr p
    theta = theta_embedding(c.lambda_action, c.p, phi, check=False)
    koop = koopman(c.gamma_action)
    tp = trace(c.p).real
    p_vec = c.p.to_l2()
    theta_vec = theta.to_l2()
    koopman_defect = 0.0
    for gamma in range(c.gamma.order):
        coeff = np.vdot(p_vec, koop.matrix(gamma) @ theta_vec) / tp
        koopman_defect = max(koopman_defect, abs(coeff - phi_hat.values[gamma]))
    report["koopman_coefficient_defect"] = float(koopman_defect)
    checks["koopman_coefficient_identity"] = koopman_defect <= tol

    if include_q_check:
        worst = -np.inf
        for gamma in range(c.gamma.order):
            psi = GroupFunction.delta(c.gamma, gamma)
            excess = q_norm(adjoint_on_l1(kernel, psi), tol=norm_tol) \
                - q_norm(psi, tol=norm_tol)
            worst = max(worst, excess)
        report["q_adjoint_worst_excess"] = float(worst)
        checks["q_adjoint_contraction"] = worst <= tol

    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report
