"""Finite-scale laboratory for von Neumann couplings and multiplier induction."""

__version__ = "0.1.0"

from .groups import (FiniteGroup, GroupFunction, CharacterTable, build_group,
                     character_table, cyclic, dihedral, direct_product,
                     from_table, symmetric)
from .algebra import (AlgebraShape, AlgebraElement, diagonal_shape, is_projection,
                      l2_inner, operator_norm, trace)
from .actions import (TraceAction, CouplingRecord, KoopmanMatrix,
                      build_diagonal_coupling, build_me_product_coupling,
                      build_wstar_coupling, coupling_index, coupling_index_exact,
                      equivariance_defect, is_fundamental_domain, koopman,
                      theta_embedding)
from .multipliers import (Multiplier, WitnessPair, abelian_b2_oracle,
                          abelian_q_oracle, b2_norm, extract_witnesses,
                          gns_witnesses, gram_matrix, is_positive_definite, q_norm)
from .induction import (InductionKernel, InducedWitnesses, adjoint_on_l1,
                        induce_multiplier, induce_witnesses, induction_kernel,
                        verify_lemma)
from .sdp import SdpProblem, SdpSolution, SdpError, realify, record_solves, solve, unrealify
