"""Conditional independence and dependency reasoning over semiring-annotated relations."""
from .semiring import (ALL_SEMIRINGS, BOOLEAN, INF, LUKASIEWICZ, MOD2, NATURALS,
                       NONNEG_RATIONALS, PAIRNZ2, TROPICAL, VITERBI, Flags, Kind, Semiring,
                       check_semiring_laws, get_semiring)
from .relation import (Equivalence, KRelation, Outcome, equivalent, format_tsv, parse_tsv,
                       read_tsv, write_tsv)
from .dependency import (CI, EMVD, FD, MID, MVD, find_violation, satisfies, satisfies_all,
                         satisfies_ci, satisfies_emvd, satisfies_fd, satisfies_mid,
                         satisfies_mvd)
from .decompose import (DecompositionPlan, c_excl, c_star, is_lossless, join,
                        multiplicative_join, normalize_4nf, reconstruct)
from .implication import (DerivationStep, check_derivation, derive_scifd, implies_scifd)
from .chase import chase_emvd, replay_trace
from .proofs import (EntropicExpr, check_dependency_proof, check_entropic_proof, copy_extend,
                     expand_cmi, load_proof)
from .info import ci_via_cmi, cmi, entropic_vector, entropy

__version__ = "0.1.0"
