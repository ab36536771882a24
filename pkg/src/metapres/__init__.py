"""Full-rank presentations of metabelian groups."""

from .classify import Diophantine, StructureReport, abelianization_invariants, classify
from .intlinalg import (
    ElementaryOp,
    IntMatrix,
    SmithDecomposition,
    determinantal_divisors,
    rank,
    smith_normal_form,
    verify_decomposition,
)
from .presentation import Presentation, deficiency, is_full_rank, parse_presentation, relation_matrix
from .randgen import ExperimentConfig, estimate_full_rank_probability, exact_full_rank_probability
from .tietze import check_isomorphism_record, normalize_to_snf
from .words import GroupWord, exponent_vector, parse_word

__version__ = "0.1.0"
