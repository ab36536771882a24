"""Structure report for a metabelian group given by a finite presentation.

For a full-rank presentation with ``m <= n`` relators, normalizing to Smith
form gives generators ``a'_1 .. a'_n`` such that ``a'_{m+1} .. a'_n`` freely
generate a free metabelian subgroup ``H`` of rank ``n - m`` and
``a'_1 .. a'_m`` generate a virtually abelian subgroup ``K``.  Pulling those
back through the recorded isomorphism gives words in the input generators.

The Diophantine verdict depends only on ``(n, m)`` once full rank holds:
undecidable for ``m <= n - 2``, decidable for ``m >= n``, and unknown for
``m = n - 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .intlinalg import IntMatrix, rank, smith_normal_form
from .presentation import Presentation, deficiency, is_full_rank, relation_matrix
from .tietze import DEFAULT_MAX_LENGTH, normalize_to_snf
from .words import GroupWord, exponent_vector, render


class Diophantine(str, enum.Enum):
    UNDECIDABLE_Z_EINTERPRETABLE = "UNDECIDABLE_Z_EINTERPRETABLE"
    DECIDABLE_VIRTUALLY_ABELIAN = "DECIDABLE_VIRTUALLY_ABELIAN"
    OPEN_DEFICIENCY_ONE = "OPEN_DEFICIENCY_ONE"
    NOT_APPLICABLE_NOT_FULL_RANK = "NOT_APPLICABLE_NOT_FULL_RANK"


DIRECT_DECOMPOSITION_VERDICT = "in every direct decomposition of G all but one direct factor is virtually abelian"
NORMAL_CLOSURE_NOTE = (
    "L = K^G, the normal closure of K, is virtually abelian and G = HL; "
    "L need not be finitely generated and is not materialized"
)


def diophantine_verdict(n: int, m: int, full_rank: bool) -> Diophantine:
    if not full_rank:
        return Diophantine.NOT_APPLICABLE_NOT_FULL_RANK
    if m <= n - 2:
        return Diophantine.UNDECIDABLE_Z_EINTERPRETABLE
    if m == n - 1:
        return Diophantine.OPEN_DEFICIENCY_ONE
    return Diophantine.DECIDABLE_VIRTUALLY_ABELIAN


def abelianization_invariants(p: Presentation) -> tuple[int, list[int]]:
    """Free rank and torsion invariant factors (> 1) of ``G / [G, G]``."""
    factors = smith_normal_form(relation_matrix(p)).invariant_factors
    return p.n - len(factors), [d for d in factors if d > 1]


@dataclass(frozen=True)
class StructureReport:
    generator_names: tuple[str, ...]
    n: int
    m: int
    full_rank: bool
    deficiency: int
    h_rank: int
    diophantine: Diophantine
    abelianization_free_rank: int
    abelianization_torsion: tuple[int, ...]
    h_basis: tuple[GroupWord, ...] | None = None
    k_generators: tuple[GroupWord, ...] | None = None
    direct_decomposition: str | None = None
    virtually_abelian: bool | None = None
    notes: tuple[str, ...] = ()
    invariant_factors: tuple[int, ...] = ()
    op_count: int | None = None
    relator_lengths: dict = field(default_factory=dict)

    @property
    def deficiency_defined(self) -> bool:
        return self.deficiency >= 0

    def to_json(self) -> dict:
        def words(ws):
            return None if ws is None else [render(w, self.generator_names) for w in ws]

        return {
            "generators": list(self.generator_names),
            "n": self.n,
            "m": self.m,
            "full_rank": self.full_rank,
            "deficiency": self.deficiency,
            "deficiency_defined": self.deficiency_defined,
            "h_rank": self.h_rank,
            "h_basis": words(self.h_basis),
            "k_generators": words(self.k_generators),
            "diophantine": self.diophantine.value,
            "direct_decomposition": self.direct_decomposition,
            "virtually_abelian": self.virtually_abelian,
            "abelianization": {
                "free_rank": self.abelianization_free_rank,
                "torsion": list(self.abelianization_torsion),
            },
            "notes": list(self.notes),
            "provenance": {
                "invariant_factors": list(self.invariant_factors),
                "op_count": self.op_count,
                "relator_lengths": self.relator_lengths,
            },
        }

    def summary(self) -> str:
        lines = [
            f"generators: {self.n}   relators: {self.m}",
            f"full rank: {'yes' if self.full_rank else 'no'}",
            "deficiency: "
            + (str(self.deficiency) if self.deficiency_defined else f"undefined (|R| > |A|, n - m = {self.deficiency})"),
            f"free metabelian subgroup H: rank {self.h_rank}",
        ]
        if self.h_basis is not None:
            lines.append("  H basis: " + ", ".join(render(w, self.generator_names) for w in self.h_basis))
            ks = ", ".join(render(w, self.generator_names) for w in self.k_generators)
            lines.append("  K generators: " + (ks or "(none)"))
        if self.virtually_abelian:
            lines.append("G is virtually abelian")
        lines.append(f"Diophantine problem: {self.diophantine.value}")
        if self.direct_decomposition:
            lines.append(f"direct decompositions: {self.direct_decomposition}")
        tors = " x ".join(f"Z/{d}" for d in self.abelianization_torsion)
        free = f"Z^{self.abelianization_free_rank}"
        if not self.abelianization_free_rank:
            free = ""
        lines.append("abelianization: " + (" x ".join(x for x in (free, tors) if x) or "trivial"))
        lines += [f"note: {s}" for s in self.notes]
        return "\n".join(lines)


def _degenerate_notes(p: Presentation, full_rank: bool) -> list[str]:
    notes = list(p.warnings)
    if p.m == 0:
        notes.append(f"no relators: G is the free metabelian group of rank {p.n}")
    if p.n == 1:
        notes.append("one generator: G is cyclic, and the Diophantine problem of a cyclic group is decidable")
    elif full_rank and p.m == p.n - 1:
        notes.append("deficiency one: decidability is open in general, though some such groups (e.g. BS(1,k)) are known to be decidable")
    return notes


def h_basis_independent(p: Presentation, report: StructureReport) -> bool:
    """Abelianized check: the H basis stays independent modulo the relator rows."""
    if report.h_basis is None:
        return True
    M = relation_matrix(p)
    rows = [list(r) for r in M.entries] + [exponent_vector(w, p.n) for w in report.h_basis]
    stacked = IntMatrix.from_rows(rows, cols=p.n)
    return rank(stacked) - rank(M) == report.h_rank


def classify(p: Presentation, max_length: int = DEFAULT_MAX_LENGTH) -> StructureReport:
    n, m = p.n, p.m
    full = is_full_rank(p)
    free_rank, torsion = abelianization_invariants(p)
    common = dict(
        generator_names=p.generator_names,
        n=n,
        m=m,
        full_rank=full,
        deficiency=deficiency(p),
        h_rank=max(n - m, 0),
        diophantine=diophantine_verdict(n, m, full),
        abelianization_free_rank=free_rank,
        abelianization_torsion=tuple(torsion),
    )
    notes = _degenerate_notes(p, full)
    if not full:
        snf = smith_normal_form(relation_matrix(p))
        notes.append("presentation is not of full rank; the structure theorems do not apply")
        return StructureReport(
            **common,
            notes=tuple(notes),
            invariant_factors=snf.invariant_factors,
            op_count=len(snf.op_log),
        )

    normalized = normalize_to_snf(p, max_length)
    back = normalized.iso.backward
    extra = dict(
        invariant_factors=normalized.snf.invariant_factors,
        op_count=len(normalized.snf.op_log),
        relator_lengths=normalized.relator_lengths(),
        direct_decomposition=DIRECT_DECOMPOSITION_VERDICT if m <= n - 1 else None,
    )
    if m <= n:
        if m:
            notes.append(NORMAL_CLOSURE_NOTE)
        return StructureReport(
            **common,
            h_basis=tuple(back[m:]),
            k_generators=tuple(back[:m]),
            virtually_abelian=True if m == n else None,
            notes=tuple(notes),
            **extra,
        )
    notes.append(
        "more relators than generators: G is a quotient of the zero-deficiency full-rank group "
        "on the first n normalized relators, hence virtually abelian"
    )
    return StructureReport(**common, virtually_abelian=True, notes=tuple(notes), **extra)
