"""Replay Smith-normal-form operations as Nielsen moves on a presentation.

Row operations act on the relator tuple:

* ``swap_rows(i, j)``            exchange ``r_i`` and ``r_j``
* ``negate_row(i)``              ``r_i -> r_i^-1``
* ``add_row_multiple(i, j, t)``  ``r_i -> r_i r_j^t``

Column operations rewrite every relator under a free-group automorphism
``phi`` whose action on exponent vectors is the column operation:

* ``swap_cols(i, j)``            ``a_i <-> a_j``
* ``negate_col(i)``              ``a_i -> a_i^-1``
* ``add_col_multiple(i, j, t)``  ``a_j -> a_j a_i^t``  (``col_i += t col_j``)

After a column move the presented group is unchanged up to the isomorphism
sending old ``a_j`` to ``phi(a_j)``.  New generators keep the old names;
the :class:`IsomorphismRecord` says how the two generating tuples relate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .intlinalg import ElementaryOp, SmithDecomposition, smith_normal_form
from .presentation import Presentation, relation_matrix
from .words import GroupWord, concat, exponent_vector, invert, is_commutator_word, power, substitute

DEFAULT_MAX_LENGTH = 10**6


class WordLengthExceeded(RuntimeError):
    """A rewritten word grew past the configured length ceiling."""


def _identity_images(n: int) -> tuple[GroupWord, ...]:
    return tuple(GroupWord.generator(j, n) for j in range(n))


@dataclass(frozen=True)
class IsomorphismRecord:
    """``forward[j]``: old generator ``j`` as a word in the new generators.
    ``backward[j]``: new generator ``j`` as a word in the old generators."""

    forward: tuple[GroupWord, ...]
    backward: tuple[GroupWord, ...]

    @classmethod
    def identity(cls, n: int) -> IsomorphismRecord:
        ids = _identity_images(n)
        return cls(ids, ids)

    def then(self, forward: Sequence[GroupWord], backward: Sequence[GroupWord]) -> IsomorphismRecord:
        """Compose with a further substitution pair applied after this one."""
        return IsomorphismRecord(
            tuple(substitute(w, forward) for w in self.forward),
            tuple(substitute(w, self.backward) for w in backward),
        )

    def max_length(self) -> int:
        return max((len(w) for w in self.forward + self.backward), default=0)


def check_isomorphism_record(iso: IsomorphismRecord) -> bool:
    """Both composites must fix every generator in the free group."""
    n = len(iso.forward)
    if len(iso.backward) != n:
        return False
    ids = _identity_images(n)
    try:
        there_and_back = [substitute(w, iso.backward) for w in iso.forward]
        back_and_there = [substitute(w, iso.forward) for w in iso.backward]
    except ValueError:
        return False
    return tuple(there_and_back) == ids and tuple(back_and_there) == ids


def _check_index(op: ElementaryOp, bound: int, what: str):
    for k in (op.i, op.j):
        if k is not None and not 0 <= k < bound:
            raise IndexError(f"{op.kind}: index {k} out of range for {bound} {what}")


def _guard(words, max_length):
    for w in words:
        if len(w) > max_length:
            raise WordLengthExceeded(f"word of length {len(w)} exceeds the ceiling {max_length}")


def apply_row_op(p: Presentation, op: ElementaryOp, max_length: int = DEFAULT_MAX_LENGTH) -> Presentation:
    if not op.is_row:
        raise ValueError(f"{op.kind} is not a row operation")
    _check_index(op, p.m, "relators")
    rels = list(p.relators)
    if op.kind == "swap_rows":
        rels[op.i], rels[op.j] = rels[op.j], rels[op.i]
    elif op.kind == "negate_row":
        rels[op.i] = invert(rels[op.i])
    else:
        rels[op.i] = concat(rels[op.i], power(rels[op.j], op.multiplier))
    _guard([rels[op.i]], max_length)
    return Presentation(p.generator_names, tuple(rels))


def column_substitution(op: ElementaryOp, n: int) -> tuple[tuple[GroupWord, ...], tuple[GroupWord, ...]]:
    """The automorphism realising a column operation, and its inverse."""
    if op.is_row:
        raise ValueError(f"{op.kind} is not a column operation")
    if not 0 <= op.i < n or (op.j is not None and not 0 <= op.j < n):
        raise IndexError(f"{op.kind}: index out of range for {n} generators")
    fwd = list(_identity_images(n))
    if op.kind == "swap_cols":
        fwd[op.i], fwd[op.j] = fwd[op.j], fwd[op.i]
        return tuple(fwd), tuple(fwd)
    if op.kind == "negate_col":
        fwd[op.i] = invert(fwd[op.i])
        return tuple(fwd), tuple(fwd)
    bwd = list(fwd)
    a_i = GroupWord.generator(op.i, n)
    fwd[op.j] = concat(fwd[op.j], power(a_i, op.multiplier))
    bwd[op.j] = concat(bwd[op.j], power(a_i, -op.multiplier))
    return tuple(fwd), tuple(bwd)


def apply_col_op(p: Presentation, op: ElementaryOp, max_length: int = DEFAULT_MAX_LENGTH):
    """Rewrite the relators under a column move.

    Returns ``(presentation, (forward, backward))`` where ``forward`` gives the
    images of the old generators and ``backward`` the inverse substitution.
    """
    if op.is_row:
        raise ValueError(f"{op.kind} is not a column operation")
    fwd, bwd = column_substitution(op, p.n)
    rels = tuple(substitute(r, fwd) for r in p.relators)
    _guard(rels, max_length)
    return Presentation(p.generator_names, rels), (fwd, bwd)


def replay(
    p: Presentation, ops: Sequence[ElementaryOp], max_length: int = DEFAULT_MAX_LENGTH
) -> Iterator[tuple[Presentation, IsomorphismRecord]]:
    """Apply ``ops`` one at a time, yielding the state after each step."""
    iso = IsomorphismRecord.identity(p.n)
    for op in ops:
        if op.is_row:
            p = apply_row_op(p, op, max_length)
        else:
            p, (fwd, bwd) = apply_col_op(p, op, max_length)
            iso = iso.then(fwd, bwd)
            _guard(iso.forward + iso.backward, max_length)
        yield p, iso


@dataclass(frozen=True)
class NormalizedPresentation:
    presentation: Presentation
    iso: IsomorphismRecord
    snf: SmithDecomposition
    source: Presentation = field(repr=False)

    def power_commutator_split(self) -> list[tuple[int, GroupWord]]:
        """For each relator ``i < rank``: ``(d_i, c_i)`` with ``r_i = a_i^{d_i} c_i``."""
        out = []
        n = self.presentation.n
        for i, d in enumerate(self.snf.invariant_factors):
            r = self.presentation.relators[i]
            c = concat(power(GroupWord.generator(i, n), -d), r)
            out.append((d, c))
        return out

    def relator_lengths(self) -> dict:
        before = [len(r) for r in self.source.relators]
        after = [len(r) for r in self.presentation.relators]
        return {
            "input_total": sum(before),
            "input_max": max(before, default=0),
            "output_total": sum(after),
            "output_max": max(after, default=0),
        }

    def to_json(self) -> dict:
        p = self.presentation
        old = self.source.generator_names
        return {
            "presentation": p.to_text(),
            "forward": {old[j]: p.render_word(w) for j, w in enumerate(self.iso.forward)},
            "backward": {p.generator_names[j]: self.source.render_word(w) for j, w in enumerate(self.iso.backward)},
            "invariant_factors": list(self.snf.invariant_factors),
            "op_log": [op.to_json() for op in self.snf.op_log],
            "relator_lengths": self.relator_lengths(),
        }


def check_normalized(np_: NormalizedPresentation) -> bool:
    if relation_matrix(np_.presentation) != np_.snf.D:
        return False
    for i, (d, c) in enumerate(np_.power_commutator_split()):
        if not is_commutator_word(c):
            return False
        e = exponent_vector(np_.presentation.relators[i])
        if e[i] != d:
            return False
    return check_isomorphism_record(np_.iso)


def normalize_to_snf(p: Presentation, max_length: int = DEFAULT_MAX_LENGTH) -> NormalizedPresentation:
    """An isomorphic presentation whose relation matrix is in Smith normal form.

    The operation sequence is the one produced by :func:`smith_normal_form`
    on the relation matrix; generator and relator counts are preserved.
    """
    snf = smith_normal_form(relation_matrix(p))
    q, iso = p, IsomorphismRecord.identity(p.n)
    for q, iso in replay(p, snf.op_log, max_length):
        pass
    return NormalizedPresentation(q, iso, snf, p)
