"""Finite presentations ``<A | R>`` and their relation matrices."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Sequence

from .intlinalg import IntMatrix, rank
from .words import NAME_RE, GroupWord, WordParseError, concat, exponent_vector, invert, parse_word, render


class PresentationParseError(ValueError):
    """Malformed presentation text; ``line`` is 1-based, ``position`` 0-based."""

    def __init__(self, message: str, line: int | None = None, position: int | None = None):
        self.line = line
        self.position = position
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class EmptyRelatorWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Presentation:
    generator_names: tuple[str, ...]
    relators: tuple[GroupWord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generator_names", tuple(self.generator_names))
        object.__setattr__(self, "relators", tuple(self.relators))
        if not self.generator_names:
            raise ValueError("a presentation needs at least one generator")
        if len(set(self.generator_names)) != len(self.generator_names):
            raise ValueError("generator names must be distinct")
        for name in self.generator_names:
            if not NAME_RE.fullmatch(name):
                raise ValueError(f"invalid generator name {name!r}")
        for r in self.relators:
            if r.n != self.n:
                raise ValueError(f"relator over {r.n} generators in a presentation with {self.n}")

    @property
    def n(self) -> int:
        return len(self.generator_names)

    @property
    def m(self) -> int:
        return len(self.relators)

    @property
    def warnings(self) -> list[str]:
        return [f"relator {i + 1} is the empty word" for i, r in enumerate(self.relators) if not r.letters]

    @classmethod
    def from_strings(cls, generators: Sequence[str], relations: Sequence[str]) -> Presentation:
        gens = tuple(generators)
        return cls(gens, tuple(parse_relation(text, gens) for text in relations))

    def render_word(self, w: GroupWord) -> str:
        return render(w, self.generator_names)

    def to_text(self) -> str:
        lines = ["gens: " + ", ".join(self.generator_names)]
        lines += [self.render_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    def to_inline(self) -> str:
        rels = ", ".join(self.render_word(r) for r in self.relators)
        return f"< {', '.join(self.generator_names)} | {rels} >"

    def __str__(self) -> str:
        return self.to_inline()


def parse_relation(text: str, generators: Sequence[str]) -> GroupWord:
    """A relator, or an equation ``u = v`` stored as the relator ``u v^-1``."""
    if text.count("=") > 1:
        raise WordParseError("more than one '=' in relation", text, text.index("=", text.index("=") + 1))
    if "=" in text:
        k = text.index("=")
        lhs = parse_word(text[:k], generators)
        try:
            rhs = parse_word(text[k + 1 :], generators)
        except WordParseError as e:
            raise WordParseError(e.message, text, e.position + k + 1) from None
        return concat(lhs, invert(rhs))
    return parse_word(text, generators)


def _split_top_level(text: str, offset: int) -> list[tuple[str, int]]:
    """Split on commas not nested in brackets; returns (piece, start offset)."""
    pieces = []
    depth = 0
    start = 0
    for k, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append((text[start:k], offset + start))
            start = k + 1
    pieces.append((text[start:], offset + start))
    return pieces


def _parse_gens(text: str, line: int | None, offset: int) -> tuple[str, ...]:
    gens = []
    for piece, pos in _split_top_level(text, offset):
        name = piece.strip()
        if not name:
            continue
        if not NAME_RE.fullmatch(name):
            raise PresentationParseError(f"invalid generator name {name!r}", line, pos)
        if name in gens:
            raise PresentationParseError(f"duplicate generator {name!r}", line, pos)
        gens.append(name)
    if not gens:
        raise PresentationParseError("no generators declared", line, offset)
    return tuple(gens)


def _warn_empty(p: Presentation) -> Presentation:
    for msg in p.warnings:
        warnings.warn(msg, EmptyRelatorWarning, stacklevel=3)
    return p


def parse_inline(text: str) -> Presentation:
    """Parse the single-line form ``< a, b | a^2 [a,b]^-1 >``."""
    m = re.fullmatch(r"\s*<(.*)>\s*", text, re.S)
    if not m:
        raise PresentationParseError("expected '< generators | relations >'", None, 0)
    body = m.group(1)
    base = m.start(1)
    if "|" not in body:
        raise PresentationParseError("missing '|'", None, base + len(body))
    bar = body.index("|")
    gens = _parse_gens(body[:bar], None, base)
    relators = []
    for piece, pos in _split_top_level(body[bar + 1 :], base + bar + 1):
        if not piece.strip():
            continue
        try:
            relators.append(parse_relation(piece, gens))
        except WordParseError as e:
            raise PresentationParseError(e.message, None, pos + e.position) from None
    return _warn_empty(Presentation(gens, tuple(relators)))


def parse_presentation(text: str) -> Presentation:
    """Parse the file format (``gens:`` line, one relation per line, ``#`` comments).

    Inputs starting with ``<`` are handed to :func:`parse_inline`.
    """
    if text.lstrip().startswith("<"):
        return parse_inline(text)
    gens = None
    relators = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if gens is None:
            m = re.match(r"\s*gens\s*:", line)
            if not m:
                raise PresentationParseError("expected 'gens:' line", lineno, 0)
            gens = _parse_gens(line[m.end() :], lineno, m.end())
            continue
        try:
            relators.append(parse_relation(line, gens))
        except WordParseError as e:
            raise PresentationParseError(e.message, lineno, e.position) from None
    if gens is None:
        raise PresentationParseError("no 'gens:' line found")
    return _warn_empty(Presentation(gens, tuple(relators)))


def load_presentation(source: str) -> Presentation:
    """Inline ``< ... >`` text, or a path to a presentation file."""
    if source.lstrip().startswith("<"):
        return parse_inline(source)
    with open(source, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def relation_matrix(p: Presentation) -> IntMatrix:
    """The ``m x n`` matrix of exponent sums; row ``i`` belongs to relator ``i``."""
    return IntMatrix.from_rows((exponent_vector(r, p.n) for r in p.relators), cols=p.n)


def deficiency(p: Presentation) -> int:
    """``n - m``; negative values are returned as-is (the term is then undefined)."""
    return p.n - p.m


def is_full_rank(p: Presentation) -> bool:
    return rank(relation_matrix(p)) == min(p.n, p.m)
