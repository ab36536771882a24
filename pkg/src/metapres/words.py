"""Words in a free group: parsing, free reduction and exponent sums.

A letter is a nonzero int: ``j + 1`` stands for the generator ``a_j`` and
``-(j + 1)`` for its inverse.  Words are always stored freely reduced.

Commutator convention: ``[x, y] = x^-1 y^-1 x y``.  Exponent sums of a
commutator vanish under any convention, so nothing downstream depends on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class WordParseError(ValueError):
    """Malformed word text.  ``position`` is a 0-based offset into the input."""

    def __init__(self, message: str, text: str, position: int):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class AlphabetMismatch(ValueError):
    pass


def letter(index: int, sign: int = 1) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if index < 0:
        raise ValueError(f"generator index must be non-negative, got {index}")
    return sign * (index + 1)


def generator_of(x: int) -> int:
    return abs(x) - 1


def sign_of(x: int) -> int:
    return 1 if x > 0 else -1


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word over an alphabet of ``n`` generators."""

    letters: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("alphabet must contain at least one generator")
        prev = 0
        for x in self.letters:
            if x == 0 or abs(x) > self.n:
                raise ValueError(f"letter {x} outside alphabet of size {self.n}")
            if x == -prev:
                raise ValueError("letters are not freely reduced")
            prev = x

    @classmethod
    def identity(cls, n: int) -> GroupWord:
        return cls((), n)

    @classmethod
    def generator(cls, index: int, n: int) -> GroupWord:
        return cls((letter(index),), n)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: GroupWord) -> GroupWord:
        return concat(self, other)

    def __invert__(self) -> GroupWord:
        return invert(self)

    def __pow__(self, k: int) -> GroupWord:
        return power(self, k)

    def is_identity(self) -> bool:
        return not self.letters


def free_reduce(letters: Iterable[int], n: int) -> GroupWord:
    """Freely reduce a raw letter sequence (stack-based, single pass)."""
    return GroupWord(_reduce(letters), n)


def _check_same(u: GroupWord, v: GroupWord):
    if u.n != v.n:
        raise AlphabetMismatch(f"alphabet sizes differ: {u.n} != {v.n}")


def concat(u: GroupWord, v: GroupWord) -> GroupWord:
    _check_same(u, v)
    a, b = u.letters, v.letters
    # Cancellation only happens at the seam.
    k = 0
    while k < len(a) and k < len(b) and a[-1 - k] == -b[k]:
        k += 1
    return GroupWord(a[: len(a) - k] + b[k:], u.n)


def invert(u: GroupWord) -> GroupWord:
    return GroupWord(tuple(-x for x in reversed(u.letters)), u.n)


def power(u: GroupWord, k: int) -> GroupWord:
    if k < 0:
        return power(invert(u), -k)
    result = GroupWord.identity(u.n)
    base = u
    while k:
        if k & 1:
            result = concat(result, base)
        base = concat(base, base)
        k >>= 1
    return result


def commutator(x: GroupWord, y: GroupWord) -> GroupWord:
    """``[x, y] = x^-1 y^-1 x y``."""
    return free_reduce(invert(x).letters + invert(y).letters + x.letters + y.letters, x.n)


def exponent_vector(w: GroupWord, n: int | None = None) -> list[int]:
    n = w.n if n is None else n
    vec = [0] * n
    for x in w.letters:
        j = abs(x) - 1
        if j >= n:
            raise ValueError(f"letter {x} outside alphabet of size {n}")
        vec[j] += 1 if x > 0 else -1
    return vec


def is_commutator_word(w: GroupWord) -> bool:
    """True iff ``w`` lies in the derived subgroup of the free group."""
    return not any(exponent_vector(w))


def substitute(w: GroupWord, images: Sequence[GroupWord]) -> GroupWord:
    """Apply the endomorphism ``a_j -> images[j]`` to ``w`` and reduce."""
    if len(images) != w.n:
        raise AlphabetMismatch(f"need {w.n} images, got {len(images)}")
    n_out = images[0].n if images else w.n
    inverses = [None] * len(images)
    out: list[int] = []
    for x in w.letters:
        j = abs(x) - 1
        if x > 0:
            seq = images[j].letters
        else:
            if inverses[j] is None:
                inverses[j] = invert(images[j]).letters
            seq = inverses[j]
        for y in seq:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return GroupWord(tuple(out), n_out)


def render(w: GroupWord, names: Sequence[str]) -> str:
    """Canonical text form, grouping runs into powers: ``a^2 b^-1 a``."""
    if not w.letters:
        return "1"
    parts = []
    i = 0
    letters = w.letters
    while i < len(letters):
        x = letters[i]
        k = i
        while k < len(letters) and letters[k] == x:
            k += 1
        e = (k - i) * sign_of(x)
        name = names[abs(x) - 1]
        parts.append(name if e == 1 else f"{name}^{e}")
        i = k
    return " ".join(parts)


class _Parser:
    """Recursive descent over the word grammar.

    word    := term*
    term    := atom ("^" integer)?
    atom    := name | "(" word ")" | "[" word "," word "]"
    integer := "-"? digit+

    A bare ``1`` is accepted as the identity so rendered words round-trip.
    """

    def __init__(self, text: str, alphabet: Sequence[str]):
        self.text = text
        self.pos = 0
        self.index = {name: i for i, name in enumerate(alphabet)}
        self.n = len(alphabet)

    def error(self, message, pos=None):
        raise WordParseError(message, self.text, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> GroupWord:
        w = self.word()
        if self.peek():
            c = self.peek()
            if c in ")]":
                self.error(f"unbalanced {c!r}")
            self.error(f"unexpected {c!r}")
        return w

    def word(self) -> GroupWord:
        letters: list[int] = []
        while True:
            c = self.peek()
            if not c or c in "),]":
                break
            letters.extend(self.term().letters)
        return free_reduce(letters, self.n)

    def term(self) -> GroupWord:
        w = self.atom()
        if self.peek() == "^":
            self.pos += 1
            w = power(w, self.integer())
        return w

    def integer(self) -> int:
        self.skip_ws()
        m = re.compile(r"-?\d+").match(self.text, self.pos)
        if not m:
            self.error("malformed exponent")
        self.pos = m.end()
        return int(m.group())

    def atom(self) -> GroupWord:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            w = self.word()
            if self.peek() != ")":
                self.error("unbalanced '('", start)
            self.pos += 1
            return w
        if c == "[":
            self.pos += 1
            x = self.word()
            if self.peek() != ",":
                self.error("expected ',' in commutator", self.pos if self.peek() else start)
            self.pos += 1
            y = self.word()
            if self.peek() != "]":
                self.error("unbalanced '['", start)
            self.pos += 1
            return commutator(x, y)
        if c == "1":
            m = re.compile(r"1(?![0-9])").match(self.text, self.pos)
            if m:
                self.pos = m.end()
                return GroupWord.identity(self.n)
        m = NAME_RE.match(self.text, self.pos)
        if not m:
            self.error(f"unexpected {c!r}")
        name = m.group()
        if name not in self.index:
            self.error(f"unknown generator {name!r}")
        self.pos = m.end()
        return GroupWord.generator(self.index[name], self.n)


def parse_word(text: str, alphabet: Sequence[str]) -> GroupWord:
    """Parse ``text`` into a freely reduced word over ``alphabet``.

    >>> render(parse_word("a^2 [a,b]^-1", ["a", "b"]), ["a", "b"])
    'a^2 b^-1 a^-1 b a'
    """
    if not alphabet:
        raise ValueError("empty alphabet")
    return _Parser(text, alphabet).parse()
