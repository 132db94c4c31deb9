"""Finite, circular and ultimately periodic infinite words.

Finite words are plain ``str``. Infinite words are only represented when
ultimately periodic:

* ``RightUP(u, v)`` is ``u v v v ...``, written ``u(v)^w``;
* ``LeftUP(v, u)`` is ``... v v v u``, written ``w^(v)u``;
* ``BiUP(v1, m, v2)`` is ``... v1 v1 m v2 v2 ...`` up to shift, written
  ``w^(v1).m.(v2)^w`` (the middle may be omitted).

The empty finite word is written ``_`` and circular words start with ``@``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from math import gcd

from .errors import AlphabetError, ParseError

FinWord = str

_SPECIAL = set("()^@._ \t\n;+*")


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise AlphabetError("alphabet must have at least one letter")
        if len(set(letters)) != len(letters):
            raise AlphabetError(f"duplicate letters in alphabet {letters}")
        for a in letters:
            if len(a) != 1 or a in _SPECIAL:
                raise AlphabetError(f"invalid letter {a!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, spec):
        if isinstance(spec, Alphabet):
            return spec
        if isinstance(spec, str):
            spec = [c for c in spec if not c.isspace() and c != ","]
        return cls(tuple(spec))

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __contains__(self, a):
        return a in self.letters

    def __str__(self):
        return "".join(self.letters)

    def check(self, word: str):
        for c in word:
            if c not in self.letters:
                raise AlphabetError(f"letter {c!r} is not in alphabet {str(self)!r}")
        return word

    def key(self, word: str):
        return tuple(self.letters.index(c) for c in word)

    def words(self, max_len, min_len=0):
        """All words of length ``min_len..max_len`` in shortlex order."""
        for n in range(min_len, max_len + 1):
            for t in product(self.letters, repeat=n):
                yield "".join(t)


def primitive_root(v: str) -> str:
    n = len(v)
    for p in range(1, n + 1):
        if n % p == 0 and v[:p] * (n // p) == v:
            return v[:p]
    return v


def _rotl(v):
    return v[1:] + v[0]


def _rotr(v):
    return v[-1] + v[:-1]


def _least_rotation(w, key=None):
    if not w:
        return w
    rots = [w[i:] + w[:i] for i in range(len(w))]
    return min(rots, key=key) if key else min(rots)


def show(w: str) -> str:
    return w if w else "_"


@dataclass(frozen=True)
class CircWord:
    rep: str

    def __str__(self):
        return "@" + show(self.rep)

    def __len__(self):
        return len(self.rep)

    def rotations(self):
        w = self.rep
        return [w[i:] + w[:i] for i in range(max(len(w), 1))]


@dataclass(frozen=True)
class RightUP:
    prefix: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise ParseError("right-infinite word needs a nonempty period")

    def __str__(self):
        return f"{self.prefix}({self.period})^w"

    def take(self, n):
        """First ``n`` letters."""
        u, v = self.prefix, self.period
        k = max(0, -(-(n - len(u)) // len(v)))
        return (u + v * k)[:n]

    def __radd__(self, other):
        if isinstance(other, str):
            return normalize_up(RightUP(other + self.prefix, self.period))
        return NotImplemented


@dataclass(frozen=True)
class LeftUP:
    period: str
    suffix: str

    def __post_init__(self):
        if not self.period:
            raise ParseError("left-infinite word needs a nonempty period")

    def __str__(self):
        return f"w^({self.period}){self.suffix}"

    def take_last(self, n):
        """Last ``n`` letters."""
        v, u = self.period, self.suffix
        k = max(0, -(-(n - len(u)) // len(v)))
        w = v * k + u
        return w[len(w) - n:] if n else ""

    def __add__(self, other):
        if isinstance(other, str):
            return normalize_up(LeftUP(self.period, self.suffix + other))
        if isinstance(other, RightUP):
            return normalize_up(BiUP(self.period, self.suffix + other.prefix, other.period))
        return NotImplemented


@dataclass(frozen=True)
class BiUP:
    left: str
    middle: str
    right: str

    def __post_init__(self):
        if not self.left or not self.right:
            raise ParseError("bi-infinite word needs nonempty periods")

    def __str__(self):
        if self.middle:
            return f"w^({self.left}).{self.middle}.({self.right})^w"
        return f"w^({self.left}).({self.right})^w"

    def letter_at(self, i):
        """Letter at position ``i``; position 0 is the first middle letter."""
        m = self.middle
        if 0 <= i < len(m):
            return m[i]
        if i >= len(m):
            r = self.right
            return r[(i - len(m)) % len(r)]
        lft = self.left
        return lft[i % len(lft)]

    def window(self, lo, hi):
        return "".join(self.letter_at(i) for i in range(lo, hi))

    @property
    def left_part(self):
        return LeftUP(self.left, "")

    @property
    def right_part(self):
        return RightUP("", self.right)


def normalize_up(w):
    """Canonical representative of an ultimately periodic word.

    Periods become primitive and the finite part is made as short as
    possible, so two values denote the same word (up to shift for two-sided
    words) iff their normal forms are equal.
    """
    if isinstance(w, RightUP):
        u, v = w.prefix, primitive_root(w.period)
        while u and u[-1] == v[-1]:
            u, v = u[:-1], _rotr(v)
        return RightUP(u, v)
    if isinstance(w, LeftUP):
        v, u = primitive_root(w.period), w.suffix
        while u and u[0] == v[0]:
            u, v = u[1:], _rotl(v)
        return LeftUP(v, u)
    if isinstance(w, BiUP):
        v1, m, v2 = primitive_root(w.left), w.middle, primitive_root(w.right)
        # push the start of the right-periodic tail as far left as possible
        while m and m[-1] == v2[-1]:
            m, v2 = m[:-1], _rotr(v2)
        if not m:
            if v1 == v2:
                c = _least_rotation(v1)
                return BiUP(c, "", c)
            # rotating both keeps them distinct, so this stops within lcm steps
            while v1[-1] == v2[-1]:
                v1, v2 = _rotr(v1), _rotr(v2)
        while m and m[0] == v1[0]:
            m, v1 = m[1:], _rotl(v1)
        return BiUP(v1, m, v2)
    raise TypeError(f"not an ultimately periodic word: {w!r}")


def circ_canonical(w: str, alphabet=None) -> CircWord:
    key = Alphabet.of(alphabet).key if alphabet is not None else None
    return CircWord(_least_rotation(w, key))


_BI = re.compile(r"w\^\((?P<l>[^()]+)\)\.(?:(?P<m>[^().]+)\.)?\((?P<r>[^()]+)\)\^w")
_LEFT = re.compile(r"w\^\((?P<v>[^()]+)\)(?P<u>[^()]*)")
_RIGHT = re.compile(r"(?P<u>[^()]*)\((?P<v>[^()]+)\)\^w")


def _letters(text, what):
    if text == "_":
        return ""
    for c in text:
        if c in _SPECIAL:
            raise ParseError(f"bad character {c!r} in {what}")
    return text


def _detect(text):
    if text.startswith("@"):
        return "circ"
    if _BI.fullmatch(text):
        return "bi"
    if _LEFT.fullmatch(text):
        return "left"
    if _RIGHT.fullmatch(text):
        return "right"
    return "fin"


def parse_word(text: str, kind=None, alphabet=None):
    """Parse the surface syntax into a normalized word.

    ``kind`` is one of ``fin``, ``circ``, ``left``, ``right``, ``bi`` or
    ``None`` to detect it from the syntax. With an ``alphabet`` every letter
    is checked.
    """
    text = text.strip()
    if kind is None:
        kind = _detect(text)
    if kind == "fin":
        out = _letters(text, "finite word")
    elif kind == "circ":
        if not text.startswith("@"):
            raise ParseError(f"circular word must start with '@': {text!r}")
        body = text[1:]
        out = circ_canonical(_letters(body or "_", "circular word"), alphabet)
    elif kind == "right":
        m = _RIGHT.fullmatch(text)
        if not m:
            raise ParseError(f"expected u(v)^w, got {text!r}")
        out = normalize_up(RightUP(_letters(m["u"] or "_", "prefix"), _letters(m["v"], "period")))
    elif kind == "left":
        m = _LEFT.fullmatch(text)
        if not m:
            raise ParseError(f"expected w^(v)u, got {text!r}")
        out = normalize_up(LeftUP(_letters(m["v"], "period"), _letters(m["u"] or "_", "suffix")))
    elif kind == "bi":
        m = _BI.fullmatch(text)
        if not m:
            raise ParseError(f"expected w^(v1).m.(v2)^w, got {text!r}")
        out = normalize_up(BiUP(_letters(m["l"], "period"), _letters(m["m"] or "_", "middle"),
                                _letters(m["r"], "period")))
    else:
        raise ParseError(f"unknown word kind {kind!r}")
    if alphabet is not None:
        check_word(out, alphabet)
    return out


def word_letters(w) -> set:
    if isinstance(w, str):
        return set(w)
    if isinstance(w, CircWord):
        return set(w.rep)
    if isinstance(w, RightUP):
        return set(w.prefix) | set(w.period)
    if isinstance(w, LeftUP):
        return set(w.period) | set(w.suffix)
    if isinstance(w, BiUP):
        return set(w.left) | set(w.middle) | set(w.right)
    raise TypeError(f"not a word: {w!r}")


def check_word(w, alphabet):
    alphabet = Alphabet.of(alphabet)
    for c in sorted(word_letters(w)):
        if c not in alphabet:
            raise AlphabetError(f"letter {c!r} is not in alphabet {str(alphabet)!r}")
    return w


def witness_key(w):
    """Sort key preferring short words, then short periods."""
    if isinstance(w, str):
        return (len(w), 0, w)
    if isinstance(w, RightUP):
        return (len(w.prefix) + len(w.period), len(w.period), str(w))
    if isinstance(w, LeftUP):
        return (len(w.period) + len(w.suffix), len(w.period), str(w))
    return (len(str(w)), 0, str(w))


def lcm(a, b):
    return a * b // gcd(a, b)
