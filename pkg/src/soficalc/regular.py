"""Regular expressions and finite automata over an ordered alphabet.

Regex syntax: letters, ``0`` (empty language), ``1`` (empty word), ``+``
(union), juxtaposition (concatenation), postfix ``*``, parentheses.
Precedence is star, then concatenation, then union.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .boolsemi import BoolMat, bits_of, bool_trace, mat_compose, vec_times
from .errors import AlphabetError, ParseError
from .words import Alphabet, CircWord

# ---------------------------------------------------------------- regex AST


class Regex:
    __slots__ = ()


@dataclass(frozen=True)
class Empty(Regex):
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Eps(Regex):
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Sym(Regex):
    letter: str

    def __str__(self):
        return self.letter


@dataclass(frozen=True)
class Union(Regex):
    parts: tuple

    def __str__(self):
        return "+".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class Concat(Regex):
    parts: tuple

    def __str__(self):
        return "".join(f"({p})" if isinstance(p, Union) else str(p) for p in self.parts)


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex

    def __str__(self):
        s = str(self.inner)
        if isinstance(self.inner, (Sym, Empty, Eps)):
            return s + "*"
        return f"({s})*"


class _Parser:
    def __init__(self, text):
        self.toks = [c for c in text if not c.isspace()]
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, msg):
        raise ParseError(f"regex {self.text!r}: {msg} at position {self.i}")

    def parse(self):
        if not self.toks:
            self.fail("empty expression")
        r = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r}")
        return r

    def expr(self):
        parts = [self.term()]
        while self.peek() == "+":
            self.i += 1
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def term(self):
        parts = []
        while self.peek() is not None and self.peek() not in "+)":
            parts.append(self.factor())
        if not parts:
            self.fail("missing operand")
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def factor(self):
        r = self.atom()
        while self.peek() == "*":
            self.i += 1
            r = Star(r)
        return r

    def atom(self):
        c = self.peek()
        if c == "(":
            self.i += 1
            r = self.expr()
            if self.peek() != ")":
                self.fail("missing ')'")
            self.i += 1
            return r
        if c == "*":
            self.fail("star without operand")
        self.i += 1
        if c == "0":
            return Empty()
        if c == "1":
            return Eps()
        if c in "()^@._;":
            self.fail(f"invalid letter {c!r}")
        return Sym(c)


def regex_parse(text: str) -> Regex:
    return _Parser(text).parse()


def regex_letters(r: Regex) -> set:
    if isinstance(r, Sym):
        return {r.letter}
    if isinstance(r, (Union, Concat)):
        out = set()
        for p in r.parts:
            out |= regex_letters(p)
        return out
    if isinstance(r, Star):
        return regex_letters(r.inner)
    return set()


def _as_regex(r):
    return regex_parse(r) if isinstance(r, str) else r


# ---------------------------------------------------------------- automata


@dataclass(frozen=True, eq=False)
class Nfa:
    """Nondeterministic automaton with states ``0..n-1``.

    ``delta[a][q]`` is the bitset of successors of ``q`` on letter ``a``;
    ``initial`` and ``accepting`` are bitsets.
    """

    alphabet: Alphabet
    states: tuple
    delta: dict
    initial: int
    accepting: int

    @property
    def n(self):
        return len(self.states)

    @property
    def all_states(self):
        return (1 << self.n) - 1

    def matrix(self, a) -> BoolMat:
        return BoolMat(self.delta[a], self.n, self.states, self.states)

    def step(self, s: int, a) -> int:
        return vec_times(s, self.delta[a])

    def run(self, word, start=None) -> int:
        self.alphabet.check(word)
        s = self.initial if start is None else start
        for a in word:
            s = vec_times(s, self.delta[a])
        return s

    def accepts(self, word) -> bool:
        return bool(self.run(word) & self.accepting)

    def edges(self):
        for a in self.alphabet:
            for q, row in enumerate(self.delta[a]):
                for r in bits_of(row):
                    yield q, a, r


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete deterministic automaton; ``delta[a][q]`` is a single state."""

    alphabet: Alphabet
    states: tuple
    delta: dict
    initial: int
    accepting: frozenset
    sink: int | None = None
    minimal: bool = False

    @property
    def n(self):
        return len(self.states)

    def step(self, q, a):
        return self.delta[a][q]

    def run(self, word, start=None):
        self.alphabet.check(word)
        q = self.initial if start is None else start
        for a in word:
            q = self.delta[a][q]
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.accepting

    def to_nfa(self) -> Nfa:
        delta = {a: tuple(1 << t for t in self.delta[a]) for a in self.alphabet}
        acc = 0
        for q in self.accepting:
            acc |= 1 << q
        return Nfa(self.alphabet, self.states, delta, 1 << self.initial, acc)

    def matrix(self, a) -> BoolMat:
        return BoolMat(tuple(1 << t for t in self.delta[a]), self.n, self.states, self.states)

    def describe(self):
        lines = [f"states {' '.join(self.states)}",
                 f"initial {self.states[self.initial]}",
                 "accepting " + " ".join(self.states[q] for q in sorted(self.accepting))]
        for q in range(self.n):
            for a in self.alphabet:
                lines.append(f"trans {self.states[q]} {a} {self.states[self.delta[a][q]]}")
        return lines


def _glushkov(r: Regex, alphabet: Alphabet) -> Nfa:
    letters = []

    # returns (nullable, first, last) and fills follow
    follow = {}

    def walk(node):
        if isinstance(node, Empty):
            return False, set(), set()
        if isinstance(node, Eps):
            return True, set(), set()
        if isinstance(node, Sym):
            letters.append(node.letter)
            p = len(letters)
            follow[p] = set()
            return False, {p}, {p}
        if isinstance(node, Union):
            nul, fst, lst = False, set(), set()
            for part in node.parts:
                n2, f2, l2 = walk(part)
                nul |= n2
                fst |= f2
                lst |= l2
            return nul, fst, lst
        if isinstance(node, Concat):
            nul, fst, lst = True, set(), set()
            for part in node.parts:
                n2, f2, l2 = walk(part)
                for p in lst:
                    follow[p] |= f2
                if nul:
                    fst = fst | f2
                lst = (lst | l2) if n2 else l2
                nul = nul and n2
            return nul, fst, lst
        if isinstance(node, Star):
            n2, f2, l2 = walk(node.inner)
            for p in l2:
                follow[p] |= f2
            return True, f2, l2
        raise TypeError(node)

    nullable, first, last = walk(r)
    for c in letters:
        if c not in alphabet:
            raise AlphabetError(f"regex letter {c!r} is not in alphabet {str(alphabet)!r}")
    n = len(letters) + 1
    delta = {a: [0] * n for a in alphabet}
    for p in first:
        delta[letters[p - 1]][0] |= 1 << p
    for p, fs in follow.items():
        for q in fs:
            delta[letters[q - 1]][p] |= 1 << q
    acc = 0
    for p in last:
        acc |= 1 << p
    if nullable:
        acc |= 1
    states = tuple(f"p{i}" for i in range(n))
    return Nfa(alphabet, states, {a: tuple(v) for a, v in delta.items()}, 1, acc)


def default_alphabet(r: Regex) -> Alphabet:
    letters = sorted(regex_letters(r))
    if not letters:
        raise AlphabetError("expression has no letters; an alphabet must be given")
    return Alphabet(tuple(letters))


def to_nfa(r, alphabet=None) -> Nfa:
    """Position (Glushkov) automaton of a regex: epsilon-free, ``|r|+1`` states."""
    r = _as_regex(r)
    alphabet = Alphabet.of(alphabet) if alphabet is not None else default_alphabet(r)
    return _glushkov(r, alphabet)


def _as_nfa(x, alphabet=None) -> Nfa:
    if isinstance(x, Nfa):
        return x if alphabet is None else _extend(x, _merge_alphabets([x], alphabet))
    if isinstance(x, Dfa):
        return x.to_nfa()
    return to_nfa(x, alphabet)


def _subset_dfa(n: Nfa):
    index = {n.initial: 0}
    order = [n.initial]
    delta = {a: [] for a in n.alphabet}
    i = 0
    while i < len(order):
        s = order[i]
        for a in n.alphabet:
            t = vec_times(s, n.delta[a])
            if t not in index:
                index[t] = len(order)
                order.append(t)
            delta[a].append(index[t])
        i += 1
    accepting = {k for k, s in enumerate(order) if s & n.accepting}
    return len(order), delta, accepting


def _hopcroft(nstates, alphabet, delta, accepting):
    """Coarsest partition compatible with ``accepting``; returns block ids."""
    inverse = {a: [[] for _ in range(nstates)] for a in alphabet}
    for a in alphabet:
        for q, t in enumerate(delta[a]):
            inverse[a][t].append(q)
    acc = frozenset(accepting)
    rej = frozenset(range(nstates)) - acc
    partition = [b for b in (acc, rej) if b]
    work = [min(partition, key=len)] if len(partition) == 2 else list(partition)
    while work:
        splitter = work.pop()
        for a in alphabet:
            pre = set()
            for t in splitter:
                pre.update(inverse[a][t])
            if not pre:
                continue
            new_partition = []
            for block in partition:
                inside = block & pre
                outside = block - pre
                if inside and outside:
                    new_partition += [inside, outside]
                    if block in work:
                        work.remove(block)
                        work += [inside, outside]
                    else:
                        work.append(min(inside, outside, key=len))
                else:
                    new_partition.append(block)
            partition = new_partition
    block_of = [0] * nstates
    for b, block in enumerate(partition):
        for q in block:
            block_of[q] = b
    return block_of


def _finish(alphabet, nstates, delta, initial, accepting, minimal=True) -> Dfa:
    """Renumber in breadth-first order from the initial state and flag the sink."""
    order = [initial]
    index = {initial: 0}
    i = 0
    while i < len(order):
        q = order[i]
        for a in alphabet:
            t = delta[a][q]
            if t not in index:
                index[t] = len(order)
                order.append(t)
        i += 1
    new_delta = {a: tuple(index[delta[a][q]] for q in order) for a in alphabet}
    new_acc = frozenset(index[q] for q in order if q in accepting)
    n = len(order)
    # dead states: no accepting state reachable
    alive = set(new_acc)
    changed = True
    while changed:
        changed = False
        for q in range(n):
            if q not in alive and any(new_delta[a][q] in alive for a in alphabet):
                alive.add(q)
                changed = True
    dead = [q for q in range(n) if q not in alive]
    sink = dead[0] if len(dead) == 1 else None
    labels = []
    k = 0
    for q in range(n):
        if q == sink:
            labels.append("sink")
        else:
            labels.append(f"s{k}")
            k += 1
    return Dfa(alphabet, tuple(labels), new_delta, 0, new_acc, sink, minimal)


def canonical_dfa(x, alphabet=None) -> Dfa:
    """Minimal complete DFA, states renumbered breadth-first in letter order."""
    if isinstance(x, Dfa):
        n = x.to_nfa()
    else:
        n = _as_nfa(x, alphabet)
    nstates, delta, accepting = _subset_dfa(n)
    block_of = _hopcroft(nstates, n.alphabet, delta, accepting)
    nb = max(block_of) + 1
    bdelta = {a: [0] * nb for a in n.alphabet}
    for q in range(nstates):
        for a in n.alphabet:
            bdelta[a][block_of[q]] = block_of[delta[a][q]]
    bacc = {block_of[q] for q in accepting}
    return _finish(n.alphabet, nb, bdelta, block_of[0], bacc)


def complement_dfa(d: Dfa) -> Dfa:
    acc = set(range(d.n)) - set(d.accepting)
    return _finish(d.alphabet, d.n, d.delta, d.initial, acc, d.minimal)


# ---------------------------------------------------------------- language operations


def _merge_alphabets(nfas, alphabet=None):
    letters = list(Alphabet.of(alphabet)) if alphabet is not None else []
    for n in nfas:
        for a in n.alphabet:
            if a not in letters:
                if alphabet is not None:
                    raise AlphabetError(f"operand letter {a!r} is not in alphabet "
                                        f"{''.join(letters)!r}")
                letters.append(a)
    return Alphabet(tuple(letters))


def _extend(n: Nfa, alphabet: Alphabet) -> Nfa:
    if n.alphabet == alphabet:
        return n
    delta = {a: n.delta.get(a, (0,) * n.n) for a in alphabet}
    return Nfa(alphabet, n.states, delta, n.initial, n.accepting)


def _disjoint(n1: Nfa, n2: Nfa, extra=0):
    """States of n2 are shifted past those of n1 (and ``extra`` fresh states)."""
    off = n1.n + extra
    states = tuple(f"{s}" for s in n1.states) + tuple(f"x{i}" for i in range(extra)) \
        + tuple(f"{s}'" for s in n2.states)
    return off, states


def sigma_star(alphabet) -> Nfa:
    alphabet = Alphabet.of(alphabet)
    return Nfa(alphabet, ("u",), {a: (1,) for a in alphabet}, 1, 1)


def empty_language(alphabet) -> Nfa:
    alphabet = Alphabet.of(alphabet)
    return Nfa(alphabet, ("z",), {a: (0,) for a in alphabet}, 1, 0)


def epsilon_language(alphabet) -> Nfa:
    alphabet = Alphabet.of(alphabet)
    return Nfa(alphabet, ("e",), {a: (0,) for a in alphabet}, 1, 1)


def _union(n1, n2):
    off, states = _disjoint(n1, n2)
    delta = {a: n1.delta[a] + tuple(r << off for r in n2.delta[a]) for a in n1.alphabet}
    return Nfa(n1.alphabet, states, delta, n1.initial | n2.initial << off,
               n1.accepting | n2.accepting << off)


def _intersect(n1, n2):
    m = n2.n
    states = tuple(f"({p},{q})" for p in n1.states for q in n2.states)

    def enc(s1, s2):
        out = 0
        for p in bits_of(s1):
            out |= s2 << (p * m)
        return out

    delta = {}
    for a in n1.alphabet:
        rows = []
        for p in range(n1.n):
            for q in range(m):
                rows.append(enc(n1.delta[a][p], n2.delta[a][q]))
        delta[a] = tuple(rows)
    return Nfa(n1.alphabet, states, delta, enc(n1.initial, n2.initial),
               enc(n1.accepting, n2.accepting))


def _concat(n1, n2):
    off, states = _disjoint(n1, n2)
    delta = {}
    for a in n1.alphabet:
        rows = []
        for q in range(n1.n):
            t = n1.delta[a][q]
            row = t
            if t & n1.accepting:
                row |= n2.initial << off
            rows.append(row)
        rows += [r << off for r in n2.delta[a]]
        delta[a] = tuple(rows)
    initial = n1.initial
    if n1.initial & n1.accepting:
        initial |= n2.initial << off
    accepting = n2.accepting << off
    if n2.initial & n2.accepting:
        accepting |= n1.accepting
    return Nfa(n1.alphabet, states, delta, initial, accepting)


def _plus(n):
    delta = {}
    for a in n.alphabet:
        rows = []
        for q in range(n.n):
            t = n.delta[a][q]
            rows.append(t | n.initial if t & n.accepting else t)
        delta[a] = tuple(rows)
    return Nfa(n.alphabet, n.states, delta, n.initial, n.accepting)


def lang_boolean_ops(op, *args, alphabet=None) -> Nfa:
    """``complement``, ``intersect``, ``union``, ``concat`` or ``star`` of automata.

    Arguments may be regex text, ``Regex``, ``Nfa`` or ``Dfa``; alphabets are
    merged so that every operand is read over the same letters.
    """
    nfas = [_as_nfa(x, alphabet) for x in args]
    sigma = _merge_alphabets(nfas, alphabet)
    nfas = [_extend(n, sigma) for n in nfas]
    if op == "complement":
        (n,) = nfas
        return complement_dfa(canonical_dfa(n)).to_nfa()
    if op == "star":
        (n,) = nfas
        return _union(epsilon_language(sigma), _plus(n))
    if not nfas:
        raise ValueError(f"{op} needs operands")
    out = nfas[0]
    for n in nfas[1:]:
        if op == "union":
            out = _union(out, n)
        elif op == "intersect":
            out = _intersect(out, n)
        elif op == "concat":
            out = _concat(out, n)
        else:
            raise ValueError(f"unknown language operation {op!r}")
    return out


def saturate(w, alphabet) -> Nfa:
    """Automaton for the two-sided saturation Sigma* W Sigma*."""
    alphabet = Alphabet.of(alphabet)
    s = sigma_star(alphabet)
    return lang_boolean_ops("concat", s, to_nfa(_as_regex(w), alphabet), s)


def factor_complement(w, alphabet=None) -> Dfa:
    """Minimal DFA of the words having no factor in ``w``."""
    w = _as_regex(w)
    alphabet = Alphabet.of(alphabet) if alphabet is not None else default_alphabet(w)
    return complement_dfa(canonical_dfa(saturate(w, alphabet)))


def equivalent(x, y, alphabet=None) -> bool:
    """Language equality, decided on the product of the two minimal DFAs."""
    n1, n2 = _as_nfa(x, alphabet), _as_nfa(y, alphabet)
    sigma = _merge_alphabets([n1, n2])
    d1 = canonical_dfa(_extend(n1, sigma))
    d2 = canonical_dfa(_extend(n2, sigma))
    return distinguishing_word(d1, d2) is None


def distinguishing_word(d1: Dfa, d2: Dfa):
    """Shortest word accepted by exactly one of the DFAs, or ``None``."""
    start = (d1.initial, d2.initial)
    seen = {start: ""}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        w = seen[(p, q)]
        if (p in d1.accepting) != (q in d2.accepting):
            return w
        for a in d1.alphabet:
            nxt = (d1.delta[a][p], d2.delta[a][q])
            if nxt not in seen:
                seen[nxt] = w + a
                queue.append(nxt)
    return None


def accepts(d, word) -> bool:
    if isinstance(word, CircWord):
        raise TypeError("use circular_member for circular words")
    return d.accepts(word)


def accepted_words(d, max_len):
    """Accepted words up to ``max_len`` in shortlex order."""
    return [w for w in d.alphabet.words(max_len) if d.accepts(w)]


def word_matrix(n, word) -> BoolMat:
    if isinstance(n, Dfa):
        n = n.to_nfa()
    n.alphabet.check(word)
    m = BoolMat.identity(n.n, n.states)
    for a in word:
        m = mat_compose(m, n.matrix(a))
    return m


def circular_member(n, c) -> bool:
    """A closed path labelled by the circular word exists."""
    word = c.rep if isinstance(c, CircWord) else c
    return bool_trace(word_matrix(n, word))
