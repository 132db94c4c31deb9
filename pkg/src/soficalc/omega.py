"""Automata on right-infinite words and their Boolean state spaces.

Acceptance is decided exactly on ultimately periodic words ``u v^w`` by
searching the finite run graph on ``Q x positions of v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import networkx as nx

from .boolsemi import (Semilattice, birkhoff_embedding, bits_of, bool_trace, join_closure,
                       projective_trace, transitive_closure, vec_times)
from .errors import (AlphabetError, BudgetError, ConstructionError, DeterminismError,
                     ParseError)
from .regular import Nfa, _as_regex, regex_letters, to_nfa, word_matrix
from .sofic import (_close_family, build_dual, identity_decomposition,
                    resolve_budget)
from .words import Alphabet, CircWord, RightUP, check_word, normalize_up


@dataclass(frozen=True)
class Buchi:
    accepting: int


@dataclass(frozen=True)
class Muller:
    sets: tuple


@dataclass(frozen=True)
class Rabin:
    # (B, G): avoid B eventually, visit G infinitely often
    pairs: tuple


@dataclass(frozen=True)
class Streett:
    # (B, G): visiting B infinitely often forces visiting G infinitely often
    pairs: tuple


@dataclass(frozen=True, eq=False)
class OmegaAutomaton:
    alphabet: Alphabet
    states: tuple
    delta: dict
    initial: int
    condition: object

    def __post_init__(self):
        full = (1 << len(self.states)) - 1
        for s in _condition_sets(self.condition):
            if s & ~full:
                raise ParseError("acceptance condition mentions unknown states")

    @property
    def n(self):
        return len(self.states)

    def as_nfa(self) -> Nfa:
        acc = self.condition.accepting if isinstance(self.condition, Buchi) else 0
        return Nfa(self.alphabet, self.states, self.delta, self.initial, acc)

    def run(self, word, start=None) -> int:
        self.alphabet.check(word)
        s = self.initial if start is None else start
        for a in word:
            s = vec_times(s, self.delta[a])
        return s

    @property
    def is_deterministic(self):
        if bin(self.initial).count("1") != 1:
            return False
        return all(bin(r).count("1") <= 1 for a in self.alphabet for r in self.delta[a])


def _condition_sets(cond):
    if isinstance(cond, Buchi):
        return [cond.accepting]
    if isinstance(cond, Muller):
        return list(cond.sets)
    return [x for pair in cond.pairs for x in pair]


def convert_condition(a: OmegaAutomaton, kind) -> OmegaAutomaton:
    """Re-encode a Buchi condition as Muller, Rabin or Streett."""
    if not isinstance(a.condition, Buchi):
        raise ValueError("only Buchi conditions are re-encoded")
    acc = a.condition.accepting
    full = (1 << a.n) - 1
    if kind == "buchi":
        cond = a.condition
    elif kind == "muller":
        cond = Muller(tuple(s for s in range(1, full + 1) if s & acc))
    elif kind == "rabin":
        cond = Rabin(((0, acc),))
    elif kind == "streett":
        cond = Streett(((full, acc),))
    else:
        raise ValueError(f"unknown condition kind {kind!r}")
    return OmegaAutomaton(a.alphabet, a.states, a.delta, a.initial, cond)


# ---------------------------------------------------------------- acceptance


def _run_graph(a: OmegaAutomaton, w: RightUP, start):
    """Reachable part of the run graph; node ``q * len(v) + i``."""
    v = w.period
    period = len(v)
    s = a.run(w.prefix, start)
    g = nx.DiGraph()
    todo = [q * period for q in bits_of(s)]
    g.add_nodes_from(todo)
    while todo:
        node = todo.pop()
        q, i = divmod(node, period)
        j = (i + 1) % period
        for r in bits_of(a.delta[v[i]][q]):
            nxt = r * period + j
            if nxt not in g:
                todo.append(nxt)
            g.add_edge(node, nxt)
    return g, period


def _cyclic_components(g, nodes=None):
    h = g if nodes is None else g.subgraph(nodes)
    for comp in nx.strongly_connected_components(h):
        if len(comp) > 1:
            yield comp
        else:
            (x,) = comp
            if h.has_edge(x, x):
                yield comp


def _project(comp, period):
    out = 0
    for node in comp:
        out |= 1 << (node // period)
    return out


def _streett_ok(g, period, nodes, pairs):
    work = [set(nodes)]
    while work:
        current = work.pop()
        for comp in _cyclic_components(g, current):
            proj = _project(comp, period)
            bad = 0
            for b, gset in pairs:
                if proj & b and not proj & gset:
                    bad |= b
            if not bad:
                return True
            rest = {x for x in comp if not (1 << (x // period)) & bad}
            if rest:
                work.append(rest)
    return False


def omega_accepts(a: OmegaAutomaton, w: RightUP, start=None) -> bool:
    check_word(w, a.alphabet)
    g, period = _run_graph(a, w, start)
    cond = a.condition
    if isinstance(cond, Buchi):
        return any(_project(c, period) & cond.accepting for c in _cyclic_components(g))
    if isinstance(cond, Muller):
        for f in cond.sets:
            nodes = [x for x in g if (1 << (x // period)) & f]
            if any(_project(c, period) == f for c in _cyclic_components(g, nodes)):
                return True
        return False
    if isinstance(cond, Rabin):
        for b, gset in cond.pairs:
            nodes = [x for x in g if not (1 << (x // period)) & b]
            if any(_project(c, period) & gset for c in _cyclic_components(g, nodes)):
                return True
        return False
    if isinstance(cond, Streett):
        return _streett_ok(g, period, list(g), cond.pairs)
    raise TypeError(f"unknown acceptance condition {cond!r}")


# ---------------------------------------------------------------- omega-regular expressions


@dataclass(frozen=True)
class OmegaRegex:
    # each summand (r, s) stands for r . s^w
    summands: tuple

    def __str__(self):
        return " + ".join(f"{r}.({s})^w" for r, s in self.summands)


def _split_top(text, sep="+"):
    parts, depth, cur = [], 0, []
    for c in text:
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced ')' in {text!r}")
        if c == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    if depth:
        raise ParseError(f"unbalanced '(' in {text!r}")
    parts.append("".join(cur))
    return parts


def parse_omega_regex(text: str) -> OmegaRegex:
    """Summands ``r.(s)^w`` (or ``(s)^w``) joined by top-level ``+``.

    A union inside ``r`` must be parenthesised.
    """
    text = re.sub(r"\s+", "", text)
    summands = []
    for part in _split_top(text):
        if not part.endswith(")^w"):
            raise ParseError(f"summand {part!r} must end with (s)^w")
        body = part[:-2]
        depth = 0
        for i in range(len(body) - 1, -1, -1):
            if body[i] == ")":
                depth += 1
            elif body[i] == "(":
                depth -= 1
                if depth == 0:
                    break
        else:
            raise ParseError(f"unbalanced summand {part!r}")
        s = body[i + 1:-1]
        r = body[:i]
        if r.endswith("."):
            r = r[:-1]
        summands.append((_as_regex(r or "1"), _as_regex(s)))
    return OmegaRegex(tuple(summands))


def omega_regex_to_buchi(e, alphabet=None) -> OmegaAutomaton:
    if isinstance(e, str):
        e = parse_omega_regex(e)
    if alphabet is None:
        letters = set()
        for r, s in e.summands:
            letters |= regex_letters(r) | regex_letters(s)
        if not letters:
            raise AlphabetError("expression has no letters; an alphabet must be given")
        alphabet = Alphabet(tuple(sorted(letters)))
    alphabet = Alphabet.of(alphabet)
    states, initial, accepting = [], 0, 0
    delta = {a: [] for a in alphabet}
    for k, (r, s) in enumerate(e.summands):
        nr, ns = to_nfa(r, alphabet), to_nfa(s, alphabet)
        if ns.initial & ns.accepting:
            raise ConstructionError(f"summand {k}: the repeated part {s} accepts the empty word")
        off_r = len(states)
        off_s = off_r + nr.n
        # the position automaton's start state has no incoming edges; it
        # doubles as the hub visited once per completed repetition
        hub = off_s
        for a in alphabet:
            for q in range(nr.n):
                t = nr.delta[a][q]
                row = t << off_r
                if t & nr.accepting:
                    row |= 1 << hub
                delta[a].append(row)
            for q in range(ns.n):
                t = ns.delta[a][q]
                row = t << off_s
                if t & ns.accepting:
                    row |= 1 << hub
                delta[a].append(row)
        states += [f"r{k}.{x}" for x in nr.states] + [f"s{k}.{x}" for x in ns.states]
        initial |= nr.initial << off_r
        if nr.initial & nr.accepting:
            initial |= 1 << hub
        accepting |= 1 << hub
    return OmegaAutomaton(alphabet, tuple(states), {a: tuple(v) for a, v in delta.items()},
                          initial, Buchi(accepting))


# ---------------------------------------------------------------- quasi-automata


@dataclass(frozen=True, eq=False)
class QuasiAutomaton:
    """Deterministic machine on a distributive semilattice.

    ``maps[a][x]`` is the letter action, ``accept`` the set of elements on
    which the output functional is 1.
    """

    carrier: Semilattice
    alphabet: Alphabet
    maps: dict
    initial: int
    accept: frozenset

    def b(self, x) -> bool:
        return x in self.accept

    def step(self, x, a):
        return self.maps[a][x]

    def validate(self):
        elems = self.carrier.elements
        for a in self.alphabet:
            m = self.maps[a]
            if m[0] != 0:
                raise ConstructionError(f"letter map {a} does not fix 0")
            for x in elems:
                for y in elems:
                    if m[x | y] != m[x] | m[y]:
                        raise ConstructionError(f"letter map {a} is not join-preserving")
        if 0 in self.accept:
            raise ConstructionError("output functional is nonzero on 0")
        for x in elems:
            for y in elems:
                if self.b(x | y) != (self.b(x) or self.b(y)):
                    raise ConstructionError("output functional is not join-preserving")
        return self


def quasi_accepts(p: QuasiAutomaton, w: RightUP, start=None) -> bool:
    check_word(w, p.alphabet)
    x = p.initial if start is None else start
    for a in w.prefix:
        x = p.maps[a][x]
    seen = {}
    trail = []
    while x not in seen:
        seen[x] = len(trail)
        for a in w.period:
            x = p.maps[a][x]
            trail.append(x)
    return any(p.b(y) for y in trail[seen[x]:])


def dba_quasi_convert(x):
    if isinstance(x, OmegaAutomaton):
        return _dba_to_quasi(x)
    if isinstance(x, QuasiAutomaton):
        return _quasi_to_dba(x)
    raise TypeError("expected an OmegaAutomaton or a QuasiAutomaton")


MAX_FREE_STATES = 16


def _dba_to_quasi(a: OmegaAutomaton) -> QuasiAutomaton:
    if not isinstance(a.condition, Buchi):
        raise DeterminismError("only Buchi automata convert to quasi-automata")
    if not a.is_deterministic:
        raise DeterminismError("Buchi automaton is not deterministic")
    if a.n > MAX_FREE_STATES:
        raise BudgetError(f"free carrier on {a.n} states is too large")
    size = 1 << a.n
    carrier = Semilattice(a.n, tuple(range(size)), tuple(1 << i for i in range(a.n)))
    maps = {}
    for letter in a.alphabet:
        rows = a.delta[letter]
        maps[letter] = tuple(vec_times(s, rows) for s in range(size))
    acc = a.condition.accepting
    accept = frozenset(s for s in range(size) if s & acc)
    return QuasiAutomaton(carrier, a.alphabet, maps, a.initial, accept)


def _quasi_to_dba(p: QuasiAutomaton) -> OmegaAutomaton:
    order = [p.initial]
    index = {p.initial: 0}
    i = 0
    while i < len(order):
        for a in p.alphabet:
            y = p.maps[a][order[i]]
            if y not in index:
                index[y] = len(order)
                order.append(y)
        i += 1
    delta = {a: tuple(1 << index[p.maps[a][x]] for x in order) for a in p.alphabet}
    acc = 0
    for k, x in enumerate(order):
        if p.b(x):
            acc |= 1 << k
    return OmegaAutomaton(p.alphabet, tuple(f"x{k}" for k in range(len(order))), delta, 1,
                          Buchi(acc))


# ---------------------------------------------------------------- state spaces


def _flagged_letter(a: OmegaAutomaton, letter):
    acc = a.condition.accepting
    rows = tuple(a.delta[letter])
    return rows, tuple(r & acc for r in rows)


def _flagged_product(x, y):
    r1, f1 = x
    r2, f2 = y
    rows = tuple(vec_times(r, r2) for r in r1)
    flags = tuple(vec_times(f, r2) | vec_times(r, f2) for r, f in zip(r1, f1))
    return rows, flags


def flagged_monoid(a: OmegaAutomaton, budget=None):
    """Distinct flagged word matrices over nonempty words with shortlex witnesses."""
    budget = resolve_budget(budget)
    letters = {c: _flagged_letter(a, c) for c in a.alphabet}
    found, order = {}, []
    frontier = []
    for c in a.alphabet:
        m = letters[c]
        if m not in found:
            found[m] = c
            order.append(m)
            frontier.append(m)
    while frontier:
        nxt = []
        for m in frontier:
            for c in a.alphabet:
                new = _flagged_product(m, letters[c])
                if new not in found:
                    found[new] = found[m] + c
                    order.append(new)
                    nxt.append(new)
                    if len(order) > budget:
                        raise BudgetError(f"flagged monoid exceeds budget {budget}",
                                          {"monoid_elements": len(order)})
        frontier = nxt
    return [(m, found[m]) for m in order]


def _gamma_periodic(flagged) -> int:
    """States with a run on ``v^w`` passing through accepting states infinitely often."""
    rows, flags = flagged
    star = transitive_closure(rows, reflexive=True)
    good = 0
    for p in range(len(rows)):
        for r in bits_of(flags[p]):
            if star[r] >> p & 1:
                good |= 1 << p
                break
    out = 0
    for q, r in enumerate(star):
        if r & good:
            out |= 1 << q
    return out


def gamma(a: OmegaAutomaton, w: RightUP) -> int:
    """Bitset of states from which ``w`` has an accepting run (Buchi)."""
    check_word(w, a.alphabet)
    m = _flagged_letter(a, w.period[0])
    for c in w.period[1:]:
        m = _flagged_product(m, _flagged_letter(a, c))
    tail = _gamma_periodic(m)
    out = 0
    for q in range(a.n):
        if a.run(w.prefix, 1 << q) & tail:
            out |= 1 << q
    return out


def omega_statespace(a: OmegaAutomaton, budget=None):
    """``(A(+), A(-))`` of the machine: finite prefixes against infinite tails."""
    if not isinstance(a.condition, Buchi):
        raise ValueError("state spaces are computed for Buchi machines")
    nfa = a.as_nfa()
    left = _close_family([(a.initial, "")], a.alphabet, nfa.step, lambda w, c: w + c)
    seeds = [(_gamma_periodic(m), RightUP("", wit)) for m, wit in flagged_monoid(a, budget)]

    def pre(vec, c):
        out = 0
        for q, r in enumerate(a.delta[c]):
            if r & vec:
                out |= 1 << q
        return out

    right = _close_family(seeds, a.alphabet, pre,
                          lambda w, c: normalize_up(RightUP(c + w.prefix, w.period)))
    return build_dual(left, right, a.alphabet, a, lambda w: a.run(w),
                      lambda w: gamma(a, w), lambda fw, rw: omega_accepts(a, fw + rw))


def omega_identity_decomposition(a: OmegaAutomaton, budget=None):
    plus, minus = omega_statespace(a, budget)
    return identity_decomposition(plus, minus)


def omega_circular(a: OmegaAutomaton, c, route="statespace", budget=None) -> bool:
    """Circular language of the machine, by trace on A(+) or on the free module."""
    word = c.rep if isinstance(c, CircWord) else c
    check_word(word, a.alphabet)
    if route == "machine":
        return bool_trace(word_matrix(a.as_nfa(), word))
    if route != "statespace":
        raise ValueError(f"unknown route {route!r}")
    plus, _ = omega_statespace(a, budget)
    emb = birkhoff_embedding(plus.semilattice)
    return projective_trace(emb, lambda x: plus.act(x, word))


def quasi_from_automaton(a: OmegaAutomaton) -> QuasiAutomaton:
    """Subset machine on the join closure of the reachable sets ``Q_in M_w``.

    The output functional tests for an accepting state. For a deterministic
    machine this is the reachable part of the free carrier.
    """
    if not isinstance(a.condition, Buchi):
        raise ValueError("quasi-automata are built from Buchi machines")
    reach = [a.initial]
    seen = {a.initial}
    i = 0
    while i < len(reach):
        for c in a.alphabet:
            y = vec_times(reach[i], a.delta[c])
            if y not in seen:
                seen.add(y)
                reach.append(y)
        i += 1
    carrier = join_closure(reach, a.n)
    maps = {c: {x: vec_times(x, a.delta[c]) for x in carrier.elements} for c in a.alphabet}
    acc = a.condition.accepting
    accept = frozenset(x for x in carrier.elements if x & acc)
    return QuasiAutomaton(carrier, a.alphabet, maps, a.initial, accept)


__all__ = [
    "Buchi", "Muller", "Rabin", "Streett", "OmegaAutomaton", "OmegaRegex", "QuasiAutomaton",
    "convert_condition", "omega_accepts", "parse_omega_regex", "omega_regex_to_buchi",
    "quasi_accepts", "dba_quasi_convert", "flagged_monoid", "gamma", "omega_statespace",
    "omega_identity_decomposition", "omega_circular", "quasi_from_automaton",
]
