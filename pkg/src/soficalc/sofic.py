"""Sofic shifts given by forbidden words, and their Boolean state spaces.

A shift is built from a regex ``W`` of forbidden factors. Its presentation is
the minimal DFA of the words avoiding ``W`` with the sink removed. Limit sets
of ultimately periodic words on that presentation give vectors and
functionals whose pairing defines the state spaces ``A(+)`` and ``A(-)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .boolsemi import (BoolMat, BoolVec, Semilattice, _sort_key, birkhoff_embedding,
                       bits_of, eventual_period, is_distributive, projective_trace,
                       transitive_closure, vec_times)
from .errors import BudgetError, ProjectivityError
from .regular import (Dfa, Nfa, _as_regex, canonical_dfa, circular_member,
                      factor_complement, lang_boolean_ops, regex_letters)
from .words import (Alphabet, BiUP, CircWord, LeftUP, RightUP, check_word, normalize_up,
                    witness_key)

DEFAULT_BUDGET = 20000


def resolve_budget(budget=None):
    if budget is not None:
        return int(budget)
    env = os.environ.get("SOFICALC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def shift_alphabet(w, alphabet=None) -> Alphabet:
    """Explicit alphabet, or the letters of ``w`` together with ``a`` and ``b``."""
    if alphabet is not None:
        return Alphabet.of(alphabet)
    return Alphabet(tuple(sorted(regex_letters(w) | {"a", "b"})))


@dataclass(frozen=True, eq=False)
class SoficShift:
    forbidden: object
    alphabet: Alphabet
    factor_dfa: Dfa
    presentation: Nfa
    # factor_dfa state behind each presentation state
    dfa_states: tuple
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def matrices(self):
        return {a: self.presentation.matrix(a) for a in self.alphabet}

    @property
    def is_empty(self):
        return not cycle_states(self.presentation)


def build_shift(w, alphabet=None) -> SoficShift:
    w = _as_regex(w)
    alphabet = shift_alphabet(w, alphabet)
    d = factor_complement(w, alphabet)
    keep = [q for q in range(d.n) if q != d.sink]
    pos = {q: i for i, q in enumerate(keep)}
    delta = {}
    for a in alphabet:
        delta[a] = tuple(1 << pos[d.delta[a][q]] if d.delta[a][q] in pos else 0 for q in keep)
    initial = 1 << pos[d.initial] if d.initial in pos else 0
    n = Nfa(alphabet, tuple(d.states[q] for q in keep), delta, initial, (1 << len(keep)) - 1)
    return SoficShift(w, alphabet, d, n, tuple(keep))


def _presentation(s):
    return s.presentation if isinstance(s, SoficShift) else s


def word_rows(n: Nfa, word):
    rows = [1 << i for i in range(n.n)]
    for a in word:
        m = n.delta[a]
        rows = [vec_times(r, m) for r in rows]
    return rows


def _on_cycle(rows):
    plus = transitive_closure(rows)
    out = 0
    for i, r in enumerate(plus):
        if r >> i & 1:
            out |= 1 << i
    return out, plus


def cycle_states(n: Nfa) -> int:
    union = [0] * n.n
    for a in n.alphabet:
        for i, r in enumerate(n.delta[a]):
            union[i] |= r
    return _on_cycle(union)[0]


def _left_vector(n: Nfa, w: LeftUP) -> int:
    rows = word_rows(n, w.period)
    cyc, plus = _on_cycle(rows)
    reach = cyc
    for c in bits_of(cyc):
        reach |= plus[c]
    return vec_times(reach, word_rows(n, w.suffix))


def _right_vector(n: Nfa, w: RightUP) -> int:
    rows = word_rows(n, w.period)
    cyc, plus = _on_cycle(rows)
    can_loop = 0
    for p, r in enumerate(plus):
        if (r & cyc) or (cyc >> p & 1):
            can_loop |= 1 << p
    out = 0
    for q, r in enumerate(word_rows(n, w.prefix)):
        if r & can_loop:
            out |= 1 << q
    return out


def limit_left(s, w: LeftUP) -> BoolVec:
    """States where a left-infinite path labelled ``w`` ends."""
    n = _presentation(s)
    check_word(w, n.alphabet)
    return BoolVec(_left_vector(n, w), n.n, n.states)


def limit_right(s, w: RightUP) -> BoolVec:
    """States where a right-infinite path labelled ``w`` starts."""
    n = _presentation(s)
    check_word(w, n.alphabet)
    return BoolVec(_right_vector(n, w), n.n, n.states)


def member_biinfinite(s, w: BiUP) -> bool:
    n = _presentation(s)
    check_word(w, n.alphabet)
    left = _left_vector(n, LeftUP(w.left, w.middle))
    return bool(left & _right_vector(n, RightUP("", w.right)))


# ---------------------------------------------------------------- state spaces


def transition_monoid(n: Nfa, budget=None, identity=False):
    """Distinct word matrices ``M_w`` with shortlex-least witnesses.

    Nonempty words only, unless ``identity`` adds ``M_epsilon``.
    """
    budget = resolve_budget(budget)
    found = {}
    order = []
    if identity:
        rows = tuple(1 << i for i in range(n.n))
        found[rows] = ""
        order.append(rows)
    frontier = []
    for a in n.alphabet:
        rows = tuple(n.delta[a])
        if rows not in found:
            found[rows] = a
            order.append(rows)
        frontier.append((rows, a))
    frontier = [(r, w) for r, w in frontier if found[r] == w]
    while frontier:
        nxt = []
        for rows, w in frontier:
            for a in n.alphabet:
                m = n.delta[a]
                new = tuple(vec_times(r, m) for r in rows)
                if new not in found:
                    found[new] = w + a
                    order.append(new)
                    nxt.append((new, w + a))
                    if len(order) > budget:
                        raise BudgetError(
                            f"transition monoid exceeds budget {budget}",
                            {"monoid_elements": len(order), "longest_witness": len(w) + 1})
        frontier = nxt
    return [(rows, found[rows]) for rows in order]


@dataclass
class WordFamily:
    """Vectors of one side, closed under the letter action of that side."""

    vectors: list
    witnesses: list
    succ: dict


def _close_family(seeds, alphabet, step, extend):
    vectors, witnesses, index = [], [], {}
    for vec, wit in seeds:
        if vec not in index:
            index[vec] = len(vectors)
            vectors.append(vec)
            witnesses.append(wit)
    succ = {a: [] for a in alphabet}
    i = 0
    while i < len(vectors):
        for a in alphabet:
            nv = step(vectors[i], a)
            if nv not in index:
                index[nv] = len(vectors)
                vectors.append(nv)
                witnesses.append(extend(witnesses[i], a))
            succ[a].append(index[nv])
        i += 1
    # relax witnesses so each vector keeps its simplest known word
    changed = True
    while changed:
        changed = False
        for i in range(len(vectors)):
            for a in alphabet:
                j = succ[a][i]
                cand = extend(witnesses[i], a)
                if witness_key(cand) < witness_key(witnesses[j]):
                    witnesses[j] = cand
                    changed = True
    return WordFamily(vectors, witnesses, succ)


@dataclass(frozen=True, eq=False)
class StateSpace:
    """One side of the pairing quotient.

    Elements are profiles: bitsets over the opposite side's word vectors.
    ``reps[x]`` is a bitset over this side's words whose join is ``x``.
    """

    side: str
    semilattice: Semilattice
    word_witnesses: tuple
    word_profiles: tuple
    letter_action: dict
    generators: tuple
    generator_witnesses: dict
    reps: dict
    pairing: BoolMat
    source: object = field(default=None, repr=False)
    vector_of: object = field(default=None, repr=False)
    opposite_vectors: tuple = field(default=(), repr=False)
    direct_pairing: object = field(default=None, repr=False)

    @property
    def elements(self):
        return self.semilattice.elements

    def __len__(self):
        return len(self.semilattice)

    def act(self, x, word):
        """Letter action; right action on side ``+``, left action on side ``-``."""
        letters = word if self.side == "+" else reversed(word)
        for a in letters:
            x = self.letter_action[a][x]
        return x

    def element(self, word):
        """Class of a word of this side."""
        v = self.vector_of(word)
        p = 0
        for j, c in enumerate(self.opposite_vectors):
            if v & c:
                p |= 1 << j
        return p

    def name(self, x):
        """``g<i>`` for generators, otherwise the join of generators below ``x``."""
        if x == 0:
            return "0"
        if x in self.generator_witnesses:
            return f"g{self.generators.index(x)}"
        below = [g for g in self.generators if g | x == x]
        # keep only maximal generators below x
        top = [g for g in below if not any(h != g and g | h == h for h in below)]
        return " + ".join(f"g{self.generators.index(g)}" for g in top)

    def relations(self):
        """Pairwise joins of generators that land on a generator."""
        out = []
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                k = gens.index(gens[i] | gens[j]) if gens[i] | gens[j] in gens else None
                if k is not None:
                    out.append((i, j, k))
        return out

    def witness_of(self, x):
        if x in self.generator_witnesses:
            return str(self.generator_witnesses[x])
        words = [str(self.word_witnesses[i]) for i in bits_of(self.reps[x])]
        return " + ".join(words) if words else "0"


def _closure_with_reps(profiles, width):
    reps = {0: 0}
    for i, p in enumerate(profiles):
        if p in reps:
            continue
        for e, r in list(reps.items()):
            if e | p not in reps:
                reps[e | p] = r | (1 << i)
    elements = tuple(sorted(reps, key=_sort_key))
    return Semilattice(width, elements, tuple(dict.fromkeys(profiles))), reps


def build_dual(left: WordFamily, right: WordFamily, alphabet, source=None,
               left_vector=None, right_vector=None, direct_pairing=None):
    """Quotient both word families by the pairing ``[l & r != 0]``."""
    lp = []
    for lv in left.vectors:
        p = 0
        for j, rv in enumerate(right.vectors):
            if lv & rv:
                p |= 1 << j
        lp.append(p)
    rp = [0] * len(right.vectors)
    for i, p in enumerate(lp):
        for j in bits_of(p):
            rp[j] |= 1 << i

    sides = {}
    for side, own, profs, other in (("+", left, lp, right), ("-", right, rp, left)):
        sl, reps = _closure_with_reps(profs, len(other.vectors))
        action = {}
        for a in alphabet:
            remap = other.succ[a]
            table = {}
            for x in sl.elements:
                y = 0
                for j, k in enumerate(remap):
                    if x >> k & 1:
                        y |= 1 << j
                table[x] = y
            action[a] = table
        wits = {}
        for i, p in enumerate(profs):
            if p and (p not in wits or witness_key(own.witnesses[i]) < witness_key(wits[p])):
                wits[p] = own.witnesses[i]
        gens = sorted(wits, key=lambda g: witness_key(wits[g]))
        sides[side] = (sl, reps, action, tuple(gens), wits, profs, own)

    def make(side, opposite):
        sl, reps, action, gens, wits, profs, own = sides[side]
        osl, oreps, _, ogens, _, _, other = sides[opposite]
        rows = []
        for g in gens:
            row = 0
            for j, h in enumerate(ogens):
                if g & oreps[h]:
                    row |= 1 << j
            rows.append(row)
        vec = left_vector if side == "+" else right_vector
        return StateSpace(side, sl, tuple(own.witnesses), tuple(profs), action, gens, wits,
                          reps, BoolMat(tuple(rows), len(ogens)), source, vec,
                          tuple(other.vectors), direct_pairing)

    return make("+", "-"), make("-", "+")


def pair(plus: StateSpace, minus: StateSpace, u, y) -> bool:
    """Pairing of ``u`` in A(+) with ``y`` in A(-)."""
    return bool(u & minus.reps[y])


def dual_statespaces(s: SoficShift, budget=None):
    key = ("dual", resolve_budget(budget))
    if key in s._cache:
        return s._cache[key]
    n = s.presentation
    monoid = transition_monoid(n, budget)
    left_seeds, right_seeds = [], []
    for rows, wit in monoid:
        cyc, plus = _on_cycle(list(rows))
        reach = cyc
        for c in bits_of(cyc):
            reach |= plus[c]
        left_seeds.append((reach, LeftUP(wit, "")))
        can_loop = 0
        for p, r in enumerate(plus):
            if (r & cyc) or (cyc >> p & 1):
                can_loop |= 1 << p
        right_seeds.append((can_loop, RightUP("", wit)))
    left = _close_family(left_seeds, n.alphabet, n.step,
                         lambda w, a: normalize_up(LeftUP(w.period, w.suffix + a)))
    right = _close_family(right_seeds, n.alphabet,
                          lambda v, a: n.matrix(a).apply_right(v),
                          lambda w, a: normalize_up(RightUP(a + w.prefix, w.period)))
    out = build_dual(left, right, n.alphabet, s,
                     lambda w: _left_vector(n, w), lambda w: _right_vector(n, w),
                     lambda lw, rw: member_biinfinite(n, lw + rw))
    s._cache[key] = out
    return out


def statespace(s: SoficShift, side="+", budget=None) -> StateSpace:
    plus, minus = dual_statespaces(s, budget)
    if side in ("+", "plus"):
        return plus
    if side in ("-", "minus"):
        return minus
    raise ValueError(f"side must be '+' or '-', got {side!r}")


def pairing_matrix(sp: StateSpace, sm: StateSpace, rows, cols) -> BoolMat:
    """Entry (i, j) is the value of the concatenated word ``rows[i] cols[j]``."""
    out = []
    for r in rows:
        bits = 0
        for j, c in enumerate(cols):
            if sp.direct_pairing(r, c):
                bits |= 1 << j
        out.append(bits)
    return BoolMat(tuple(out), len(cols))


# ---------------------------------------------------------------- embeddings into the presentation module


def _accepting_list(d: Dfa):
    return sorted(d.accepting)


def embed(s: SoficShift, w) -> BoolVec:
    """Image of ``w`` under the embedding into the free module over S_t.

    For a left-infinite word: accepting states visited infinitely often by
    the runs from ``s_in`` on longer and longer suffixes. For a right-infinite
    word: states from which every finite prefix keeps the run accepting.
    """
    d = s.factor_dfa
    acc = _accepting_list(d)
    pos = {q: i for i, q in enumerate(acc)}
    labels = tuple(d.states[q] for q in acc)
    check_word(w, d.alphabet)
    out = 0
    if isinstance(w, LeftUP):
        v, u = w.period, w.suffix
        mv = BoolMat(tuple(1 << d.run(v, q) for q in range(d.n)), d.n)
        t, p = eventual_period(mv)
        for r in range(len(v)):
            start = d.run(v[len(v) - r:]) if r else d.initial
            q = start
            for _ in range(t):
                q = d.run(v, q)
            for _ in range(p):
                end = d.run(u, q)
                if end in pos:
                    out |= 1 << pos[end]
                q = d.run(v, q)
    elif isinstance(w, RightUP):
        for q in acc:
            if _stays_accepting(d, q, w):
                out |= 1 << pos[q]
    else:
        raise TypeError("embed takes a LeftUP or RightUP word")
    return BoolVec(out, len(acc), labels)


def _stays_accepting(d: Dfa, q, w: RightUP):
    for a in w.prefix:
        q = d.delta[a][q]
        if q not in d.accepting:
            return False
    seen = set()
    while q not in seen:
        seen.add(q)
        for a in w.period:
            q = d.delta[a][q]
            if q not in d.accepting:
                return False
    return True


def forbidden_from_statespace(sp: StateSpace) -> Dfa:
    """DFA on A(+) plus a start state; it accepts the words killing every class."""
    if sp.side != "+":
        raise ValueError("forbidden_from_statespace needs the + side")
    elems = list(sp.semilattice.elements)
    idx = {x: i for i, x in enumerate(elems)}
    star = len(elems)
    top = sp.semilattice.top
    letters = sp.source.alphabet if sp.source is not None else tuple(sp.letter_action)
    alphabet = Alphabet.of(letters)
    delta = {}
    for a in alphabet:
        act = sp.letter_action[a]
        delta[a] = tuple(idx[act[x]] for x in elems) + (idx[act[top]],)
    accepting = {idx[0]}
    if top == 0:
        accepting.add(star)
    states = tuple(f"e{i}" for i in range(len(elems))) + ("*",)
    raw = Dfa(alphabet, states, delta, star, frozenset(accepting))
    return canonical_dfa(raw)


def trim_presentation(n: Nfa) -> Nfa:
    """Restriction to the states lying on bi-infinite paths."""
    union = [0] * n.n
    for a in n.alphabet:
        for i, r in enumerate(n.delta[a]):
            union[i] |= r
    cyc, plus = _on_cycle(union)
    after = cyc
    for c in bits_of(cyc):
        after |= plus[c]
    before = 0
    for q, r in enumerate(plus):
        if r & cyc or cyc >> q & 1:
            before |= 1 << q
    keep = after & before
    delta = {a: tuple(r & keep if keep >> q & 1 else 0 for q, r in enumerate(n.delta[a]))
             for a in n.alphabet}
    return Nfa(n.alphabet, n.states, delta, keep, keep)


def essential_presentation(n: Nfa) -> Nfa:
    """The trimmed presentation with the dropped states removed."""
    t = trim_presentation(n)
    keep = list(bits_of(t.initial))
    pos = {q: i for i, q in enumerate(keep)}

    def squeeze(bits):
        return sum(1 << pos[q] for q in bits_of(bits))

    delta = {a: tuple(squeeze(t.delta[a][q]) for q in keep) for a in n.alphabet}
    full = (1 << len(keep)) - 1
    return Nfa(n.alphabet, tuple(n.states[q] for q in keep), delta, full, full)


def forbidden_from_presentation(n: Nfa) -> Dfa:
    """Minimal DFA of the words that label no path through the bi-infinite part."""
    trimmed = trim_presentation(n)
    return canonical_dfa(lang_boolean_ops("complement", trimmed))


# ---------------------------------------------------------------- decomposition of the identity


@dataclass(frozen=True)
class IdentityDecomposition:
    pairs: tuple
    plus: StateSpace = field(repr=False)
    minus: StateSpace = field(repr=False)

    def witness_pairs(self):
        return [(self.plus.witness_of(x), self.minus.witness_of(y)) for x, y in self.pairs]

    def check(self) -> bool:
        for u in self.plus.elements:
            acc = 0
            for x, y in self.pairs:
                if pair(self.plus, self.minus, u, y):
                    acc |= x
            if acc != u:
                return False
        for v in self.minus.elements:
            acc = 0
            for x, y in self.pairs:
                if pair(self.plus, self.minus, x, v):
                    acc |= y
            if acc != v:
                return False
        return True


def identity_decomposition(plus: StateSpace, minus: StateSpace) -> IdentityDecomposition:
    emb = birkhoff_embedding(plus.semilattice)
    order = {g: i for i, g in enumerate(plus.generators)}
    irr = sorted(emb.join_irreducibles, key=lambda j: order.get(j, len(order)))
    pairs = []
    for j in irr:
        wanted = {u: j | u == u for u in plus.elements}
        for y in minus.elements:
            if all(pair(plus, minus, u, y) == wanted[u] for u in plus.elements):
                pairs.append((j, y))
                break
        else:
            raise ProjectivityError("no dual element realizes a join-irreducible functional")
    return IdentityDecomposition(tuple(pairs), plus, minus)


def circular_member_shift(s: SoficShift, c, route="statespace", presentation=None,
                          budget=None) -> bool:
    word = c.rep if isinstance(c, CircWord) else c
    check_word(word, s.alphabet)
    if route == "presentation":
        return circular_member(presentation if presentation is not None else s.presentation, word)
    if route != "statespace":
        raise ValueError(f"unknown route {route!r}")
    sp = statespace(s, "+", budget)
    emb = _embedding(s, sp)
    return projective_trace(emb, lambda x: sp.act(x, word))


def _embedding(s, sp):
    key = ("embedding", id(sp))
    if key not in s._cache:
        s._cache[key] = birkhoff_embedding(sp.semilattice)
    return s._cache[key]


def shift_report(s: SoficShift, budget=None) -> dict:
    """Summary of the presentation, state spaces and decomposition."""
    plus, minus = dual_statespaces(s, budget)
    dist = is_distributive(plus.semilattice)
    out = {
        "alphabet": str(s.alphabet),
        "forbidden": str(s.forbidden),
        "presentation_states": s.presentation.n,
        "empty_shift": s.is_empty,
        "plus": plus,
        "minus": minus,
        "distributive": dist,
        "decomposition": None,
    }
    if dist:
        out["decomposition"] = identity_decomposition(plus, minus)
    return out
