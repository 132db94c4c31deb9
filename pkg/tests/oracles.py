"""Independent reference implementations used to cross-check the library.

None of these call the automaton machinery under test; they work from the
regex syntax tree, raw transition tables, or explicit enumeration.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from soficalc.regular import Concat, Empty, Eps, Star, Sym, Union, regex_parse

# ---------------------------------------------------------------- regex derivatives


EMPTY, EPS = Empty(), Eps()


def _union(a, b):
    if isinstance(a, Empty):
        return b
    if isinstance(b, Empty):
        return a
    if a == b:
        return a
    parts = set()
    for x in (a, b):
        parts |= set(x.parts) if isinstance(x, Union) else {x}
    return Union(tuple(sorted(parts, key=repr)))


def _concat(a, b):
    if isinstance(a, Empty) or isinstance(b, Empty):
        return EMPTY
    if isinstance(a, Eps):
        return b
    if isinstance(b, Eps):
        return a
    return Concat((a, b))


@lru_cache(maxsize=None)
def nullable(r) -> bool:
    if isinstance(r, (Eps, Star)):
        return True
    if isinstance(r, (Empty, Sym)):
        return False
    if isinstance(r, Union):
        return any(nullable(p) for p in r.parts)
    return all(nullable(p) for p in r.parts)


@lru_cache(maxsize=None)
def derive(r, c):
    if isinstance(r, (Empty, Eps)):
        return EMPTY
    if isinstance(r, Sym):
        return EPS if r.letter == c else EMPTY
    if isinstance(r, Union):
        out = EMPTY
        for p in r.parts:
            out = _union(out, derive(p, c))
        return out
    if isinstance(r, Star):
        return _concat(derive(r.inner, c), r)
    head, rest = r.parts[0], r.parts[1:]
    tail = rest[0] if len(rest) == 1 else Concat(rest)
    out = _concat(derive(head, c), tail)
    if nullable(head):
        out = _union(out, derive(tail, c))
    return out


def matches(r, word) -> bool:
    if isinstance(r, str):
        r = regex_parse(r)
    for c in word:
        r = derive(r, c)
        if isinstance(r, Empty):
            return False
    return nullable(r)


def has_factor_in(r, word) -> bool:
    """Whether some factor of ``word`` matches ``r`` (derivative set scan)."""
    if isinstance(r, str):
        r = regex_parse(r)
    if nullable(r):
        return True
    live = set()
    for c in word:
        live.add(r)
        live = {derive(x, c) for x in live}
        live.discard(EMPTY)
        if any(nullable(x) for x in live):
            return True
    return False


# ---------------------------------------------------------------- infinite words


def unfold_right(w, n):
    u, v = w.prefix, w.period
    s = u
    while len(s) < n:
        s += v
    return s[:n]


def unfold_left(w, n):
    v, u = w.period, w.suffix
    s = u
    while len(s) < n:
        s = v + s
    return s[len(s) - n:]


def bi_window(w, reps=8):
    return w.left * reps + w.middle + w.right * reps


def shift_member_oracle(forbidden, w, reps=8) -> bool:
    """Bi-infinite membership by scanning a long window for forbidden factors."""
    return not has_factor_in(forbidden, bi_window(w, reps))


def circular_oracle(forbidden, c) -> bool:
    """Circular word lies in the shift iff ``(c)^Z`` avoids the forbidden factors."""
    if not c:
        return True
    return not has_factor_in(forbidden, c * 10)


# ---------------------------------------------------------------- Buchi by explicit runs


def buchi_oracle(delta, initial, accepting, w) -> bool:
    """Runs on ``u v^w`` tracked at period boundaries.

    Accept iff some state ``q`` reachable after ``u v^i`` can return to
    itself after a positive number of periods while passing an accepting
    state (entering it on a transition).
    """
    u, v = w.prefix, w.period

    def step_set(states, word):
        for c in word:
            states = {q2 for q in states for q2 in delta[c].get(q, ())}
        return states

    def step_flag(pairs, c):
        out = set()
        for q, f in pairs:
            for q2 in delta[c].get(q, ()):
                out.add((q2, f or q2 in accepting))
        return out

    reach = step_set(set(initial), u)
    seen, frontier = set(reach), reach
    while frontier:
        frontier = step_set(frontier, v) - seen
        seen |= frontier
    for q in seen:
        pairs = {(q, False)}
        visited = set()
        while pairs:
            for c in v:
                pairs = step_flag(pairs, c)
            if (q, True) in pairs:
                return True
            pairs -= visited
            visited |= pairs
    return False


def machine_tables(a):
    """Raw dict tables from an OmegaAutomaton for the oracle above."""
    delta = {c: {p: [q for q in range(a.n) if a.delta[c][p] >> q & 1] for p in range(a.n)}
             for c in a.alphabet}
    initial = [q for q in range(a.n) if a.initial >> q & 1]
    acc = {q for q in range(a.n) if a.condition.accepting >> q & 1}
    return delta, initial, acc


def omega_regex_oracle(summands, w, extra=8) -> bool:
    """Membership of ``u v^w`` in a union of ``r s^w`` by bounded split search.

    Positions past the prefix are identified modulo the period, and a
    position can restart ``s`` at any later position within ``bound``.
    """
    u, v = w.prefix, w.period
    bound = len(u) + len(v) * extra
    text = unfold_right(w, bound * 3)

    def canon(i):
        return i if i < len(u) else len(u) + (i - len(u)) % len(v)

    for r, s in summands:
        r = regex_parse(r) if isinstance(r, str) else r
        s = regex_parse(s) if isinstance(s, str) else s
        nodes = range(len(u) + len(v))
        succ = {i: set() for i in nodes}
        for i in nodes:
            for j in range(i + 1, i + bound + 1):
                if matches(s, text[i:j]):
                    succ[i].add(canon(j))
        # nodes that start an infinite walk
        alive = set(nodes)
        changed = True
        while changed:
            changed = False
            for i in list(alive):
                if not succ[i] & alive:
                    alive.discard(i)
                    changed = True
        for p in range(bound + 1):
            if canon(p) in alive and matches(r, text[:p]):
                return True
    return False


# ---------------------------------------------------------------- order theory by enumeration


def join_closure_oracle(gens):
    out = {0}
    gens = list(gens)
    for k in range(1, len(gens) + 1):
        for sub in combinations(gens, k):
            x = 0
            for g in sub:
                x |= g
            out.add(x)
    return out


def join_irreducibles_oracle(elements):
    elements = set(elements)
    out = []
    for x in elements:
        if x == 0:
            continue
        if not any(a | b == x and a != x and b != x for a in elements for b in elements):
            out.append(x)
    return sorted(out)


def mat_product_oracle(a, b):
    n, inner, k = len(a), len(b), len(b[0]) if b else 0
    return [[int(any(a[i][t] and b[t][j] for t in range(inner))) for j in range(k)]
            for i in range(n)]


def matrix_power_oracle(a, p):
    out = a
    for _ in range(p - 1):
        out = mat_product_oracle(out, a)
    return out


# ---------------------------------------------------------------- diagram component tracer


def trace_components(d):
    """Closed components of a diagram read along their orientation.

    Returns a list of ``("circle", word)`` and
    ``("interval", start_gen, middle_word, end_gen)``.
    """
    edges = {}       # node -> (next node, letter or None)
    starts, ends = {}, {}
    cur = list(d.source)
    for k, sl in enumerate(d.slices):
        p_in = p_out = 0
        for g in sl:
            ins, outs = g.inputs, g.outputs
            a_in = [(k, p_in + i) for i in range(len(ins))]
            a_out = [(k + 1, p_out + i) for i in range(len(outs))]
            kind = g.kind
            if kind in ("id", "dot"):
                letter = g.letter if kind == "dot" else None
                if g.sign == "+":
                    edges[a_in[0]] = (a_out[0], letter)
                else:
                    edges[a_out[0]] = (a_in[0], letter)
            elif kind == "swap":
                for src, dst, s in ((a_in[0], a_out[1], ins[0]), (a_in[1], a_out[0], ins[1])):
                    if s == "+":
                        edges[src] = (dst, None)
                    else:
                        edges[dst] = (src, None)
            elif kind == "cup":
                edges[a_out[1]] = (a_out[0], None)
            elif kind == "cup'":
                edges[a_out[0]] = (a_out[1], None)
            elif kind == "cap":
                edges[a_in[1]] = (a_in[0], None)
            elif kind == "cap'":
                edges[a_in[0]] = (a_in[1], None)
            elif kind == "birth":
                if g.sign == "+":
                    starts[a_out[0]] = g
                else:
                    ends[a_out[0]] = g
            elif kind == "death":
                if g.sign == "+":
                    ends[a_in[0]] = g
                else:
                    starts[a_in[0]] = g
            p_in += len(ins)
            p_out += len(outs)
        cur = [s for g in sl for s in g.outputs]
    assert not cur and not d.source, "tracer needs a closed diagram"
    comps, used = [], set()
    for node, g in starts.items():
        word, x = [], node
        while x not in ends:
            used.add(x)
            nxt, letter = edges[x]
            if letter:
                word.append(letter)
            x = nxt
        used.add(x)
        comps.append(("interval", g, "".join(word), ends[x]))
    for node in list(edges):
        if node in used:
            continue
        word, x = [], node
        while x not in used:
            used.add(x)
            nxt, letter = edges[x]
            if letter:
                word.append(letter)
            x = nxt
        comps.append(("circle", "".join(word)))
    return comps


# ------------------------------------------------------- infinity sets by subset enumeration


def inf_sets_oracle(delta, initial, w):
    """All state sets that are Inf(run) for some run on ``u v^w``.

    Nodes are (state, position mod |v|). A node set is an infinity set iff it
    is reachable and its induced subgraph is strongly connected with an edge.
    """
    u, v = w.prefix, w.period
    start = set(initial)
    for c in u:
        start = {q2 for q in start for q2 in delta[c].get(q, ())}
    nodes = [(q, i) for q in sorted({q for c in delta for q in delta[c]} | start)
             for i in range(len(v))]

    def succ(node):
        q, i = node
        return {(q2, (i + 1) % len(v)) for q2 in delta[v[i]].get(q, ())}

    reach, todo = set(), [(q, 0) for q in start]
    while todo:
        x = todo.pop()
        if x in reach:
            continue
        reach.add(x)
        todo.extend(succ(x))
    live = sorted(x for x in nodes if x in reach)
    out = set()
    for mask in range(1, 1 << len(live)):
        sub = {live[k] for k in range(len(live)) if mask >> k & 1}
        if _strongly_connected(sub, succ):
            out.add(frozenset(q for q, _ in sub))
    return out


def _strongly_connected(sub, succ):
    first = next(iter(sub))
    for a, b in ((first, None), (None, first)):
        seen, todo = set(), [first]
        while todo:
            x = todo.pop()
            for y in (succ(x) if b is None else {z for z in sub if x in succ(z)}):
                if y in sub and y not in seen:
                    seen.add(y)
                    todo.append(y)
        if seen != sub:
            return False
    return True
