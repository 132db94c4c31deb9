"""Decorated one-dimensional cobordisms and their Boolean evaluations.

A diagram is a stack of slices read bottom to top. Each slice is a row of
generators whose input signs, left to right, consume the current boundary.
A theory sends every generator to a Boolean matrix acting on column vectors,
so ``stack(d1, d2)`` evaluates to ``E(d2) @ E(d1)`` and a slice evaluates to
the Kronecker product of its generators.

Free flavors (fsa, sofic, buchi) use the state basis on both signs. The
projective flavor uses Birkhoff coordinates of a quasi-automaton carrier, on
which the identity strand is the retraction idempotent rather than ``I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .boolsemi import (BoolMat, Semilattice, bits_of, birkhoff_embedding,
                       join_closure, kron, mat_compose)
from .errors import BudgetError, ConstructionError, DiagramError, ParseError
from .omega import (Buchi, OmegaAutomaton, gamma, omega_statespace,
                    quasi_accepts, quasi_from_automaton)
from .regular import Nfa
from .sofic import (SoficShift, _left_vector, _right_vector, build_dual, build_shift,
                    dual_statespaces, resolve_budget, transition_monoid, _close_family)
from .words import CircWord, LeftUP, RightUP, check_word, normalize_up, parse_word

SIGNS = ("+", "-")


def sign_seq(text) -> tuple:
    if isinstance(text, tuple):
        out = text
    else:
        out = tuple(c for c in str(text) if not c.isspace())
    for s in out:
        if s not in SIGNS:
            raise ParseError(f"bad sign {s!r}; signs are + and -")
    return out


def _flip(s):
    return "-" if s == "+" else "+"


@dataclass(frozen=True)
class Gen:
    """One generator. ``kind`` is id, dot, cup, cap, cup', cap', swap, birth or death."""

    kind: str
    sign: str = ""
    letter: str = ""
    word: object = None
    signs2: tuple = ()

    @property
    def inputs(self) -> tuple:
        k = self.kind
        if k in ("id", "dot", "death"):
            return (self.sign,)
        if k == "cap":
            return ("-", "+")
        if k == "cap'":
            return ("+", "-")
        if k == "swap":
            return self.signs2
        return ()

    @property
    def outputs(self) -> tuple:
        k = self.kind
        if k in ("id", "dot", "birth"):
            return (self.sign,)
        if k == "cup":
            return ("+", "-")
        if k == "cup'":
            return ("-", "+")
        if k == "swap":
            return self.signs2[::-1]
        return ()

    def __str__(self):
        k = self.kind
        if k == "id":
            return "id" + self.sign
        if k == "dot":
            return f"dot:{self.letter}:{self.sign}"
        if k == "swap":
            return "swap:" + "".join(self.signs2)
        if k in ("birth", "death"):
            return k + self.sign + (f":{self.word}" if self.word is not None else "")
        return k


def ident(s):
    return Gen("id", s)


def dot(a, s):
    return Gen("dot", s, a)


def swap(s1, s2):
    return Gen("swap", signs2=(s1, s2))


def birth(s, word=None):
    return Gen("birth", s, word=word)


def death(s, word=None):
    return Gen("death", s, word=word)


CUP, CAP, CUP2, CAP2 = Gen("cup"), Gen("cap"), Gen("cup'"), Gen("cap'")


@dataclass(frozen=True)
class Diagram:
    source: tuple
    slices: tuple

    def __post_init__(self):
        object.__setattr__(self, "source", sign_seq(self.source))
        object.__setattr__(self, "slices", tuple(tuple(s) for s in self.slices))
        self.target  # type check

    @property
    def target(self) -> tuple:
        cur = self.source
        for k, sl in enumerate(self.slices):
            cur = _slice_output(sl, cur, k)
        return cur

    def __str__(self):
        lines = ["obj " + " ".join(self.source)]
        lines += ["slice " + " ".join(str(g) for g in sl) for sl in self.slices]
        return "\n".join(lines)


def _slice_output(sl, cur, k=0):
    pos, out = 0, []
    for g in sl:
        need = g.inputs
        got = cur[pos:pos + len(need)]
        if got != need:
            raise DiagramError(f"slice {k}: {g} expects {''.join(need) or 'nothing'}, "
                               f"boundary has {''.join(got) or 'nothing'} at position {pos}")
        pos += len(need)
        out.extend(g.outputs)
    if pos != len(cur):
        raise DiagramError(f"slice {k}: {len(cur) - pos} boundary points are not consumed")
    return tuple(out)


def identity_diagram(signs) -> Diagram:
    signs = sign_seq(signs)
    return Diagram(signs, ((ident(s) for s in signs),) if signs else ())


def stack(d1: Diagram, d2: Diagram) -> Diagram:
    """``d1`` first, then ``d2`` on top."""
    if d1.target != d2.source:
        raise DiagramError(f"cannot stack: {''.join(d1.target)} vs {''.join(d2.source)}")
    return Diagram(d1.source, d1.slices + d2.slices)


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """Side by side; the shorter diagram is padded with identity slices."""
    s1, s2 = list(d1.slices), list(d2.slices)
    t1, t2 = d1.target, d2.target
    while len(s1) < len(s2):
        s1.append(tuple(ident(s) for s in t1))
    while len(s2) < len(s1):
        s2.append(tuple(ident(s) for s in t2))
    return Diagram(d1.source + d2.source, tuple(a + b for a, b in zip(s1, s2)))


def _parse_gen(tok: str, boundary, pos) -> Gen:
    if tok in ("cup", "cap", "cup'", "cap'"):
        return Gen(tok)
    if tok in ("id+", "id-"):
        return ident(tok[2])
    if tok.startswith("dot:"):
        parts = tok.split(":")
        if len(parts) != 3 or len(parts[1]) != 1 or parts[2] not in SIGNS:
            raise ParseError(f"expected dot:<letter>:<sign>, got {tok!r}")
        return dot(parts[1], parts[2])
    if tok == "swap":
        got = boundary[pos:pos + 2]
        if len(got) != 2:
            raise DiagramError(f"swap at position {pos} needs two boundary points")
        return swap(*got)
    if tok.startswith("swap:"):
        sg = sign_seq(tok[5:])
        if len(sg) != 2:
            raise ParseError(f"swap needs two signs, got {tok!r}")
        return swap(*sg)
    for kind in ("birth", "death"):
        if tok.startswith(kind):
            rest = tok[len(kind):]
            if not rest or rest[0] not in SIGNS:
                raise ParseError(f"expected {kind}+ or {kind}-, got {tok!r}")
            if len(rest) == 1:
                return Gen(kind, rest[0])
            if rest[1] != ":":
                raise ParseError(f"bad generator {tok!r}")
            return Gen(kind, rest[0], word=parse_word(rest[2:]))
    raise ParseError(f"unknown generator {tok!r}")


def parse_diagram(text: str) -> Diagram:
    """``obj <signs>`` followed by ``slice <gen> ...`` lines (or ``;`` separated)."""
    lines = []
    for raw in text.replace(";", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not lines[0].startswith("obj"):
        raise ParseError("diagram must start with 'obj <signs>'")
    head = lines[0].split()
    if head[0] != "obj":
        raise ParseError(f"bad header {lines[0]!r}")
    source = sign_seq("".join(head[1:]))
    cur = source
    slices = []
    for k, line in enumerate(lines[1:]):
        toks = line.split()
        if toks[0] != "slice":
            raise ParseError(f"expected 'slice', got {toks[0]!r}")
        gens, pos = [], 0
        for tok in toks[1:]:
            g = _parse_gen(tok, cur, pos)
            pos += len(g.inputs)
            gens.append(g)
        cur = _slice_output(gens, cur, k)
        slices.append(tuple(gens))
    return Diagram(source, tuple(slices))


def _reverse_word(w):
    if w is None:
        return None
    if isinstance(w, LeftUP):
        return normalize_up(RightUP(w.suffix[::-1], w.period[::-1]))
    if isinstance(w, RightUP):
        return normalize_up(LeftUP(w.period[::-1], w.prefix[::-1]))
    return w[::-1]


_MIRROR = {"cup": "cup'", "cup'": "cup", "cap": "cap'", "cap'": "cap"}


def reverse_orientation(d: Diagram) -> Diagram:
    """Flip every sign; accumulating words are read backwards."""
    slices = []
    for sl in d.slices:
        out = []
        for g in sl:
            if g.kind in _MIRROR:
                out.append(Gen(_MIRROR[g.kind]))
            elif g.kind == "swap":
                out.append(swap(*(_flip(s) for s in g.signs2)))
            else:
                out.append(Gen(g.kind, _flip(g.sign), g.letter, _reverse_word(g.word)))
        slices.append(tuple(out))
    return Diagram(tuple(_flip(s) for s in d.source), tuple(slices))


# ---------------------------------------------------------------- theories


@dataclass(frozen=True, eq=False)
class Theory:
    """Assignment of matrices to generators.

    ``flavor`` is fsa, sofic, buchi or projective; ``machine`` is the Nfa,
    SoficShift, OmegaAutomaton or QuasiAutomaton behind it.
    """

    flavor: str
    machine: object
    dim: int
    letters: dict
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def alphabet(self):
        m = self.machine
        return m.alphabet

    def module_dim(self, signs) -> int:
        return self.dim ** len(signs)


def _transposed_letters(rows_by_letter, n):
    return {a: BoolMat(tuple(rows), n).transpose() for a, rows in rows_by_letter.items()}


def fsa_theory(n: Nfa) -> Theory:
    return Theory("fsa", n, n.n, _transposed_letters(n.delta, n.n))


def sofic_theory(s, alphabet=None, presentation=None) -> Theory:
    if not isinstance(s, SoficShift):
        s = build_shift(s, alphabet)
    n = presentation if presentation is not None else s.presentation
    t = Theory("sofic", s, n.n, _transposed_letters(n.delta, n.n))
    t.cache["presentation"] = n
    return t


def buchi_theory(a: OmegaAutomaton) -> Theory:
    if not isinstance(a.condition, Buchi):
        raise ConstructionError("the buchi flavor needs a Buchi acceptance condition")
    return Theory("buchi", a, a.n, _transposed_letters(a.delta, a.n))


def projective_theory(p) -> Theory:
    """Quasi-automaton theory in Birkhoff coordinates; refuses non-distributive carriers."""
    if isinstance(p, OmegaAutomaton):
        p = quasi_from_automaton(p)
    emb = birkhoff_embedding(p.carrier)
    letters = {a: emb.endomorphism_matrix(p.maps[a]).transpose() for a in p.alphabet}
    t = Theory("projective", p, emb.rank, letters)
    t.cache["embedding"] = emb
    return t


def _presentation(t: Theory) -> Nfa:
    return t.cache["presentation"]


def _column(bits, n) -> BoolMat:
    return BoolMat(tuple(1 if bits >> i & 1 else 0 for i in range(n)), 1)


def _row(bits, n) -> BoolMat:
    return BoolMat((bits,), n)


def _flat_identity(n) -> int:
    out = 0
    for i in range(n):
        out |= 1 << (i * n + i)
    return out


def _flat(n, pred) -> int:
    out = 0
    for i in range(n):
        for k in range(n):
            if pred(i, k):
                out |= 1 << (i * n + k)
    return out


def _check_word(t: Theory, g: Gen, kind):
    w = g.word
    if kind is None:
        if w is not None:
            raise DiagramError(f"{g}: the {t.flavor} flavor takes no word at this endpoint")
        return
    if not isinstance(w, kind):
        need = "left-infinite" if kind is LeftUP else "right-infinite"
        raise DiagramError(f"{g}: the {t.flavor} flavor needs a {need} word here")
    check_word(w, t.alphabet)


# which word type each endpoint carries, per flavor
_ENDPOINT_WORDS = {
    "fsa": {("birth", "+"): None, ("death", "+"): None, ("birth", "-"): None,
            ("death", "-"): None},
    "sofic": {("birth", "+"): LeftUP, ("death", "+"): RightUP, ("birth", "-"): RightUP,
              ("death", "-"): LeftUP},
    "buchi": {("birth", "+"): None, ("death", "+"): RightUP, ("birth", "-"): RightUP,
              ("death", "-"): None},
}
_ENDPOINT_WORDS["projective"] = _ENDPOINT_WORDS["buchi"]


def _endpoint_bits(t: Theory, g: Gen) -> int:
    kind = _ENDPOINT_WORDS[t.flavor][(g.kind, g.sign)]
    _check_word(t, g, kind)
    m = t.machine
    key = (g.kind, g.sign)
    if t.flavor == "fsa":
        return {("birth", "+"): m.initial, ("death", "+"): m.accepting,
                ("birth", "-"): m.accepting, ("death", "-"): m.initial}[key]
    if t.flavor == "sofic":
        n = _presentation(t)
        return _left_vector(n, g.word) if kind is LeftUP else _right_vector(n, g.word)
    if t.flavor == "buchi":
        return m.initial if kind is None else gamma(m, g.word)
    emb = t.cache["embedding"]
    js = emb.join_irreducibles
    if key == ("birth", "+"):
        return emb.inject_bits(m.initial)
    if key == ("death", "-"):
        return sum(1 << u for u, j in enumerate(js) if j | m.initial == m.initial)
    return sum(1 << i for i, j in enumerate(js) if quasi_accepts(m, g.word, start=j))


def generator_matrix(t: Theory, g: Gen) -> BoolMat:
    """Matrix of one generator, rows indexed by outputs and columns by inputs."""
    n = t.dim
    k = g.kind
    proj = t.flavor == "projective"
    emb = t.cache.get("embedding")
    order = emb.order_matrix() if proj else None  # (i, k) = J_i <= J_k
    if k == "id":
        if proj:
            # entry (k, i) is J_k <= J_i on +, its transpose on -
            return order if g.sign == "+" else order.transpose()
        return BoolMat.identity(n)
    if k == "dot":
        if g.letter not in t.letters:
            raise DiagramError(f"{g}: letter {g.letter!r} is not in the alphabet")
        m = t.letters[g.letter]
        return m if g.sign == "+" else m.transpose()
    if k == "swap":
        rows = []
        for i in range(n):
            for j in range(n):
                # output (i, j) comes from input (j, i)
                rows.append(1 << (j * n + i))
        return BoolMat(tuple(rows), n * n)
    if k in ("cup", "cup'"):
        if proj:
            # cup has + first, cup' has - first; both pair J_i <= J_k with i on +
            bits = _flat(n, (lambda i, j: order[i, j]) if k == "cup" else
                         (lambda j, i: order[i, j]))
        else:
            bits = _flat_identity(n)
        return _column(bits, n * n)
    if k in ("cap", "cap'"):
        if proj:
            bits = _flat(n, (lambda u, s: order[u, s]) if k == "cap" else
                         (lambda s, u: order[u, s]))
        else:
            bits = _flat_identity(n)
        return _row(bits, n * n)
    if k == "birth":
        return _column(_endpoint_bits(t, g), n)
    if k == "death":
        return _row(_endpoint_bits(t, g), n)
    raise DiagramError(f"unknown generator {g}")


def slice_matrix(t: Theory, sl) -> BoolMat:
    out = BoolMat((1,), 1)
    for g in sl:
        out = kron(out, generator_matrix(t, g))
    return out


def evaluate(t: Theory, d: Diagram) -> BoolMat:
    """Column-convention matrix from the source module to the target module."""
    dim = t.module_dim(d.source)
    out = BoolMat.identity(dim)
    if t.flavor == "projective" and d.source:
        out = slice_matrix(t, [ident(s) for s in d.source])
    for sl in d.slices:
        m = slice_matrix(t, sl)
        if m.ncols != out.nrows:
            raise DiagramError(f"internal dimension mismatch {m.shape} after {out.shape}")
        out = mat_compose(m, out)
    return out


def evaluate_closed(t: Theory, d: Diagram) -> bool:
    if d.source or d.target:
        raise DiagramError("evaluate_closed needs a diagram from the empty object to itself")
    m = evaluate(t, d)
    return bool(m.rows[0] & 1)


def circle(word, sign="+") -> Diagram:
    """Closed circle carrying ``word`` read along a + strand."""
    word = word.rep if isinstance(word, CircWord) else word
    if sign != "+":
        raise ValueError("circles are drawn with the + strand on the left")
    slices = [(CUP,)]
    slices += [(dot(a, "+"), ident("-")) for a in word]
    slices.append((CAP2,))
    return Diagram((), tuple(slices))


def interval(left, middle, right, flavor="sofic") -> Diagram:
    """Closed + interval: birth with ``left``, dots ``middle``, death with ``right``."""
    slices = [(birth("+", left),)]
    slices += [(dot(a, "+"),) for a in middle]
    slices.append((death("+", right),))
    return Diagram((), tuple(slices))


# ---------------------------------------------------------------- universal construction


@dataclass(frozen=True, eq=False)
class StateSpaceUC:
    """Span of boundary diagrams for one object, quotiented by closure pairings."""

    obj: tuple
    basis: tuple
    profiles: tuple
    semilattice: Semilattice
    plus_size: int
    minus_size: int
    cup_classes: int = 0
    split_classes: int = 0
    cup_in_split_span: bool | None = None
    split_span_size: int = 0

    def __len__(self):
        return len(self.semilattice)


def _free_ingredients(t: Theory, budget=None):
    """Left vectors, right vectors with labels, pairing spaces and the monoid."""
    if t.flavor == "sofic":
        s = t.machine
        plus, minus = dual_statespaces(s, budget)
        n = s.presentation
    elif t.flavor == "buchi":
        plus, minus = omega_statespace(t.machine, budget)
        n = t.machine.as_nfa()
    elif t.flavor == "fsa":
        n = t.machine
        left = _close_family([(n.initial, "")], n.alphabet, n.step, lambda w, c: w + c)

        def pre(vec, c):
            return n.matrix(c).apply_right(vec)

        right = _close_family([(n.accepting, "")], n.alphabet, pre, lambda w, c: c + w)
        plus, minus = build_dual(left, right, n.alphabet, n, lambda w: n.run(w),
                                 lambda w: pre_word(n, w), lambda lw, rw: n.accepts(lw + rw))
    else:
        raise ConstructionError("the universal construction is implemented for free flavors")
    lefts = [(plus.vector_of(plus.generator_witnesses[g]), str(plus.generator_witnesses[g]))
             for g in plus.generators]
    rights = [(minus.vector_of(minus.generator_witnesses[g]), str(minus.generator_witnesses[g]))
              for g in minus.generators]
    monoid = transition_monoid(n, budget, identity=True)
    return plus, minus, lefts, rights, monoid, n


def pre_word(n: Nfa, w: str) -> int:
    vec = n.accepting
    for c in reversed(w):
        vec = n.matrix(c).apply_right(vec)
    return vec


def _profile(bits_list):
    p = 0
    for j, b in enumerate(bits_list):
        if b:
            p |= 1 << j
    return p


def universal_statespace(t: Theory, obj="+-", budget=None) -> StateSpaceUC:
    """State space of ``(+)``, ``(-)`` or ``(+,-)`` by the universal construction."""
    obj = sign_seq(obj)
    budget = resolve_budget(budget)
    plus, minus, lefts, rights, monoid, n = _free_ingredients(t, budget)
    if obj == ("+",):
        return StateSpaceUC(obj, tuple(str(plus.witness_of(g)) for g in plus.generators),
                            tuple(plus.generators), plus.semilattice, len(plus), len(minus))
    if obj == ("-",):
        return StateSpaceUC(obj, tuple(str(minus.witness_of(g)) for g in minus.generators),
                            tuple(minus.generators), minus.semilattice, len(plus), len(minus))
    if obj != ("+", "-"):
        raise ValueError("objects are limited to +, - and +-")
    size = len(lefts) * len(rights) * 2 + len(monoid) ** 2
    if size > budget * 50:
        raise BudgetError(f"universal construction needs {size} pairings, over budget",
                          {"basis": len(lefts) * len(rights) + len(monoid)})

    def val(lv, rows, rv):
        return bool(vec_rows(lv, rows) & rv)

    ident_rows = tuple(1 << i for i in range(n.n))
    splits = [(lv, rv, f"<{lw}| x |{rw}>") for lv, lw in lefts for rv, rw in rights]
    cups = [(rows, f"cup({wit or '_'})") for rows, wit in monoid]
    # mirror basis: death pairs (right word on +, left word on -) and cap' with a word
    mirror_pairs = [(rv, lv) for rv, _ in rights for lv, _ in lefts]
    mirror_caps = [rows for rows, _ in monoid]

    profiles, labels = [], []
    for lv, rv, label in splits:
        bits = [val(lv, ident_rows, r2) and val(l2, ident_rows, rv) for r2, l2 in mirror_pairs]
        bits += [val(lv, rows, rv) for rows in mirror_caps]
        profiles.append(_profile(bits))
        labels.append(label)
    for m, label in cups:
        bits = [val(l2, m, r2) for r2, l2 in mirror_pairs]
        bits += [_trace_product(m, rows) for rows in mirror_caps]
        profiles.append(_profile(bits))
        labels.append(label)
    width = len(mirror_pairs) + len(mirror_caps)
    sl = join_closure(profiles, width)
    split_prof = profiles[:len(splits)]
    cup_prof = profiles[len(splits):]
    span = join_closure(split_prof, width)
    ident_cup = cup_prof[[w for _, w in monoid].index("")]
    return StateSpaceUC(obj, tuple(labels), tuple(profiles), sl, len(plus), len(minus),
                        len(set(cup_prof)), len(set(split_prof)), ident_cup in span, len(span))


def vec_rows(v, rows):
    out = 0
    for i in bits_of(v):
        out |= rows[i]
    return out


def _trace_product(m1, m2) -> bool:
    for i, r in enumerate(m1):
        if vec_rows(r, m2) >> i & 1:
            return True
    return False


def theory_alpha(t: Theory, component) -> bool:
    """Value of one closed component: a circle word or an interval (left, middle, right)."""
    if isinstance(component, (str, CircWord)):
        return evaluate_closed(t, circle(component))
    left, middle, right = component
    return evaluate_closed(t, interval(left, middle, right))


__all__ = [
    "Gen", "Diagram", "Theory", "StateSpaceUC", "sign_seq", "ident", "dot", "swap", "birth",
    "death", "CUP", "CAP", "CUP2", "CAP2", "identity_diagram", "stack", "tensor",
    "parse_diagram", "reverse_orientation", "fsa_theory", "sofic_theory", "buchi_theory",
    "projective_theory", "generator_matrix", "evaluate", "evaluate_closed", "circle", "interval",
    "universal_statespace", "theory_alpha",
]
