"""Command line: ``soficalc shift|omega|tqft <command> ...``.

Exit status 0 on success, 1 when a computation is refused (not projective,
not deterministic, over budget), 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .boolsemi import is_distributive
from .errors import InputError, ParseError, SoficalcError
from .omega import (Buchi, Muller, OmegaAutomaton, QuasiAutomaton, Rabin, Streett,
                    dba_quasi_convert, omega_accepts, omega_circular,
                    omega_regex_to_buchi, omega_statespace, quasi_from_automaton)
from .regular import Nfa
from .sofic import (build_shift, circular_member_shift, dual_statespaces,
                    forbidden_from_presentation, identity_decomposition, member_biinfinite)
from .tqft import (buchi_theory, evaluate, evaluate_closed, fsa_theory, parse_diagram,
                   projective_theory, sofic_theory, universal_statespace)
from .words import Alphabet, parse_word, show


# ---------------------------------------------------------------- automaton files


def _names_to_bits(names, index, line_no):
    out = 0
    for q in names:
        if q not in index:
            raise ParseError(f"line {line_no}: unknown state {q!r}")
        out |= 1 << index[q]
    return out


def parse_automaton(text: str) -> OmegaAutomaton:
    """Line format: alphabet, states, initial, accepting, muller, rabin, streett, trans."""
    alphabet, states, initial, accepting = None, None, [], []
    muller, rabin, streett, trans = [], [], [], []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "alphabet":
            alphabet = rest
        elif key == "states":
            states = rest
        elif key == "initial":
            initial += rest
        elif key == "accepting":
            accepting += rest
        elif key == "muller":
            muller.append((no, rest))
        elif key in ("rabin", "streett"):
            (rabin if key == "rabin" else streett).append((no, _pair_sets(rest, no)))
        elif key == "trans":
            if len(rest) != 3:
                raise ParseError(f"line {no}: expected 'trans <from> <letter> <to>'")
            trans.append((no, *rest))
        else:
            raise ParseError(f"line {no}: unknown keyword {key!r}")
    if alphabet is None:
        alphabet = sorted({t[2] for t in trans})
    alphabet = Alphabet.of(tuple(alphabet))
    if states is None:
        states = []
        for _, p, _, q in trans:
            for x in (p, q):
                if x not in states:
                    states.append(x)
        for x in initial + accepting:
            if x not in states:
                states.append(x)
    if not states:
        raise ParseError("automaton has no states")
    if len(set(states)) != len(states):
        raise ParseError("duplicate state names")
    index = {q: i for i, q in enumerate(states)}
    delta = {a: [0] * len(states) for a in alphabet}
    for no, p, a, q in trans:
        if a not in alphabet:
            raise ParseError(f"line {no}: letter {a!r} is not in the alphabet")
        delta[a][index[_known(p, index, no)]] |= 1 << index[_known(q, index, no)]
    init = _names_to_bits(initial, index, 0)
    if muller:
        cond = Muller(tuple(_names_to_bits(s, index, no) for no, s in muller))
    elif rabin:
        cond = Rabin(tuple((_names_to_bits(b, index, no), _names_to_bits(g, index, no))
                           for no, (b, g) in rabin))
    elif streett:
        cond = Streett(tuple((_names_to_bits(b, index, no), _names_to_bits(g, index, no))
                             for no, (b, g) in streett))
    else:
        cond = Buchi(_names_to_bits(accepting, index, 0))
    return OmegaAutomaton(alphabet, tuple(states), {a: tuple(r) for a, r in delta.items()},
                          init, cond)


def _known(q, index, no):
    if q not in index:
        raise ParseError(f"line {no}: unknown state {q!r}")
    return q


def _pair_sets(tokens, no):
    text = " ".join(tokens)
    if "|" not in text:
        raise ParseError(f"line {no}: expected 'B <states> | G <states>'")
    left, right = text.split("|", 1)
    lt, rt = left.split(), right.split()
    if not lt or lt[0] != "B" or not rt or rt[0] != "G":
        raise ParseError(f"line {no}: expected 'B <states> | G <states>'")
    return lt[1:], rt[1:]


def automaton_to_nfa(a: OmegaAutomaton) -> Nfa:
    return a.as_nfa()


def format_automaton(a: OmegaAutomaton) -> str:
    lines = ["alphabet " + " ".join(a.alphabet), "states " + " ".join(a.states),
             "initial " + " ".join(a.states[i] for i in range(a.n) if a.initial >> i & 1)]
    if isinstance(a.condition, Buchi):
        acc = a.condition.accepting
        lines.append("accepting " + " ".join(a.states[i] for i in range(a.n) if acc >> i & 1))
    for c in a.alphabet:
        for p, row in enumerate(a.delta[c]):
            for q in range(a.n):
                if row >> q & 1:
                    lines.append(f"trans {a.states[p]} {c} {a.states[q]}")
    return "\n".join(lines)


def load_automaton(path) -> OmegaAutomaton:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_automaton(text)


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def parse_theory(spec: str, budget=None):
    if ":" not in spec:
        raise ParseError("theory spec must be fsa:FILE, sofic:REGEX, buchi:FILE or proj:FILE")
    kind, arg = spec.split(":", 1)
    if kind == "fsa":
        return fsa_theory(automaton_to_nfa(load_automaton(arg)))
    if kind == "sofic":
        return sofic_theory(arg)
    if kind == "buchi":
        return buchi_theory(load_automaton(arg))
    if kind == "proj":
        return projective_theory(load_automaton(arg))
    raise ParseError(f"unknown theory flavor {kind!r}")


# ---------------------------------------------------------------- reports


def _bits(b):
    return 1 if b else 0


def _matrix_lines(m):
    return [" ".join(str(x) for x in row) for row in m.to_lists()]


def _show_word(w):
    return show(w) if isinstance(w, str) else str(w)


def _space_section(sp, bra):
    gens = []
    for i, g in enumerate(sp.generators):
        w = _show_word(sp.generator_witnesses[g])
        gens.append(f"g{i} = <{w}|" if bra else f"g{i} = |{w}>")
    rels = [f"g{i} + g{j} = g{k}" for i, j, k in sp.relations()]
    return {"size": len(sp), "generators": gens, "relations": rels}


def _dual_report(plus, minus, samples):
    out = {"A(+)": _space_section(plus, True), "A(-)": _space_section(minus, False),
           "pairing": _matrix_lines(plus.pairing)}
    dist = is_distributive(plus.semilattice)
    out["distributive"] = "yes" if dist else "no"
    if dist:
        dec = identity_decomposition(plus, minus)
        out["identity"] = [f"<{_show_word(x)}| x |{_show_word(y)}>"
                           for x, y in dec.witness_pairs()]
        out["circular"] = samples()
    else:
        out["identity"] = "refused: A(+) is not distributive"
    return out


def render_text(report, indent=0) -> str:
    lines = []
    pad = "  " * indent
    for key, val in report.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1))
        elif isinstance(val, list):
            lines.append(f"{pad}{key}:" if val else f"{pad}{key}: none")
            lines.extend(f"{pad}  {x}" for x in val)
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(x for x in lines if x != "")


def _circular_samples(test, alphabet, max_len=4):
    seen, out = set(), []
    for w in alphabet.words(max_len):
        c = parse_word("@" + show(w), "circ", alphabet).rep
        if c in seen:
            continue
        seen.add(c)
        if test(c):
            out.append("@" + show(c))
    return out


# ---------------------------------------------------------------- commands


def cmd_shift(args):
    alphabet = args.alphabet
    if args.cmd == "invert":
        a = load_automaton(args.automaton)
        d = forbidden_from_presentation(automaton_to_nfa(a))
        return {"states": d.n, "forbidden dfa": list(d.describe())}
    s = build_shift(args.forbidden, alphabet)
    if args.cmd == "analyze":
        plus, minus = dual_statespaces(s, args.budget)
        out = {"alphabet": " ".join(s.alphabet), "forbidden": str(s.forbidden),
               "presentation states": s.presentation.n,
               "empty shift": "yes" if s.is_empty else "no"}
        out.update(_dual_report(
            plus, minus,
            lambda: _circular_samples(lambda c: circular_member_shift(s, c, budget=args.budget),
                                      s.alphabet)))
        return out
    if args.cmd == "member":
        w = parse_word(args.word, "bi", s.alphabet)
        return {"word": str(w), "result": _bits(member_biinfinite(s, w))}
    if args.cmd == "circular":
        c = parse_word(args.word, "circ", s.alphabet)
        pres = None
        if args.presentation:
            pres = automaton_to_nfa(load_automaton(args.presentation))
        val = circular_member_shift(s, c, args.route, pres, args.budget)
        return {"word": str(c), "route": args.route, "result": _bits(val)}
    raise InputError(f"unknown shift command {args.cmd}")


def cmd_omega(args):
    if args.cmd == "regex":
        a = omega_regex_to_buchi(args.expr, args.alphabet)
        w = parse_word(args.word, "right", a.alphabet)
        return {"word": str(w), "states": a.n, "result": _bits(omega_accepts(a, w))}
    a = load_automaton(args.automaton)
    if args.cmd == "accept":
        w = parse_word(args.word, "right", a.alphabet)
        return {"word": str(w), "result": _bits(omega_accepts(a, w))}
    if args.cmd == "statespace":
        plus, minus = omega_statespace(a, args.budget)
        out = {"alphabet": " ".join(a.alphabet), "states": a.n}
        out.update(_dual_report(
            plus, minus,
            lambda: _circular_samples(lambda c: omega_circular(a, c, budget=args.budget),
                                      a.alphabet)))
        return out
    if args.cmd == "convert":
        if args.to == "quasi":
            q = dba_quasi_convert(a)
        else:
            q = quasi_from_automaton(a)
        if args.to == "quasi":
            return _quasi_report(q)
        d = dba_quasi_convert(q)
        return {"automaton": format_automaton(d).splitlines()}
    raise InputError(f"unknown omega command {args.cmd}")


def _quasi_report(q: QuasiAutomaton):
    return {"carrier size": len(q.carrier), "distributive": "yes" if is_distributive(q.carrier)
            else "no", "initial": bin(q.initial)[2:].zfill(q.carrier.width)[::-1],
            "accepting elements": len(q.accept)}


def cmd_tqft(args):
    t = parse_theory(args.theory, args.budget)
    if args.cmd in ("eval", "closed"):
        d = parse_diagram(_read(args.diagram))
        if args.cmd == "closed":
            return {"flavor": t.flavor, "result": _bits(evaluate_closed(t, d))}
        m = evaluate(t, d)
        return {"flavor": t.flavor, "source": "".join(d.source) or "empty",
                "target": "".join(d.target) or "empty", "shape": f"{m.nrows}x{m.ncols}",
                "matrix": _matrix_lines(m)}
    if args.cmd == "statespace":
        u = universal_statespace(t, args.object, args.budget)
        out = {"flavor": t.flavor, "object": "".join(u.obj), "size": len(u),
               "A(+) size": u.plus_size, "A(-) size": u.minus_size}
        if u.obj == ("+", "-"):
            out.update({"cup classes": u.cup_classes, "split classes": u.split_classes,
                        "split span size": u.split_span_size,
                        "identity cup in split span": "yes" if u.cup_in_split_span else "no"})
        return out
    raise InputError(f"unknown tqft command {args.cmd}")


def build_parser():
    p = argparse.ArgumentParser(prog="soficalc", description="Boolean state spaces of sofic "
                                "shifts and omega-automata.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    top = p.add_subparsers(dest="group", required=True)

    def common(sp):
        sp.add_argument("--budget", type=int, default=None, help="monoid size cap")
        sp.add_argument("--alphabet", default=None, help="letters, e.g. ab")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    shift = top.add_parser("shift").add_subparsers(dest="cmd", required=True)
    x = shift.add_parser("analyze")
    x.add_argument("--forbidden", required=True)
    common(x)
    x = shift.add_parser("member")
    x.add_argument("--forbidden", required=True)
    x.add_argument("--word", required=True)
    common(x)
    x = shift.add_parser("circular")
    x.add_argument("--forbidden", required=True)
    x.add_argument("--word", required=True)
    x.add_argument("--route", choices=["statespace", "presentation"], default="statespace")
    x.add_argument("--presentation", default=None)
    common(x)
    x = shift.add_parser("invert")
    x.add_argument("--automaton", required=True)
    common(x)

    omega = top.add_parser("omega").add_subparsers(dest="cmd", required=True)
    for name in ("accept", "statespace", "convert"):
        x = omega.add_parser(name)
        x.add_argument("--automaton", required=True)
        if name == "accept":
            x.add_argument("--word", required=True)
        if name == "convert":
            x.add_argument("--to", choices=["quasi", "dba"], required=True)
        common(x)
    x = omega.add_parser("regex")
    x.add_argument("--expr", required=True)
    x.add_argument("--word", required=True)
    common(x)

    tq = top.add_parser("tqft").add_subparsers(dest="cmd", required=True)
    for name in ("eval", "closed", "statespace"):
        x = tq.add_parser(name)
        x.add_argument("--theory", required=True)
        if name == "statespace":
            x.add_argument("--object", default="+-")
        else:
            x.add_argument("--diagram", required=True)
        common(x)
    return p


_COMMANDS = {"shift": cmd_shift, "omega": cmd_omega, "tqft": cmd_tqft}


def run(argv=None, out=None, err=None):
    """Run one command; returns ``(exit_code, rendered_text)``."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        report = _COMMANDS[args.group](args)
    except SoficalcError as exc:
        err.write(f"error: {exc.kind}: {exc}\n")
        return exc.status, ""
    except ValueError as exc:
        err.write(f"error: input: {exc}\n")
        return 2, ""
    if args.json:
        text = json.dumps(report, sort_keys=True, indent=2)
    else:
        text = render_text(report)
    out.write(text + "\n")
    return 0, text


def main(argv=None):
    code, _ = run(argv)
    return code


__all__ = ["parse_automaton", "format_automaton", "parse_theory", "run", "main"]
