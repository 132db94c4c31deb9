import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from soficalc.cli import format_automaton, parse_automaton, run
from soficalc.errors import ParseError
from soficalc.omega import omega_accepts
from soficalc.words import parse_word

AUT = str(Path(__file__).resolve().parent.parent / "automata") + "/"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, text = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_golden_mean_analyze():
    code, out, _ = call("shift", "analyze", "--forbidden", "bb")
    assert code == 0
    assert "size: 3" in out
    assert "g0 + g1 = g0" in out
    assert "distributive: yes" in out
    ident = out.split("identity:\n")[1].split("circular:")[0].strip().splitlines()
    assert len(ident) == 2


def test_even_b_circular():
    code, out, _ = call("shift", "circular", "--forbidden", "ab(bb)*a", "--word", "@bbb")
    assert code == 0 and "result: 0" in out
    code, out, _ = call("shift", "circular", "--forbidden", "ab(bb)*a", "--word", "@bb",
                        "--route", "presentation")
    assert code == 0 and "result: 1" in out


def test_omega_accept_even_runs_machine():
    code, out, _ = call("omega", "accept", "--automaton", AUT + "even_runs_buchi.aut",
                        "--word", "(a)^w")
    assert code == 0 and "result: 0" in out
    code, out, _ = call("omega", "accept", "--automaton", AUT + "even_runs_buchi.aut",
                        "--word", "(b)^w")
    assert "result: 1" in out


def test_member_and_regex():
    code, out, _ = call("shift", "member", "--forbidden", "bb", "--word", "w^(a).bb.(a)^w")
    assert code == 0 and "result: 0" in out
    code, out, _ = call("omega", "regex", "--expr", "(1+b).(a*bb(bb)*)^w", "--word", "(abb)^w")
    assert code == 0 and "result: 1" in out


def test_statespace_and_tqft_commands():
    code, out, _ = call("omega", "statespace", "--automaton", AUT + "a_then_b.aut")
    assert code == 0 and "<_| x |a(b)^w>" in out
    code, out, _ = call("tqft", "eval", "--theory", "fsa:" + AUT + "no_bb.aut",
                        "--diagram", AUT + "snake.dia")
    assert code == 0 and "1 0\n  0 1" in out
    code, out, _ = call("tqft", "closed", "--theory", "sofic:ab(bb)*a",
                        "--diagram", AUT + "even_b_interval.dia")
    assert code == 0 and "result: 0" in out
    code, out, _ = call("tqft", "statespace", "--theory", "sofic:bb", "--object", "+-")
    assert code == 0 and "size: 6" in out


def test_invert_and_convert():
    code, out, _ = call("shift", "invert", "--automaton", AUT + "golden_nondet.aut")
    assert code == 0 and "forbidden dfa" in out
    code, out, _ = call("omega", "convert", "--automaton", AUT + "no_bb.aut", "--to", "quasi")
    assert code == 0 and "distributive: yes" in out
    code, out, _ = call("omega", "convert", "--automaton", AUT + "no_bb.aut", "--to", "dba")
    assert code == 0


@pytest.mark.parametrize("argv,kind", [
    (("shift", "circular", "--forbidden", "aaa+bb", "--word", "@ab"), "projectivity"),
    (("omega", "convert", "--automaton", AUT + "even_runs_buchi.aut", "--to", "quasi"),
     "determinism"),
    (("shift", "analyze", "--forbidden", "aaa+bb", "--budget", "3"), "budget"),
])
def test_refusals_exit_1(argv, kind):
    code, out, err = call(*argv)
    assert code == 1 and out == ""
    assert err.startswith(f"error: {kind}:") and err.count("\n") == 1


@pytest.mark.parametrize("argv", [
    ("shift", "member", "--forbidden", "b(", "--word", "w^(a)"),
    ("shift", "member", "--forbidden", "bb", "--word", "w^(c)"),
    ("omega", "accept", "--automaton", "missing.aut", "--word", "(a)^w"),
    ("tqft", "eval", "--theory", "nope:x", "--diagram", AUT + "snake.dia"),
    ("shift", "analyze"),
])
def test_input_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == ""


def test_json_output_is_sorted_and_parsable():
    code, out, _ = call("--json", "shift", "analyze", "--forbidden", "aaa+bb")
    assert code == 0
    doc = json.loads(out)
    assert doc["distributive"] == "no"
    assert doc["A(+)"]["size"] == 5
    assert out.strip() == json.dumps(doc, sort_keys=True, indent=2)


def test_reports_are_deterministic():
    argv = [sys.executable, "-m", "soficalc", "shift", "analyze", "--forbidden", "ab(bb)*a"]
    runs = {subprocess.run(argv, capture_output=True, text=True, check=True).stdout
            for _ in range(3)}
    assert len(runs) == 1


def test_automaton_format_round_trip():
    with open(AUT + "even_runs_buchi.aut") as fh:
        a = parse_automaton(fh.read())
    b = parse_automaton(format_automaton(a))
    for w in ("(a)^w", "(b)^w", "a(ab)^w", "(abb)^w"):
        assert omega_accepts(a, parse_word(w)) == omega_accepts(b, parse_word(w))
    with pytest.raises(ParseError):
        parse_automaton("alphabet a\nstates p\ntrans p a q\n")
    r = parse_automaton("alphabet a b\nstates p q\ninitial p\nrabin B q | G p\n"
                        "trans p a p\ntrans p b q\ntrans q b q\n")
    assert omega_accepts(r, parse_word("(a)^w")) and not omega_accepts(r, parse_word("(b)^w"))
