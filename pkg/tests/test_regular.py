import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import has_factor_in, matches
from soficalc.boolsemi import BoolMat, mat_compose
from soficalc.errors import AlphabetError, ParseError
from soficalc.regular import (Concat, Star, Sym, Union, accepted_words, accepts,
                              canonical_dfa, circular_member, equivalent, factor_complement,
                              lang_boolean_ops, regex_parse, to_nfa, word_matrix)
from soficalc.sofic import build_shift, essential_presentation
from soficalc.words import Alphabet

AB = Alphabet("ab")


@st.composite
def regexes(draw, depth=3, letters="ab"):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.sampled_from(list(letters) + ["1", "0"]))
    op = draw(st.sampled_from(["+", ".", "*"]))
    a = draw(regexes(depth - 1, letters))
    if op == "*":
        return f"({a})*"
    b = draw(regexes(depth - 1, letters))
    return f"({a}){'+' if op == '+' else ''}({b})"


def test_parse_examples():
    assert regex_parse("ab(bb)*a") == Concat((Sym("a"), Sym("b"),
                                              Star(Concat((Sym("b"), Sym("b")))), Sym("a")))
    assert regex_parse("a*+b*") == Union((Star(Sym("a")), Star(Sym("b"))))
    assert str(regex_parse("1")) == "1"
    with pytest.raises(ParseError, match="position"):
        regex_parse("a+(b")
    with pytest.raises(ParseError):
        regex_parse("*a")


def test_to_nfa_examples():
    assert not any(to_nfa("0", AB).accepts(w) for w in AB.words(3))
    n = to_nfa("ab(bb)*a")
    assert n.accepts("aba") and not n.accepts("abba") and n.accepts("abbba")


@given(regexes(depth=4))
def test_to_nfa_matches_derivative_oracle(r):
    n = to_nfa(r, AB)
    d = canonical_dfa(n)
    for w in AB.words(6):
        want = matches(r, w)
        assert n.accepts(w) == want
        assert d.accepts(w) == want


def test_canonical_dfa_examples():
    assert canonical_dfa(to_nfa("a*", "a")).n == 1
    assert canonical_dfa(to_nfa("a*", AB)).n == 2
    d = factor_complement("bb", AB)
    assert d.n == 3 and d.sink is not None


@given(regexes())
def test_canonical_dfa_minimal_and_idempotent(r):
    d = canonical_dfa(to_nfa(r, AB))
    again = canonical_dfa(d.to_nfa())
    assert again.n == d.n
    assert equivalent(d, again)
    # Myhill-Nerode: distinct states are told apart by a short suffix
    reach = {}
    for w in AB.words(d.n):
        reach.setdefault(d.run(w), w)
    assert len(reach) == d.n
    reps = list(reach.values())
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            assert any(d.accepts(reps[i] + s) != d.accepts(reps[j] + s)
                       for s in AB.words(d.n))


def test_boolean_ops_examples():
    a, b = to_nfa("a*", AB), to_nfa("b*", AB)
    both = lang_boolean_ops("intersect", a, b)
    assert [w for w in AB.words(4) if accepts(both, w)] == [""]
    cc = lang_boolean_ops("complement", lang_boolean_ops("complement", a))
    assert equivalent(cc, a)
    sat = lang_boolean_ops("concat", lang_boolean_ops("star", to_nfa("a+b", AB)), to_nfa("bb", AB),
                           lang_boolean_ops("star", to_nfa("a+b", AB)))
    assert accepts(sat, "abba") and not accepts(sat, "abab")
    with pytest.raises(AlphabetError):
        lang_boolean_ops("union", to_nfa("a", "a"), to_nfa("b", "b"), alphabet="a")


@given(regexes())
def test_complement_laws(r):
    n = to_nfa(r, AB)
    c = lang_boolean_ops("complement", n)
    assert not any(accepts(lang_boolean_ops("intersect", n, c), w) for w in AB.words(5))
    assert all(accepts(lang_boolean_ops("union", n, c), w) for w in AB.words(5))


def test_factor_complement_examples():
    d = factor_complement("bb", AB)
    assert d.accepts("abab") and not d.accepts("abba") and d.accepts("ababab")
    d = factor_complement("ab(bb)*a", AB)
    assert not d.accepts("aba") and not d.accepts("abbba") and d.accepts("abba")
    d = factor_complement("0", AB)
    assert all(d.accepts(w) for w in AB.words(4))
    assert all(q in d.accepting for q in range(d.n) if q != d.sink)


@given(regexes())
def test_factor_complement_is_factor_closed(r):
    d = factor_complement(r, AB)
    for w in accepted_words(d, 6):
        assert not has_factor_in(r, w)
        for i in range(len(w)):
            for j in range(i, len(w) + 1):
                assert d.accepts(w[i:j])


def test_word_matrix_examples():
    n = essential_presentation(build_shift("ab+ba").presentation)
    assert word_matrix(n, "").to_lists() == BoolMat.identity(n.n).to_lists()
    a, b = word_matrix(n, "a").to_lists(), word_matrix(n, "b").to_lists()
    assert sorted([a, b]) == sorted([[[1, 0], [0, 0]], [[0, 0], [0, 1]]])


@given(regexes(), st.text(alphabet="ab", max_size=4), st.text(alphabet="ab", max_size=4))
def test_word_matrix_is_morphism(r, u, v):
    n = to_nfa(r, AB)
    assert word_matrix(n, u + v) == mat_compose(word_matrix(n, u), word_matrix(n, v))


def test_circular_member_examples():
    n = build_shift("bb").presentation
    assert circular_member(n, "ab") and not circular_member(n, "b")
    assert circular_member(n, "")
    with pytest.raises(AlphabetError):
        circular_member(n, "c")


@given(regexes(), st.text(alphabet="ab", max_size=6))
def test_circular_rotation_invariant(r, w):
    n = to_nfa(r, AB)
    values = {circular_member(n, w[i:] + w[:i]) for i in range(max(len(w), 1))}
    assert len(values) == 1
