"""Term grammar: parse/render round-trips, spines, error positions."""

import pytest
from hypothesis import given, strategies as st

from adjointkit import ParseError, parse_entailment, parse_term, render_term
from adjointkit import terms as T

AGENTS = st.sampled_from(["A", "B", "C1"])
ACTIONS = st.sampled_from(["a", "abar", "look"])
ATOMS = st.sampled_from(["H", "T", "m1", "p_0"])


def action_refs():
    return st.recursive(
        ACTIONS.map(T.ActName),
        lambda inner: st.builds(T.ActApp, AGENTS, inner),
        max_leaves=3,
    )


def terms():
    base = st.one_of(
        ATOMS.map(T.Atom),
        st.just(T.Bot()),
        st.just(T.Top()),
    )

    def extend(inner):
        return st.one_of(
            st.builds(T.Or, inner, inner),
            st.builds(T.And, inner, inner),
            st.builds(T.Not, inner),
            st.builds(T.App, AGENTS, inner),
            st.builds(T.Info, AGENTS, inner),
            st.builds(T.Know, AGENTS, inner),
            st.builds(T.Believe, AGENTS, inner),
            st.builds(
                T.CK,
                st.lists(AGENTS, min_size=1, max_size=3, unique=True).map(tuple),
                inner,
                st.one_of(st.none(), st.integers(0, 9)),
            ),
            st.builds(T.Upd, action_refs(), inner),
            st.builds(T.After, action_refs(), inner),
        )

    return st.recursive(base, extend, max_leaves=12)


@given(terms())
def test_parse_render_round_trip(t):
    assert parse_term(render_term(t)) == t


@given(terms(), terms())
def test_entailment_round_trip(lhs, rhs):
    seq = T.Sequent(lhs, rhs)
    assert parse_entailment(seq.render()) == seq


@given(terms())
def test_or_spine_rebuilds(t):
    spine = T.or_spine(t)
    assert spine
    rebuilt = spine[0]
    for part in spine[1:]:
        rebuilt = T.Or(rebuilt, part)
    # flattening is stable: the spine of the rebuilt term is unchanged
    assert T.or_spine(rebuilt) == spine


def test_precedence():
    t = parse_term("a \\/ b /\\ ~c")
    assert t == T.Or(T.Atom("a"), T.And(T.Atom("b"), T.Not(T.Atom("c"))))
    assert parse_term("(a \\/ b) /\\ c") == T.And(
        T.Or(T.Atom("a"), T.Atom("b")), T.Atom("c")
    )


def test_left_associativity():
    assert parse_term("a \\/ b \\/ c") == T.Or(T.Or(T.Atom("a"), T.Atom("b")), T.Atom("c"))


def test_action_appearance_ref():
    t = parse_term("upd[f'[A](abar)](H)")
    assert t == T.Upd(T.ActApp("A", T.ActName("abar")), T.Atom("H"))
    assert render_term(t) == "upd[f'[A](abar)](H)"


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse_term("H \\/ ")
    assert err.value.line == 1 and err.value.column == 6
    with pytest.raises(ParseError) as err:
        parse_term("fi[A](H")
    assert err.value.expected == "')'"


def test_unknown_bracket_head_rejected():
    with pytest.raises(ParseError):
        parse_term("zap[A](H)")


def test_trailing_input_rejected():
    with pytest.raises(ParseError):
        parse_term("H T")
