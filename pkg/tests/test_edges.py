"""Edge paths not naturally hit by the main suites."""

import pytest

from adjointkit import (
    ForeignElement,
    NotMeetPreserving,
    ResolutionError,
    UnknownAction,
    build_from_order,
    gfp_meet_reflexive,
    identity_map,
    map_from_table,
    parse_scenario,
    powerset_lattice,
)
from adjointkit.maps import MEET_PRESERVING, pointwise_meet, right_adjoint
from adjointkit.quantale import ActionQuantale
from conftest import coin_appearance


def test_map_from_table_meet_claim_validated(coin2):
    h, t = coin2.subset(["h"]), coin2.subset(["t"])
    with pytest.raises(NotMeetPreserving):
        map_from_table(coin2, [coin2.bottom, h, t, h], MEET_PRESERVING)


def test_gfp_meet_reflexive(coin2):
    fstar = right_adjoint(coin_appearance(coin2)).right
    refl = gfp_meet_reflexive(fstar)
    for e in coin2.elements:
        assert coin2.leq_(refl(e), e)
    assert refl == pointwise_meet(identity_map(coin2, MEET_PRESERVING), fstar)


def test_element_lookup_by_name():
    lat = build_from_order(["x", "y"], [("x", "y")])
    assert lat.element("x") == lat.bottom
    with pytest.raises(ForeignElement):
        lat.element("zz")


def test_subset_unknown_world(coin2):
    with pytest.raises(ForeignElement):
        coin2.subset(["nope"])


def test_quantale_element_validation():
    q = ActionQuantale(["a"], 2)
    with pytest.raises(UnknownAction):
        q.element([("b",)])
    assert q.leq(q.singleton("a"), q.join(q.singleton("a"), q.unit))
    assert not q.leq(q.unit, q.bottom)


def test_semantic_action_appearance_resolution():
    from importlib import resources

    from adjointkit import instantiate
    from adjointkit.semantics import eval_term
    from adjointkit.terms import parse_term

    text = (resources.files("adjointkit") / "scenarios" / "coin-lying-model.scn").read_text()
    inst = instantiate(parse_scenario(text))
    model = inst.model
    # f'[A](abar) resolves to a: the two updates agree pointwise
    via_ref = eval_term(model, parse_term("upd[f'[A](abar)](H)"))
    direct = eval_term(model, parse_term("upd[a](H)"))
    assert via_ref == direct


def test_duplicate_declarations_rejected():
    base = "version 1\nscenario d\nmode semantic\nworlds w\n"
    with pytest.raises(ResolutionError):
        parse_scenario(base + "agent A\nend\nagent A\nend\n")
    with pytest.raises(ResolutionError):
        parse_scenario(base + "prop w = w\n")
    with pytest.raises(ResolutionError):
        parse_scenario(
            base + "agent A\n  sees w -> w\nend\n"
            "query q check w |= w\nquery q check w |= w\n"
        )


def test_powerset_of_one_world():
    lat = powerset_lattice(["only"])
    assert lat.n == 2
    assert lat.is_boolean
    assert lat.join_irreducibles() == (lat.top,)
