"""Evaluate symbolic terms in a concrete validated model.

This is the bridge used by the soundness cross-check: any sequent the
derivation engine proves against assumptions realized by a model must
evaluate to a true entailment here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import DynamicAlgebra
from .errors import ResolutionError
from .lattice import Element
from . import terms as T


@dataclass(frozen=True)
class SemanticModel:
    """A validated dynamic algebra plus atom bindings for the term language."""

    algebra: DynamicAlgebra
    atoms: dict[str, Element]

    @property
    def lattice(self):
        return self.algebra.lattice


def resolve_action(model: SemanticModel, ref: T.ActionRef) -> str:
    if isinstance(ref, T.ActName):
        model.algebra.action(ref.name)
        return ref.name
    inner = resolve_action(model, ref.ref)
    return model.algebra.appeared_action(ref.agent, inner)


def eval_term(model: SemanticModel, term: T.Term) -> Element:
    lat = model.lattice
    mama = model.algebra.mama

    def rec(t):
        if isinstance(t, T.Atom):
            try:
                return model.atoms[t.name]
            except KeyError:
                raise ResolutionError(f"undeclared proposition {t.name!r}")
        if isinstance(t, T.Bot):
            return lat.bottom
        if isinstance(t, T.Top):
            return lat.top
        if isinstance(t, T.Or):
            return lat.join2(rec(t.left), rec(t.right))
        if isinstance(t, T.And):
            return lat.meet2(rec(t.left), rec(t.right))
        if isinstance(t, T.Not):
            return lat.complement(rec(t.arg))
        if isinstance(t, T.App):
            return mama.appearance(t.agent, rec(t.arg))
        if isinstance(t, T.Info):
            return mama.information(t.agent, rec(t.arg))
        if isinstance(t, T.Know):
            return mama.knowledge(t.agent, rec(t.arg))
        if isinstance(t, T.Believe):
            return mama.belief(t.agent, rec(t.arg))
        if isinstance(t, T.CK):
            if t.depth is None:
                return mama.common_knowledge(t.agents)(rec(t.arg))
            # bounded variant: meet of the first depth+1 iterates (i from 0)
            g = mama.group_information(t.agents)
            acc = cur = rec(t.arg)
            for _ in range(t.depth):
                cur = g(cur)
                acc = lat.meet2(acc, cur)
            return acc
        if isinstance(t, T.Upd):
            return model.algebra.update_map(resolve_action(model, t.action))(rec(t.arg))
        if isinstance(t, T.After):
            return model.algebra.after_map(resolve_action(model, t.action))(rec(t.arg))
        raise TypeError(f"not a term: {t!r}")

    return rec(term)


def entails(model: SemanticModel, lhs: T.Term, rhs: T.Term) -> bool:
    """lhs <= rhs in the model's lattice."""
    return model.lattice.leq_(eval_term(model, lhs), eval_term(model, rhs))


def holds(model: SemanticModel, seq: T.Sequent) -> bool:
    return entails(model, seq.lhs, seq.rhs)
