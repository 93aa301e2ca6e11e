"""Action structure over a MAMA: updates, action appearance, axioms.

Each action a carries a join-preserving update map h_a (with computed right
adjoint h*_a, read "after a") and every agent an action-appearance f'_A on
labels. Validation enforces the no-miracle axiom
f_A(h_a(l)) <= h_{f'_A(a)}(f_A(l)) and forward fact stability
(l <= phi implies h_a(l) <= phi for communication actions).

No-miracle is checked on the join-irreducible generators by default: both
sides are join-preserving in l because f'_A acts on labels, so generator
coverage implies the full law. A full-lattice sweep stays available for
audits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EmptyActionSet,
    FactStabilityViolation,
    NoMiracleViolation,
    UnknownAction,
    UnknownAgent,
)
from .epistemic import MAMA
from .lattice import Element
from . import maps
from .maps import AdjointPair, LatticeMap


@dataclass(frozen=True)
class ActionLabel:
    name: str
    is_communication: bool = False


@dataclass(frozen=True)
class KernelReport:
    """Computed kernel of an action, compared against a declared one."""

    action: str
    computed: tuple[Element, ...]
    declared: tuple[Element, ...] | None
    undeclared_misses: tuple[Element, ...]   # declared but not in the kernel

    @property
    def matches(self) -> bool:
        return not self.undeclared_misses


@dataclass(frozen=True)
class FactStabilityReport:
    """Forward direction is mandatory; the converse is only reported.

    The converse (h_a(l) <= phi implies l <= phi) fails at kernel elements
    in any model where a communication action annihilates something, so
    strict mode lists those counterexamples instead of pretending the
    biconditional could hold.
    """

    forward_ok: bool
    forward_witness: tuple[str, Element, Element] | None
    converse_counterexamples: tuple[tuple[str, Element, Element], ...]

    @property
    def strict_ok(self) -> bool:
        return self.forward_ok and not self.converse_counterexamples


class DynamicAlgebra:
    """A validated action epistemic algebra; immutable after construction."""

    def __init__(
        self,
        mama: MAMA,
        actions: dict[str, ActionLabel],
        update: dict[str, AdjointPair],
        action_appearance: dict[str, dict[str, str]],
        facts: tuple[Element, ...],
        declared_kernels: dict[str, tuple[Element, ...]] | None = None,
    ):
        self.mama = mama
        self.lattice = mama.lattice
        self.actions = dict(actions)
        self.update = dict(update)
        self.action_appearance = {a: dict(m) for a, m in action_appearance.items()}
        self.facts = tuple(facts)
        self.declared_kernels = dict(declared_kernels or {})

    # -- lookups -----------------------------------------------------------

    def action(self, name: str) -> ActionLabel:
        try:
            return self.actions[name]
        except KeyError:
            raise UnknownAction(f"unknown action {name!r}")

    def update_map(self, name: str) -> LatticeMap:
        self.action(name)
        return self.update[name].left

    def after_map(self, name: str) -> LatticeMap:
        self.action(name)
        return self.update[name].right

    def appeared_action(self, agent: str, action: str) -> str:
        self.action(action)
        if agent not in self.mama.pairs:
            raise UnknownAgent(f"unknown agent {agent!r}")
        return self.action_appearance[agent][action]

    @property
    def communication_actions(self) -> tuple[str, ...]:
        return tuple(a for a, lab in self.actions.items() if lab.is_communication)

    # -- operations ----------------------------------------------------------

    def update_result(self, action: str, l: Element) -> Element:
        """h*_a(l): after action a, proposition l holds."""
        return self.after_map(action)(l)

    def kernel(self, action: str) -> KernelReport:
        """All l with h_a(l) = bottom; down-closed and join-closed."""
        h = self.update_map(action)
        bot = self.lattice.bottom
        computed = tuple(e for e in self.lattice.elements if h(e) == bot)
        declared = self.declared_kernels.get(action)
        misses = ()
        if declared is not None:
            inside = set(computed)
            misses = tuple(e for e in declared if e not in inside)
        return KernelReport(action, computed, declared, misses)

    def eventually(self, action_names, l: Element) -> Element:
        """Greatest-fixed-point meet of h*_alpha applied to l, where
        h_alpha is the pointwise join of the chosen updates."""
        names = tuple(dict.fromkeys(action_names))
        if not names:
            raise EmptyActionSet("eventually needs a nonempty action set")
        h = self.update_map(names[0])
        for name in names[1:]:
            h = maps.pointwise_join(h, self.update_map(name))
        hstar = maps.right_adjoint(h).right
        return maps.gfp_meet(hstar)(l)

    def fact_stability_report(self, strict: bool = False) -> FactStabilityReport:
        """Scan l <= phi implies h_a(l) <= phi for communication actions.

        strict also scans the converse and collects all counterexamples.
        """
        lat = self.lattice
        witness = None
        converse = []
        for name in self.communication_actions:
            h = self.update_map(name)
            for phi in self.facts:
                for l in lat.elements:
                    below, updated = lat.leq_(l, phi), lat.leq_(h(l), phi)
                    if below and not updated and witness is None:
                        witness = (name, phi, l)
                    if strict and updated and not below:
                        converse.append((name, phi, l))
        return FactStabilityReport(witness is None, witness, tuple(converse))

    def no_miracle_violations(self, full_lattice: bool = False):
        """Yield NoMiracleViolation instances (empty when the axiom holds)."""
        lat = self.lattice
        domain = lat.join_irreducibles() if not full_lattice else lat.elements
        for agent in self.mama.agents:
            f = self.mama.appearance_map(agent)
            for a in self.actions:
                h = self.update_map(a)
                h_seen = self.update_map(self.appeared_action(agent, a))
                for l in domain:
                    lhs = f(h(l))
                    rhs = h_seen(f(l))
                    if not lat.leq_(lhs, rhs):
                        yield NoMiracleViolation(agent, a, l, lhs, rhs)


def build_dynamic_algebra(
    mama: MAMA,
    actions,
    update_generators: dict[str, dict],
    action_appearance: dict[str, dict[str, str]] | None = None,
    facts=(),
    declared_kernels: dict[str, tuple[Element, ...]] | None = None,
    *,
    full_lattice_axioms: bool = False,
) -> DynamicAlgebra:
    """Build and validate a DynamicAlgebra.

    actions: iterable of ActionLabel (or names, treated as non-communication).
    update_generators: per action, join-irreducible -> Element images.
    action_appearance: per agent, action name -> action name; missing entries
    default to the action itself (a public action appears as it is).
    Raises NoMiracleViolation / FactStabilityViolation on the first breach.
    """
    labels = {}
    for a in actions:
        lab = a if isinstance(a, ActionLabel) else ActionLabel(str(a))
        if lab.name in labels:
            raise UnknownAction(f"duplicate action {lab.name!r}")
        labels[lab.name] = lab
    if set(update_generators) != set(labels):
        raise UnknownAction("update generators must cover exactly the declared actions")

    update = {
        name: maps.right_adjoint(maps.map_from_generators(mama.lattice, gens))
        for name, gens in update_generators.items()
    }

    appearance = {}
    given = action_appearance or {}
    for agent in mama.agents:
        row = dict(given.get(agent, {}))
        for name in labels:
            row.setdefault(name, name)
        for src, dst in row.items():
            if src not in labels or dst not in labels:
                raise UnknownAction(
                    f"action appearance for agent {agent!r} mentions unknown action"
                )
        appearance[agent] = row
    for agent in given:
        if agent not in mama.pairs:
            raise UnknownAgent(f"action appearance given for unknown agent {agent!r}")

    for phi in facts:
        mama.lattice.check(phi)

    alg = DynamicAlgebra(mama, labels, update, appearance, tuple(facts), declared_kernels)

    for violation in alg.no_miracle_violations(full_lattice=full_lattice_axioms):
        raise violation
    report = alg.fact_stability_report(strict=False)
    if not report.forward_ok:
        raise FactStabilityViolation(*report.forward_witness)
    return alg
