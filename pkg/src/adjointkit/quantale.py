"""Bounded action quantale and the two-sorted epistemic-system view.

The quantale is a truncation of the powerset of the free monoid on the
action labels: elements are finite sets of words of length at most a fixed
bound, join is union, composition is pairwise concatenation, the unit is
the singleton empty word. Compositions that would leave the carrier raise
WordLengthExceeded; nothing is silently truncated.

Agent appearance lifts to words letterwise and to sets pointwise, which
makes every lift join-preserving by construction. The law checks therefore
run at word granularity (plus a canonical family of unions): for
join-preserving lifts and a join-preserving action, word coverage implies
the general laws, and enumerating the full powerset carrier would be
hopeless already at two generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import GeneratorMismatch, UnknownAction, WordLengthExceeded
from .dynamics import DynamicAlgebra
from .lattice import Element
from . import maps

Word = tuple[str, ...]
QElement = frozenset  # frozenset[Word]


def fmt_word(w: Word) -> str:
    return "<" + ".".join(w) + ">" if w else "1"


def fmt_q(q: QElement) -> str:
    if not q:
        return "0"
    return "{" + ", ".join(fmt_word(w) for w in sorted(q)) + "}"


class ActionQuantale:
    """Sets of bounded-length words over the generator actions."""

    def __init__(self, generators, max_word_length: int = 3):
        gens = tuple(dict.fromkeys(generators))
        if not gens:
            raise UnknownAction("a quantale needs at least one generator action")
        if max_word_length < 1:
            raise WordLengthExceeded("max_word_length must be at least 1")
        self.generators = gens
        self.max_word_length = max_word_length

    @property
    def unit(self) -> QElement:
        return frozenset({()})

    @property
    def bottom(self) -> QElement:
        return frozenset()

    def words(self) -> tuple[Word, ...]:
        """Every word of length <= the bound, shortest first."""
        out = [()]
        for k in range(1, self.max_word_length + 1):
            out.extend(product(self.generators, repeat=k))
        return tuple(out)

    def element(self, words) -> QElement:
        out = set()
        for w in words:
            w = tuple(w)
            if len(w) > self.max_word_length:
                raise WordLengthExceeded(f"word {fmt_word(w)} exceeds bound {self.max_word_length}")
            for letter in w:
                if letter not in self.generators:
                    raise UnknownAction(f"unknown action {letter!r} in word")
            out.add(w)
        return frozenset(out)

    def singleton(self, *letters: str) -> QElement:
        return self.element([letters])

    def join(self, *qs: QElement) -> QElement:
        return frozenset().union(*qs)

    def compose(self, p: QElement, q: QElement) -> QElement:
        """Pairwise concatenation; errors if any result leaves the carrier."""
        out = set()
        for w, v in product(p, q):
            if len(w) + len(v) > self.max_word_length:
                raise WordLengthExceeded(
                    f"{fmt_word(w)} . {fmt_word(v)} exceeds bound {self.max_word_length}"
                )
            out.add(w + v)
        return frozenset(out)

    def leq(self, p: QElement, q: QElement) -> bool:
        return p <= q


@dataclass(frozen=True)
class QuantaleLift:
    """An agent's appearance on the quantale, given by word images.

    The full map is the pointwise (union) extension of word_images, hence
    join-preserving by construction; word_images may send a word anywhere,
    which is how non-letterwise lifts (paranoid variants) are expressed.
    """

    quantale: ActionQuantale
    word_images: dict  # Word -> QElement

    def apply(self, q: QElement) -> QElement:
        return frozenset().union(*(self.word_images[w] for w in q))


def lift_action_appearance(alg: DynamicAlgebra, q: ActionQuantale) -> dict[str, QuantaleLift]:
    """Letterwise lift of each agent's f'_A to words, pointwise to sets."""
    if set(q.generators) != set(alg.actions):
        raise GeneratorMismatch("quantale generators must coincide with the algebra's actions")
    lifts = {}
    for agent in alg.mama.agents:
        images = {}
        for w in q.words():
            images[w] = frozenset({tuple(alg.appeared_action(agent, a) for a in w)})
        lifts[agent] = QuantaleLift(q, images)
    return lifts


@dataclass(frozen=True)
class LawCheck:
    name: str
    ok: bool
    witness: str | None = None


@dataclass(frozen=True)
class QuantaleReport:
    checks: tuple[LawCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> tuple[LawCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)


def _canonical_unions(q: ActionQuantale):
    """Small deterministic family of non-singleton elements for union laws."""
    words = q.words()
    fam = [q.bottom, q.unit, frozenset(words)]
    for i in range(len(words) - 1):
        fam.append(frozenset({words[i], words[i + 1]}))
    return fam


def check_quantale_laws(q: ActionQuantale) -> QuantaleReport:
    """Associativity, unit laws and distribution of composition over union,
    verified on all word triples within the bound and the canonical unions."""
    checks = []

    wit = None
    for w, v, u in product(q.words(), repeat=3):
        if len(w) + len(v) + len(u) > q.max_word_length:
            continue
        a, b, c = (frozenset({x}) for x in (w, v, u))
        if q.compose(q.compose(a, b), c) != q.compose(a, q.compose(b, c)):
            wit = f"({fmt_word(w)}, {fmt_word(v)}, {fmt_word(u)})"
            break
    checks.append(LawCheck("compose-associative", wit is None, wit))

    wit = None
    for p in _canonical_unions(q):
        if q.compose(q.unit, p) != p or q.compose(p, q.unit) != p:
            wit = fmt_q(p)
            break
    checks.append(LawCheck("unit-law", wit is None, wit))

    wit = None
    for p in _canonical_unions(q):
        longest = max((len(w) for w in p), default=0)
        for v in q.words():
            if longest + len(v) > q.max_word_length:
                continue
            s = frozenset({v})
            lhs = q.compose(s, p)
            rhs = q.join(*(q.compose(s, frozenset({w})) for w in p)) if p else q.bottom
            if lhs != rhs:
                wit = f"{fmt_q(s)} . {fmt_q(p)}"
                break
        if wit:
            break
    checks.append(LawCheck("compose-distributes-over-union", wit is None, wit))

    return QuantaleReport(tuple(checks))


def check_epistemic_quantale(
    q: ActionQuantale,
    lifts: dict[str, QuantaleLift],
    non_paranoid: bool = False,
) -> QuantaleReport:
    """Epistemic-quantale laws for every agent lift.

    Default mode checks the optimistically paranoid laws: 1 <= f'_A(1) and
    lax composition f'_A(w.v) <= f'_A(w) . f'_A(v). non_paranoid instead
    demands the equalities. Join preservation of the pointwise extension is
    asserted on the canonical union family. Word pairs whose right-hand
    composition would leave the bounded carrier are skipped (letterwise
    lifts are length-preserving, so nothing is skipped for them).
    """
    checks = list(check_quantale_laws(q).checks)
    for agent, lift in lifts.items():
        wit = None
        for p in _canonical_unions(q):
            parts = [lift.apply(frozenset({w})) for w in p]
            if lift.apply(p) != frozenset().union(*parts):
                wit = fmt_q(p)
                break
        checks.append(LawCheck(f"lift-join-preserving[{agent}]", wit is None, wit))

        unit_img = lift.apply(q.unit)
        if non_paranoid:
            ok = unit_img == q.unit
        else:
            ok = q.unit <= unit_img
        checks.append(
            LawCheck(
                f"unit-{'equality' if non_paranoid else 'inclusion'}[{agent}]",
                ok,
                None if ok else f"f'({fmt_q(q.unit)}) = {fmt_q(unit_img)}",
            )
        )

        wit = None
        for w, v in product(q.words(), repeat=2):
            if len(w) + len(v) > q.max_word_length:
                continue
            lhs = lift.apply(frozenset({w + v}))
            try:
                rhs = q.compose(lift.apply(frozenset({w})), lift.apply(frozenset({v})))
            except WordLengthExceeded:
                continue
            ok = lhs == rhs if non_paranoid else lhs <= rhs
            if not ok:
                wit = f"f'({fmt_word(w)} . {fmt_word(v)}) = {fmt_q(lhs)} vs {fmt_q(rhs)}"
                break
        checks.append(
            LawCheck(
                f"compose-{'equality' if non_paranoid else 'lax'}[{agent}]",
                wit is None,
                wit,
            )
        )
    return QuantaleReport(tuple(checks))


class EpistemicSystemView:
    """The two-sorted presentation: act(l, q) joins, over the words in q,
    the sequential application of the letters' update maps."""

    def __init__(self, alg: DynamicAlgebra, q: ActionQuantale,
                 lifts: dict[str, QuantaleLift] | None = None,
                 word_maps: dict | None = None):
        if set(q.generators) != set(alg.actions):
            raise GeneratorMismatch("quantale generators must coincide with the algebra's actions")
        self.algebra = alg
        self.quantale = q
        self.lifts = lifts if lifts is not None else lift_action_appearance(alg, q)
        if word_maps is None:
            word_maps = {}
            for w in q.words():
                m = maps.identity_map(alg.lattice, maps.JOIN_PRESERVING)
                for letter in w:
                    m = maps.compose(alg.update_map(letter), m)
                word_maps[w] = m
        self.word_maps = dict(word_maps)

    @property
    def lattice(self):
        return self.algebra.lattice

    def act(self, l: Element, q: QElement) -> Element:
        """h(l, q); the empty set of words acts as bottom."""
        return self.lattice.join(self.word_maps[w](l) for w in q)


def indexed_to_binary(alg: DynamicAlgebra, q: ActionQuantale) -> EpistemicSystemView:
    """Present the indexed update family as a binary action of the quantale."""
    return EpistemicSystemView(alg, q)


def binary_to_indexed(view: EpistemicSystemView) -> DynamicAlgebra:
    """Recover the indexed family from the binary action on generators.

    Returns a fresh DynamicAlgebra sharing the view's MAMA and metadata;
    round-tripping agrees with the original on every generator action.
    """
    alg = view.algebra
    lat = alg.lattice
    update = {}
    for name in alg.actions:
        table = [view.act(e, view.quantale.singleton(name)).index for e in lat.elements]
        h = maps.map_from_table(lat, [lat.elements[i] for i in table], maps.JOIN_PRESERVING)
        update[name] = maps.right_adjoint(h)
    return DynamicAlgebra(
        alg.mama, alg.actions, update, alg.action_appearance, alg.facts,
        alg.declared_kernels,
    )


def check_epistemic_system(view: EpistemicSystemView, non_paranoid: bool = False) -> QuantaleReport:
    """Module laws of the epistemic system plus the underlying axioms.

    Checks h(l, 1) = l, the join law in both arguments, the composition law
    h(l, w.v) = h(h(l, w), v) on all composable word pairs, the lifted
    no-miracle inequality f_A h(l, w) <= h(f_A(l), f'_A(w)), and folds in
    the epistemic-quantale report. A full pass certifies the pair.
    """
    alg, q, lat = view.algebra, view.quantale, view.lattice
    checks = list(check_epistemic_quantale(q, view.lifts, non_paranoid).checks)

    wit = None
    for e in lat.elements:
        if view.act(e, q.unit) != e:
            wit = e.name
            break
    checks.append(LawCheck("act-unit", wit is None, wit))

    wit = None
    elements_sample = _canonical_unions(q)
    for e in lat.elements:
        if view.act(e, q.bottom) != lat.bottom:
            wit = f"h({e.name}, 0)"
            break
        for p in elements_sample:
            parts = [view.act(e, frozenset({w})) for w in p]
            if view.act(e, p) != lat.join(parts):
                wit = f"h({e.name}, {fmt_q(p)})"
                break
        if wit:
            break
    checks.append(LawCheck("act-join-law", wit is None, wit))

    wit = None
    for w, v in product(q.words(), repeat=2):
        if len(w) + len(v) > q.max_word_length:
            continue
        for e in lat.elements:
            step = view.act(view.act(e, frozenset({w})), frozenset({v}))
            direct = view.act(e, frozenset({w + v}))
            if step != direct:
                wit = f"h({e.name}, {fmt_word(w)}.{fmt_word(v)})"
                break
        if wit:
            break
    checks.append(LawCheck("act-composition", wit is None, wit))

    wit = None
    for agent in alg.mama.agents:
        f = alg.mama.appearance_map(agent)
        lift = view.lifts[agent]
        for w in q.words():
            seen = lift.apply(frozenset({w}))
            for e in lat.elements:
                lhs = f(view.act(e, frozenset({w})))
                rhs = view.act(f(e), seen)
                ok = lhs == rhs if non_paranoid else lat.leq_(lhs, rhs)
                if not ok:
                    wit = f"agent {agent}, word {fmt_word(w)}, at {e.name}"
                    break
            if wit:
                break
        if wit:
            break
    checks.append(LawCheck("lifted-no-miracle", wit is None, wit))

    return QuantaleReport(tuple(checks))
