"""Endo-maps on a finite lattice, their Galois adjoints and fixed points.

A join-preserving f determines a meet-preserving right adjoint by
f*(b) = join of every b' with f(b') <= b, and a meet-preserving g a
join-preserving left adjoint by g*(b) = meet of every b' with b <= g(b').
Both are computed here by exactly that enumeration; the carrier is small
and the defining formula doubles as the specification.

Map flavor (join-preserving / meet-preserving / unclassified) is tracked
explicitly and operations demand the flavor they need, so misuse fails
loudly instead of silently producing junk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    InternalError,
    LatticeMismatch,
    NotBoolean,
    NotJoinPreserving,
    NotMeetPreserving,
)
from .lattice import Element, FiniteLattice

JOIN_PRESERVING = "join-preserving"
MEET_PRESERVING = "meet-preserving"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class PreservationViolation:
    """Witness that a map fails its claimed preservation law.

    pair is None when the violated law is the empty join/meet
    (f(bottom) != bottom, respectively g(top) != top).
    """

    pair: tuple[Element, Element] | None
    lhs: Element
    rhs: Element

    def describe(self) -> str:
        if self.pair is None:
            return f"empty case: image {self.lhs.name} should be {self.rhs.name}"
        a, b = self.pair
        return (
            f"at ({a.name}, {b.name}): map of bound is {self.lhs.name} "
            f"but bound of images is {self.rhs.name}"
        )


class LatticeMap:
    """A total endo-map given by its image table."""

    __slots__ = ("lattice", "table", "kind")

    def __init__(self, lattice: FiniteLattice, table, kind: str = UNCLASSIFIED):
        if kind not in (JOIN_PRESERVING, MEET_PRESERVING, UNCLASSIFIED):
            raise ValueError(f"unknown map kind {kind!r}")
        table = tuple(int(i) for i in table)
        if len(table) != lattice.n or not all(0 <= i < lattice.n for i in table):
            raise InternalError("image table does not match the lattice")
        self.lattice = lattice
        self.table = table
        self.kind = kind

    def __call__(self, x: Element) -> Element:
        self.lattice.check(x)
        return self.lattice.elements[self.table[x.index]]

    def __eq__(self, other):
        return (
            isinstance(other, LatticeMap)
            and self.lattice is other.lattice
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.lattice.uid, self.table))

    def __repr__(self):
        return f"LatticeMap({self.kind}, {list(self.table)})"

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.intp)


@dataclass(frozen=True)
class AdjointPair:
    """left -| right: left(b) <= b' iff b <= right(b'), all b, b'."""

    left: LatticeMap
    right: LatticeMap


def identity_map(lattice: FiniteLattice, kind: str = JOIN_PRESERVING) -> LatticeMap:
    return LatticeMap(lattice, range(lattice.n), kind)


def constant_map(lattice: FiniteLattice, value: Element, kind: str = UNCLASSIFIED) -> LatticeMap:
    lattice.check(value)
    return LatticeMap(lattice, [value.index] * lattice.n, kind)


def map_from_table(lattice: FiniteLattice, images: Iterable[Element], kind: str) -> LatticeMap:
    """Build a map from explicit images and validate the claimed flavor."""
    table = [lattice.check(x).index for x in images]
    m = LatticeMap(lattice, table, kind)
    if kind == JOIN_PRESERVING:
        v = validate_join_preserving(m)
        if v is not None:
            raise NotJoinPreserving(v.describe(), violation=v)
    elif kind == MEET_PRESERVING:
        v = validate_meet_preserving(m)
        if v is not None:
            raise NotMeetPreserving(v.describe(), violation=v)
    return m


def map_from_generators(lattice: FiniteLattice, assignments: dict) -> LatticeMap:
    """Join-preserving map from images of the join-irreducibles.

    f(x) is the join of the assigned images of all irreducibles below x.
    On distributive carriers every assignment extends (irreducibles are
    join-prime there); on non-distributive ones an assignment can fail to
    extend, so the result is validated and NotJoinPreserving raised with
    the witnessing pair.
    """
    from .errors import MissingGenerator

    irr = lattice.join_irreducibles()
    given = set()
    for k in assignments:
        lattice.check(k)
        given.add(k.index)
    needed = {e.index for e in irr}
    if given != needed:
        missing = [lattice.elements[i].name for i in sorted(needed - given)]
        extra = [lattice.elements[i].name for i in sorted(given - needed)]
        parts = []
        if missing:
            parts.append(f"missing generators: {', '.join(missing)}")
        if extra:
            parts.append(f"not join-irreducible: {', '.join(extra)}")
        raise MissingGenerator("; ".join(parts))

    images = {k.index: lattice.check(v).index for k, v in assignments.items()}
    table = []
    for x in range(lattice.n):
        acc = lattice.bottom.index
        for j in needed:
            if lattice.leq[j, x]:
                acc = lattice.join_table[acc, images[j]]
        table.append(acc)
    m = LatticeMap(lattice, table, JOIN_PRESERVING)
    if not lattice.is_distributive:
        violation = validate_join_preserving(m)
        if violation is not None:
            raise NotJoinPreserving(
                "assignments do not extend to a join-preserving map; "
                + violation.describe(),
                violation=violation,
            )
    return m


def validate_join_preserving(m: LatticeMap) -> PreservationViolation | None:
    """None if f(bottom)=bottom and f(a \\/ b) = f(a) \\/ f(b) for all pairs.

    On a finite lattice this implies preservation of arbitrary joins.
    """
    lat = m.lattice
    t = m.as_array()
    if m.table[lat.bottom.index] != lat.bottom.index:
        return PreservationViolation(None, m(lat.bottom), lat.bottom)
    lhs = t[lat.join_table]                 # f(a \/ b)
    rhs = lat.join_table[np.ix_(t, t)]      # f(a) \/ f(b)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b = (int(k) for k in bad[0])
        return PreservationViolation(
            (lat.elements[a], lat.elements[b]),
            lat.elements[int(lhs[a, b])],
            lat.elements[int(rhs[a, b])],
        )
    return None


def validate_meet_preserving(m: LatticeMap) -> PreservationViolation | None:
    lat = m.lattice
    t = m.as_array()
    if m.table[lat.top.index] != lat.top.index:
        return PreservationViolation(None, m(lat.top), lat.top)
    lhs = t[lat.meet_table]
    rhs = lat.meet_table[np.ix_(t, t)]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b = (int(k) for k in bad[0])
        return PreservationViolation(
            (lat.elements[a], lat.elements[b]),
            lat.elements[int(lhs[a, b])],
            lat.elements[int(rhs[a, b])],
        )
    return None


def right_adjoint(f: LatticeMap) -> AdjointPair:
    """Compute f* with f*(b) = join of all b' such that f(b') <= b."""
    if f.kind != JOIN_PRESERVING:
        raise NotJoinPreserving("right_adjoint needs a join-preserving map")
    lat = f.lattice
    t = f.as_array()
    table = []
    for b in range(lat.n):
        acc = lat.bottom.index
        for bp in np.where(lat.leq[t, b])[0]:
            acc = lat.join_table[acc, bp]
        table.append(acc)
    fstar = LatticeMap(lat, table, MEET_PRESERVING)
    return AdjointPair(left=f, right=fstar)


def left_adjoint(g: LatticeMap) -> AdjointPair:
    """Compute g* with g*(b) = meet of all b' such that b <= g(b')."""
    if g.kind != MEET_PRESERVING:
        raise NotMeetPreserving("left_adjoint needs a meet-preserving map")
    lat = g.lattice
    t = g.as_array()
    table = []
    for b in range(lat.n):
        acc = lat.top.index
        for bp in np.where(lat.leq[b, t])[0]:
            acc = lat.meet_table[acc, bp]
        table.append(acc)
    gstar = LatticeMap(lat, table, JOIN_PRESERVING)
    return AdjointPair(left=gstar, right=g)


def de_morgan_dual(f: LatticeMap) -> LatticeMap:
    """g(b) = not f(not b); needs a Boolean carrier."""
    lat = f.lattice
    if not lat.is_boolean:
        raise NotBoolean("de Morgan dual needs a Boolean lattice")
    comp = np.array(lat.complement_table(), dtype=np.intp)
    t = f.as_array()
    table = comp[t[comp]]
    flip = {JOIN_PRESERVING: MEET_PRESERVING, MEET_PRESERVING: JOIN_PRESERVING}
    return LatticeMap(lat, table, flip.get(f.kind, UNCLASSIFIED))


def verify_adjunction(f: LatticeMap, g: LatticeMap) -> tuple[Element, Element] | None:
    """Exhaustively check f(b) <= b' iff b <= g(b'); return first violation."""
    if f.lattice is not g.lattice:
        raise LatticeMismatch("adjunction candidates live on different lattices")
    lat = f.lattice
    lhs = lat.leq[f.as_array(), :]          # f(b) <= b'
    rhs = lat.leq[:, g.as_array()]          # b <= g(b')
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        b, bp = (int(k) for k in bad[0])
        return lat.elements[b], lat.elements[bp]
    return None


def _require_same(f: LatticeMap, g: LatticeMap):
    if f.lattice is not g.lattice:
        raise LatticeMismatch("maps live on different lattices")


def compose(f: LatticeMap, g: LatticeMap) -> LatticeMap:
    """(f o g)(x) = f(g(x)); flavor survives when both sides share it."""
    _require_same(f, g)
    table = tuple(f.table[i] for i in g.table)
    kind = f.kind if f.kind == g.kind and f.kind != UNCLASSIFIED else UNCLASSIFIED
    return LatticeMap(f.lattice, table, kind)


def pointwise_join(f: LatticeMap, g: LatticeMap) -> LatticeMap:
    _require_same(f, g)
    lat = f.lattice
    table = lat.join_table[f.as_array(), g.as_array()]
    kind = JOIN_PRESERVING if f.kind == g.kind == JOIN_PRESERVING else UNCLASSIFIED
    return LatticeMap(lat, table, kind)


def pointwise_meet(f: LatticeMap, g: LatticeMap) -> LatticeMap:
    _require_same(f, g)
    lat = f.lattice
    table = lat.meet_table[f.as_array(), g.as_array()]
    kind = MEET_PRESERVING if f.kind == g.kind == MEET_PRESERVING else UNCLASSIFIED
    return LatticeMap(lat, table, kind)


def power(f: LatticeMap, i: int) -> LatticeMap:
    """i-fold self-composition; f^0 is the identity."""
    if i < 0:
        raise ValueError("power wants i >= 0")
    acc = identity_map(f.lattice, f.kind)
    for _ in range(i):
        acc = compose(f, acc)
    return acc


def _iterate(start: LatticeMap, step, cap: int) -> LatticeMap:
    cur = start
    for _ in range(cap + 1):
        nxt = step(cur)
        if nxt.table == cur.table:
            return cur
        cur = nxt
    raise InternalError("fixed-point iteration failed to stabilize within the cap")


def lfp_join(f: LatticeMap) -> LatticeMap:
    """Stabilized join of the powers f, f^2, ...: F1 = f, F(k+1) = f \\/ f o Fk.

    Each point moves up a chain of length at most height(L), so the hard cap
    n * height can only trip on an internal bug.
    """
    if f.kind != JOIN_PRESERVING:
        raise NotJoinPreserving("lfp_join needs a join-preserving map")
    cap = f.lattice.n * max(f.lattice.height, 1)
    return _iterate(f, lambda cur: pointwise_join(f, compose(f, cur)), cap)


def gfp_meet(g: LatticeMap) -> LatticeMap:
    """Stabilized meet of the powers g, g^2, ...: G1 = g, G(k+1) = g /\\ g o Gk."""
    if g.kind != MEET_PRESERVING:
        raise NotMeetPreserving("gfp_meet needs a meet-preserving map")
    cap = g.lattice.n * max(g.lattice.height, 1)
    return _iterate(g, lambda cur: pointwise_meet(g, compose(g, cur)), cap)


def lfp_join_reflexive(f: LatticeMap) -> LatticeMap:
    """Same as lfp_join but the power range starts at 0 (joins the identity)."""
    return pointwise_join(identity_map(f.lattice, JOIN_PRESERVING), lfp_join(f))


def gfp_meet_reflexive(g: LatticeMap) -> LatticeMap:
    """Same as gfp_meet but the power range starts at 0 (meets the identity)."""
    return pointwise_meet(identity_map(g.lattice, MEET_PRESERVING), gfp_meet(g))


def check_demorgan_lift(f: LatticeMap) -> Element | None:
    """On a Boolean carrier, check f*(b) = not g*(not b) for all b, where
    g is the de Morgan dual of f. Returns the first failing b, else None."""
    lat = f.lattice
    if not lat.is_boolean:
        raise NotBoolean("the de Morgan lift check needs a Boolean lattice")
    fstar = right_adjoint(f).right
    g = de_morgan_dual(f)
    gstar = left_adjoint(g).left
    comp = np.array(lat.complement_table(), dtype=np.intp)
    lifted = comp[gstar.as_array()[comp]]   # not g*(not b)
    bad = np.where(fstar.as_array() != lifted)[0]
    if len(bad):
        return lat.elements[int(bad[0])]
    return None
