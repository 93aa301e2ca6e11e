"""Finite complete lattices with precomputed order, join and meet tables.

A lattice is built once, validated eagerly (poset laws, existence of all
binary joins/meets, distributivity / Boolean classification) and is then
immutable: every downstream operation is a table lookup, which keeps the
exhaustive axiom checks elsewhere in the package cheap. Arrays are marked
read-only, so concurrent readers are safe.

The element cap defaults to 256 (a 2^16-cell order table) and can be raised
with the ADJOINT_KIT_MAX_LATTICE environment variable. The powerset builder
additionally refuses more than 16 worlds outright.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ForeignElement,
    LatticeTooLarge,
    NotALattice,
    NotAPoset,
    NotBoolean,
    NotDistributive,
    TooManyWorlds,
)

DEFAULT_MAX_ELEMENTS = 256
MAX_POWERSET_WORLDS = 16

_uid_counter = itertools.count(1)


def max_elements() -> int:
    """Element cap for new lattices; ADJOINT_KIT_MAX_LATTICE overrides."""
    raw = os.environ.get("ADJOINT_KIT_MAX_LATTICE")
    if raw is None:
        return DEFAULT_MAX_ELEMENTS
    try:
        value = int(raw)
    except ValueError:
        raise LatticeTooLarge(f"ADJOINT_KIT_MAX_LATTICE is not an integer: {raw!r}")
    if value < 1:
        raise LatticeTooLarge("ADJOINT_KIT_MAX_LATTICE must be positive")
    return value


@dataclass(frozen=True)
class Element:
    """A lattice element: a dense index plus a display name.

    Elements are only meaningful relative to the lattice that created them;
    the lattice uid makes cross-lattice mixups detectable.
    """

    index: int
    name: str
    lattice_uid: int

    def __repr__(self):
        return f"<{self.name}>"


class FiniteLattice:
    """A finite complete lattice over dense element indices 0..n-1.

    Exposes joins, meets, complements, Heyting implication and
    join-irreducibles. Instances are immutable after construction.
    """

    def __init__(self, names: Sequence[str], leq: np.ndarray, *, worlds=None):
        n = len(names)
        if n == 0:
            raise NotALattice("a lattice needs at least one element")
        if len(set(names)) != n:
            raise NotAPoset("element names must be distinct")
        cap = max_elements()
        if n > cap:
            raise LatticeTooLarge(f"{n} elements exceeds the cap of {cap}")
        leq = np.array(leq, dtype=bool)
        if leq.shape != (n, n):
            raise NotAPoset(f"order table must be {n}x{n}, got {leq.shape}")
        _check_poset(names, leq)

        self.uid = next(_uid_counter)
        self.elements: tuple[Element, ...] = tuple(
            Element(i, names[i], self.uid) for i in range(n)
        )
        self.n = n
        self.leq = leq
        self.leq.flags.writeable = False
        # worlds is set for powerset carriers: tuple of world labels, where
        # element index i is the bitmask of the subset it denotes.
        self.worlds = worlds

        self.join_table, self.meet_table = _bound_tables(names, leq, worlds)
        self.join_table.flags.writeable = False
        self.meet_table.flags.writeable = False

        bottom_idx = int(np.where(leq[:, :].all(axis=1))[0][0])
        top_idx = int(np.where(leq[:, :].all(axis=0))[0][0])
        self.bottom = self.elements[bottom_idx]
        self.top = self.elements[top_idx]

        self.is_distributive = self._check_distributive()
        self._complements = self._complement_table() if self.is_distributive else None
        self.is_boolean = (
            self._complements is not None and all(c is not None for c in self._complements)
        )
        self._irreducibles = self._compute_join_irreducibles()
        self.height = self._compute_height()

    # -- basic queries ---------------------------------------------------

    def check(self, x: Element) -> Element:
        """Ensure x belongs to this lattice; raise ForeignElement otherwise."""
        if not isinstance(x, Element) or x.lattice_uid != self.uid:
            raise ForeignElement(f"{x!r} does not belong to this lattice")
        return x

    def element(self, name: str) -> Element:
        try:
            return self._by_name[name]
        except AttributeError:
            self._by_name = {e.name: e for e in self.elements}
            return self.element(name)
        except KeyError:
            raise ForeignElement(f"no element named {name!r}")

    def leq_(self, a: Element, b: Element) -> bool:
        self.check(a), self.check(b)
        return bool(self.leq[a.index, b.index])

    def join2(self, a: Element, b: Element) -> Element:
        self.check(a), self.check(b)
        return self.elements[self.join_table[a.index, b.index]]

    def meet2(self, a: Element, b: Element) -> Element:
        self.check(a), self.check(b)
        return self.elements[self.meet_table[a.index, b.index]]

    def join(self, xs: Iterable[Element]) -> Element:
        """Least upper bound of a set; the empty join is bottom."""
        return reduce(self.join2, xs, self.bottom)

    def meet(self, xs: Iterable[Element]) -> Element:
        """Greatest lower bound of a set; the empty meet is top."""
        return reduce(self.meet2, xs, self.top)

    # -- classification-dependent operations ------------------------------

    def complement(self, a: Element) -> Element:
        if not self.is_boolean:
            raise NotBoolean("complement requires a Boolean lattice")
        self.check(a)
        return self.elements[self._complements[a.index]]

    def complement_table(self):
        """Per-element complement indices, or None when not Boolean."""
        if not self.is_boolean:
            return None
        return tuple(self._complements)

    def heyting_implication(self, a: Element, b: Element) -> Element:
        """Relative pseudo-complement: join of every x with x /\\ a <= b."""
        if not self.is_distributive:
            raise NotDistributive("Heyting implication needs a distributive lattice")
        self.check(a), self.check(b)
        meets = self.meet_table[:, a.index]
        below = np.where(self.leq[meets, b.index])[0]
        return self.join(self.elements[i] for i in below)

    def heyting_negation(self, a: Element) -> Element:
        return self.heyting_implication(a, self.bottom)

    def join_irreducibles(self) -> tuple[Element, ...]:
        """Nonbottom elements that are not joins of strictly smaller ones."""
        return self._irreducibles

    # -- powerset conveniences --------------------------------------------

    def subset(self, worlds: Iterable[str]) -> Element:
        """Element denoting a set of worlds (powerset carriers only)."""
        if self.worlds is None:
            raise ForeignElement("not a powerset lattice")
        mask = 0
        for w in worlds:
            try:
                mask |= 1 << self.worlds.index(w)
            except ValueError:
                raise ForeignElement(f"unknown world {w!r}")
        return self.elements[mask]

    def __repr__(self):
        kind = "boolean" if self.is_boolean else (
            "distributive" if self.is_distributive else "lattice"
        )
        return f"FiniteLattice(n={self.n}, {kind})"

    # -- construction-time analysis ---------------------------------------

    def _check_distributive(self) -> bool:
        jt, mt = self.join_table, self.meet_table
        for x in range(self.n):
            mx = mt[x]
            lhs = mx[jt]                       # x /\ (y \/ z)
            rhs = jt[np.ix_(mx, mx)]           # (x /\ y) \/ (x /\ z)
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def _complement_table(self):
        # In a distributive lattice complements are unique when they exist.
        bot, top = self.bottom.index, self.top.index
        comps = []
        for x in range(self.n):
            ys = np.where((self.meet_table[x] == bot) & (self.join_table[x] == top))[0]
            comps.append(int(ys[0]) if len(ys) else None)
        return comps

    def _compute_join_irreducibles(self):
        # In a finite lattice, x is join-irreducible iff the join of the
        # elements strictly below x is not x itself (and x != bottom).
        out = []
        for x in range(self.n):
            if x == self.bottom.index:
                continue
            below = [i for i in np.where(self.leq[:, x])[0] if i != x]
            acc = self.bottom.index
            for i in below:
                acc = self.join_table[acc, i]
            if acc != x:
                out.append(self.elements[x])
        return tuple(out)

    def _compute_height(self) -> int:
        # Longest chain length measured in covers, via DP in order of
        # how many elements sit below each element.
        order = sorted(range(self.n), key=lambda i: int(self.leq[:, i].sum()))
        depth = [0] * self.n
        for i in order:
            below = [j for j in np.where(self.leq[:, i])[0] if j != i]
            depth[i] = 1 + max((depth[j] for j in below), default=-1)
        return max(depth)


def _check_poset(names, leq):
    n = len(names)
    if not leq.diagonal().all():
        i = int(np.where(~leq.diagonal())[0][0])
        raise NotAPoset(f"order not reflexive at {names[i]!r}")
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = (int(k) for k in np.argwhere(both)[0])
        raise NotAPoset(f"antisymmetry violated between {names[i]!r} and {names[j]!r}")
    closure = (leq.astype(np.uint8) @ leq.astype(np.uint8)) > 0
    if (closure & ~leq).any():
        i, j = (int(k) for k in np.argwhere(closure & ~leq)[0])
        raise NotAPoset(f"order not transitive: missing {names[i]!r} <= {names[j]!r}")


def _bound_tables(names, leq, worlds):
    n = len(names)
    if worlds is not None:
        # Powerset fast path: the element index is the subset bitmask, so
        # join is bitwise or and meet is bitwise and.
        idx = np.arange(n)
        return (idx[:, None] | idx[None, :]), (idx[:, None] & idx[None, :])

    join = np.empty((n, n), dtype=np.intp)
    meet = np.empty((n, n), dtype=np.intp)
    for i in range(n):
        for j in range(i, n):
            ub = leq[i] & leq[j]
            cands = np.where(ub & (leq | ~ub[None, :]).all(axis=1))[0]
            if len(cands) != 1:
                raise NotALattice(
                    f"pair ({names[i]!r}, {names[j]!r}) has no join",
                    pair=(names[i], names[j]),
                )
            join[i, j] = join[j, i] = cands[0]

            lb = leq[:, i] & leq[:, j]
            cands = np.where(lb & (leq.T | ~lb[None, :]).all(axis=1))[0]
            if len(cands) != 1:
                raise NotALattice(
                    f"pair ({names[i]!r}, {names[j]!r}) has no meet",
                    pair=(names[i], names[j]),
                )
            meet[i, j] = meet[j, i] = cands[0]
    return join, meet


def build_from_order(labels: Sequence[str], leq_pairs: Iterable[tuple[str, str]]) -> FiniteLattice:
    """Build a lattice from labels and order pairs (closed reflexively and
    transitively). Raises NotAPoset / NotALattice with the offending data."""
    labels = list(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    if len(pos) != len(labels):
        raise NotAPoset("labels must be distinct")
    n = len(labels)
    leq = np.eye(n, dtype=bool)
    for a, b in leq_pairs:
        if a not in pos or b not in pos:
            raise ForeignElement(f"order pair ({a!r}, {b!r}) uses an unknown label")
        leq[pos[a], pos[b]] = True
    # reflexive-transitive closure by repeated squaring
    while True:
        closed = ((leq.astype(np.uint8) @ leq.astype(np.uint8)) > 0) | leq
        if np.array_equal(closed, leq):
            break
        leq = closed
    return FiniteLattice(labels, leq)


def powerset_lattice(worlds: Sequence[str]) -> FiniteLattice:
    """Boolean lattice of all subsets of the given worlds, ordered by
    inclusion. Element index i denotes the subset with bitmask i."""
    worlds = tuple(worlds)
    if len(set(worlds)) != len(worlds):
        raise NotAPoset("world labels must be distinct")
    if len(worlds) > MAX_POWERSET_WORLDS:
        raise TooManyWorlds(f"{len(worlds)} worlds exceeds the limit of {MAX_POWERSET_WORLDS}")
    n = 1 << len(worlds)
    cap = max_elements()
    if n > cap:
        raise LatticeTooLarge(
            f"powerset of {len(worlds)} worlds has {n} elements, over the cap of {cap}"
        )

    def name(mask):
        members = [worlds[k] for k in range(len(worlds)) if mask >> k & 1]
        return "{" + ",".join(members) + "}"

    names = [name(m) for m in range(n)]
    masks = np.arange(n)
    leq = (masks[:, None] & masks[None, :]) == masks[:, None]
    return FiniteLattice(names, leq, worlds=worlds)
