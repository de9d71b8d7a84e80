"""Orbit Cartan type stratification of the loop space of a linear action.

For a finite group G acting on V the loop space is the union of the sets
{h} x V^h.  In a discrete group the connected component of the simeq class
of h is {h} itself, so the germ at (h, x) globalizes to the piece
G.({h} x V_{=K}) where K = G_x: strata are indexed by conjugacy classes of
pairs (h, K) with K an isotropy group and h in K.  For the circle, points
with finite isotropy Z/m behave the same way, while over the fixed subspace
V^{S^1} the group part runs through the connected components (points and
open arcs) of the simeq classes of angles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd
from typing import Iterable, Sequence, Union

from ._parallel import pmap
from .arrangements import DEFAULT_POSET_CAP, count_regions
from .groups import (
    CircleWeightAction,
    FiniteMatrixGroup,
    Subgroup,
    normalize_angle,
)
from .linalg import RationalSubspace, contains_point, intersect


# ---------------------------------------------------------------------------
# small value types


@dataclass(frozen=True)
class CircleIsotropy:
    """A closed subgroup of S^1: Z/order, or the whole circle if order is None."""

    order: int | None

    @property
    def is_circle(self) -> bool:
        return self.order is None

    def contains(self, t) -> bool:
        if self.order is None:
            return True
        return (normalize_angle(t) * self.order).denominator == 1

    def elements(self) -> list[Fraction]:
        if self.order is None:
            raise ValueError("the circle has no finite element list")
        return [Fraction(a, self.order) for a in range(self.order)]

    def issubgroup(self, other: "CircleIsotropy") -> bool:
        if other.order is None:
            return True
        if self.order is None:
            return False
        return other.order % self.order == 0

    def label(self) -> str:
        return "S1" if self.order is None else f"Z/{self.order}"


@dataclass(frozen=True)
class Cell:
    """A connected piece of the circle R/Z: a point, an open arc, or all of it.

    Arcs are written (lo, hi) with 0 <= lo < hi <= 1 in lowest terms; the arc
    ending at 1 closes up at angle 0.
    """

    lo: Fraction
    hi: Fraction | None = None
    full: bool = False

    @property
    def is_point(self) -> bool:
        return self.hi is None and not self.full

    @property
    def dim(self) -> int:
        return 0 if self.is_point else 1

    def contains(self, t) -> bool:
        t = normalize_angle(t)
        if self.full:
            return True
        if self.hi is None:
            return t == self.lo
        return self.lo < t < self.hi

    def closure_contains(self, t) -> bool:
        t = normalize_angle(t)
        if self.full or self.contains(t):
            return True
        if self.hi is None:
            return False
        return t == self.lo or t == normalize_angle(self.hi)

    def in_closure_of(self, other: "Cell") -> bool:
        if other.full:
            return True
        if self.full:
            return False
        if self.is_point:
            return other.closure_contains(self.lo)
        return self == other

    def sample(self) -> Fraction:
        if self.full:
            return Fraction(1, 3)
        if self.hi is None:
            return self.lo
        return (self.lo + self.hi) / 2

    def label(self) -> str:
        if self.full:
            return "S1"
        if self.hi is None:
            return f"{{{self.lo}}}"
        return f"({self.lo},{self.hi})"


@dataclass(frozen=True, eq=False)
class IsotropyStratum:
    """Points of V whose isotropy group is exactly ``subgroup``.

    The set is ``fixed_space`` minus the union of ``excluded`` (the maximal
    fixed spaces of strictly larger isotropy groups).
    """

    subgroup: Union[Subgroup, CircleIsotropy]
    fixed_space: RationalSubspace
    excluded: tuple[RationalSubspace, ...]
    witness: tuple[Fraction, ...]

    @property
    def order(self) -> int | None:
        if isinstance(self.subgroup, CircleIsotropy):
            return self.subgroup.order
        return self.subgroup.order

    def contains_point(self, x: Sequence) -> bool:
        if not contains_point(self.fixed_space, x):
            return False
        return not any(contains_point(e, x) for e in self.excluded)

    @property
    def hyperplanes(self) -> list[RationalSubspace]:
        return [e for e in self.excluded if e.dim == self.fixed_space.dim - 1]

    def label(self) -> str:
        if isinstance(self.subgroup, CircleIsotropy):
            return self.subgroup.label()
        return f"order {self.subgroup.order}"


@dataclass(frozen=True, eq=False)
class Stratum:
    id: int
    group_part: Union[int, Fraction, Cell]
    isotropy: IsotropyStratum
    dim: int
    component_count: int | None
    witness: tuple
    lattice_index: int = 0
    conjugates: tuple[tuple[int, int], ...] = ()

    @property
    def is_cell(self) -> bool:
        return isinstance(self.group_part, Cell)

    def group_label(self) -> str:
        if isinstance(self.group_part, Cell):
            return self.group_part.label()
        if isinstance(self.group_part, Fraction):
            return f"angle {self.group_part}"
        return f"g{self.group_part}"


@dataclass(frozen=True)
class SimeqClass:
    members: tuple
    fixed_space: RationalSubspace
    components: tuple


@dataclass(frozen=True)
class SimeqPartition:
    carrier: Union[Subgroup, CircleIsotropy]
    classes: tuple[SimeqClass, ...]

    def class_of(self, t) -> SimeqClass:
        for c in self.classes:
            if isinstance(self.carrier, CircleIsotropy):
                if any(comp.contains(t) for comp in c.components):
                    return c
            elif t in c.members:
                return c
        raise KeyError(t)

    def component_of(self, t):
        c = self.class_of(t)
        for comp in c.components:
            if isinstance(comp, Cell):
                if comp.contains(t):
                    return comp
            elif t in comp:
                return comp
        raise KeyError(t)


@dataclass(eq=False)
class StratificationResult:
    action: Union[FiniteMatrixGroup, CircleWeightAction]
    lattice: list[IsotropyStratum]
    strata: list[Stratum]
    order: frozenset = frozenset()
    hasse: tuple[tuple[int, int], ...] = ()
    depth: tuple[int, ...] = ()

    def below(self, p: int, q: int) -> bool:
        """P <= Q: stratum p lies in the closure of stratum q."""
        return p == q or (p, q) in self.order

    @property
    def max_depth(self) -> int:
        return max(self.depth) if self.depth else 0

    @cached_property
    def lattice_index(self) -> dict:
        return {s.subgroup.members: i for i, s in enumerate(self.lattice) if isinstance(s.subgroup, Subgroup)}


# ---------------------------------------------------------------------------
# witnesses


def _grid_values(max_den: int = 7, max_num: int = 3) -> list[Fraction]:
    vals = set()
    for q in range(1, max_den + 1):
        for p in range(-max_num * q, max_num * q + 1):
            if p:
                vals.add(Fraction(p, q))
    return sorted(vals, key=lambda v: (v.denominator, abs(v), v < 0))


_GRID = _grid_values()


def find_witness(space: RationalSubspace, excluded: Sequence[RationalSubspace], budget: int = 20000) -> tuple[Fraction, ...]:
    """First grid point of ``space`` outside every excluded subspace.

    Basis coefficients run over rationals with denominators at most 7, in
    levels of increasing height.  If the budget runs out, integer points on
    the moment curve are tried; those are guaranteed to succeed because a
    proper subspace meets the curve in at most dim - 1 points.
    """
    d = space.dim
    if d == 0:
        if excluded:
            raise ValueError("empty piece: the zero space minus a subspace")
        return tuple(Fraction(0) for _ in range(space.ambient_dim))

    def ok(x):
        return not any(contains_point(e, x) for e in excluded)

    tried = 0
    for level in range(1, len(_GRID) + 1):
        top = _GRID[level - 1]
        for coeffs in product(_GRID[:level], repeat=d):
            if top not in coeffs:
                continue
            x = space.combine(coeffs)
            if ok(x):
                return x
            tried += 1
            if tried >= budget:
                break
        if tried >= budget:
            break
    t = 1
    while True:
        x = space.combine([Fraction(t) ** i for i in range(d)])
        if ok(x):
            return x
        t += 1


def _maximal_below(space: RationalSubspace, others: Iterable[RationalSubspace]) -> tuple[RationalSubspace, ...]:
    below = [o for o in others if o.dim < space.dim and o <= space]
    maximal = [o for o in below if not any(o.dim < p.dim and o <= p for p in below)]
    return tuple(sorted(maximal, key=lambda s: (-s.dim, s.basis)))


# ---------------------------------------------------------------------------
# isotropy lattice


def _close_under_intersection(spaces: Iterable[RationalSubspace]) -> set:
    found = set(spaces)
    layer = set(found)
    while layer:
        nxt = set()
        for a in layer:
            for b in list(found):
                c = intersect(a, b)
                if c not in found:
                    nxt.add(c)
        found |= nxt
        layer = nxt
    return found


def isotropy_lattice(action) -> list[IsotropyStratum]:
    """All isotropy groups realized by the action, with their fixed spaces.

    The fixed spaces V^g are closed under intersection; every member W of the
    resulting meet-semilattice is the fixed space of H(W) = {g : W in V^g},
    and H(W) is the isotropy group of the points of W off the smaller
    members.  Ordered by decreasing dimension, then increasing group order.
    """
    if isinstance(action, FiniteMatrixGroup):
        return _finite_lattice(action)
    if isinstance(action, CircleWeightAction):
        return _circle_lattice(action)
    raise TypeError(f"unsupported action {type(action).__name__}")


def _finite_lattice(group: FiniteMatrixGroup) -> list[IsotropyStratum]:
    spaces = _close_under_intersection(group.fixed_spaces)
    entries = []
    for w in spaces:
        members = tuple(g for g in range(group.order) if w <= group.fixed_spaces[g])
        entries.append((w, Subgroup(group, members)))
    entries.sort(key=lambda e: (-e[0].dim, e[1].order, e[1].members))
    all_spaces = [w for w, _ in entries]
    out = []
    for w, sub in entries:
        excl = _maximal_below(w, all_spaces)
        out.append(IsotropyStratum(sub, w, excl, find_witness(w, excl)))
    return out


def _circle_lattice(action: CircleWeightAction) -> list[IsotropyStratum]:
    r = len(action.weights)
    block_sets = {frozenset(range(r))}
    if r:
        block_sets.add(frozenset())
    for n in action.weights:
        for a in range(abs(n)):
            block_sets.add(frozenset(action.fixing_blocks(Fraction(a, abs(n)))))
    layer = set(block_sets)
    while layer:
        nxt = set()
        for a in layer:
            for b in list(block_sets):
                c = a & b
                if c not in block_sets:
                    nxt.add(c)
        block_sets |= nxt
        layer = nxt

    def iso(bs):
        if not bs:
            return CircleIsotropy(None)
        g = 0
        for j in bs:
            g = gcd(g, action.weights[j])
        return CircleIsotropy(abs(g))

    entries = [(action.block_space(sorted(bs)), iso(bs)) for bs in block_sets]
    big = 10 ** 9
    entries.sort(key=lambda e: (-e[0].dim, big if e[1].order is None else e[1].order))
    all_spaces = [w for w, _ in entries]
    out = []
    for w, sub in entries:
        excl = _maximal_below(w, all_spaces)
        out.append(IsotropyStratum(sub, w, excl, find_witness(w, excl)))
    return out


# ---------------------------------------------------------------------------
# simeq classes and t-bullet


def simeq_classes(carrier, action) -> SimeqPartition:
    """Partition the carrier by equality of fixed subspaces in V.

    ``carrier`` is a (cyclic) Subgroup of a finite group, or a
    CircleIsotropy for a circle action (the whole circle, or Z/m).
    """
    if isinstance(carrier, Subgroup):
        group = carrier.parent
        by_space: dict = {}
        for s in carrier.members:
            by_space.setdefault(group.fixed_spaces[s], []).append(s)
        classes = [
            SimeqClass(tuple(ms), w, tuple((m,) for m in ms))
            for w, ms in sorted(by_space.items(), key=lambda kv: kv[1][0])
        ]
        return SimeqPartition(carrier, tuple(classes))
    if isinstance(carrier, CircleIsotropy):
        return _circle_simeq(carrier, action)
    raise TypeError(f"unsupported carrier {type(carrier).__name__}")


def _circle_simeq(carrier: CircleIsotropy, action: CircleWeightAction) -> SimeqPartition:
    if carrier.order is not None:
        by_blocks: dict = {}
        for t in carrier.elements():
            by_blocks.setdefault(frozenset(action.fixing_blocks(t)), []).append(t)
        classes = [
            SimeqClass(tuple(ts), action.block_space(sorted(bs)), tuple(Cell(t) for t in ts))
            for bs, ts in sorted(by_blocks.items(), key=lambda kv: kv[1][0])
        ]
        return SimeqPartition(carrier, tuple(classes))
    if not action.weights:
        full = Cell(Fraction(0), None, True)
        return SimeqPartition(carrier, (SimeqClass((full,), action.block_space([]), (full,)),))
    special = sorted({Fraction(a, abs(n)) for n in action.weights for a in range(abs(n))})
    by_blocks = {}
    for t in special:
        by_blocks.setdefault(frozenset(action.fixing_blocks(t)), []).append(Cell(t))
    arcs = [Cell(a, b) for a, b in zip(special, special[1:] + [Fraction(1)])]
    classes = [
        SimeqClass(tuple(cells), action.block_space(sorted(bs)), tuple(cells))
        for bs, cells in sorted(by_blocks.items(), key=lambda kv: kv[1][0].lo)
    ]
    classes.append(SimeqClass(tuple(arcs), action.block_space([]), tuple(arcs)))
    return SimeqPartition(carrier, tuple(classes))


def t_bullet(carrier, t, action=None):
    """{s in carrier : V^t is contained in V^s}, a subgroup of the carrier."""
    if isinstance(carrier, Subgroup):
        group = carrier.parent
        vt = group.fixed_spaces[t]
        sub = Subgroup(group, tuple(s for s in carrier.members if vt <= group.fixed_spaces[s]))
        if not sub.is_closed():
            raise AssertionError("t-bullet is not a subgroup")
        return sub
    if isinstance(carrier, CircleIsotropy):
        blocks = action.fixing_blocks(t)
        if not blocks:
            found = CircleIsotropy(None)
        else:
            g = 0
            for j in blocks:
                g = gcd(g, action.weights[j])
            found = CircleIsotropy(abs(g))
        # intersect with the carrier
        if carrier.order is None:
            return found
        if found.order is None:
            return carrier
        return CircleIsotropy(gcd(found.order, carrier.order))
    raise TypeError(f"unsupported carrier {type(carrier).__name__}")


# ---------------------------------------------------------------------------
# components


def count_components(piece, cap: int = DEFAULT_POSET_CAP):
    """Connected components of V^K minus its excluded subspaces.

    Accepts a Stratum or an IsotropyStratum.  Subspaces of codimension two
    or more do not disconnect, so only the hyperplanes of V^K are counted,
    by Zaslavsky's formula.  Returns None ("unknown") past the poset cap.
    """
    iso = piece.isotropy if isinstance(piece, Stratum) else piece
    return count_regions(iso.fixed_space, iso.hyperplanes, cap)


# ---------------------------------------------------------------------------
# the loop space


def loop_strata(action, cap: int = DEFAULT_POSET_CAP) -> StratificationResult:
    """Strata of the loop space with closure order and depth filled in."""
    if isinstance(action, FiniteMatrixGroup):
        result = _finite_strata(action, cap)
    elif isinstance(action, CircleWeightAction):
        result = _circle_strata(action, cap)
    else:
        raise TypeError(f"unsupported action {type(action).__name__}")
    result.order, result.hasse = closure_order(result)
    result.depth = depth(result)
    return result


def _finite_strata(group: FiniteMatrixGroup, cap: int) -> StratificationResult:
    lattice = _finite_lattice(group)
    index = {e.subgroup.members: i for i, e in enumerate(lattice)}
    seen = set()
    orbits = []
    for ki, entry in enumerate(lattice):
        for h in entry.subgroup.members:
            if (h, ki) in seen:
                continue
            orbit = set()
            for g in range(group.order):
                kg = entry.subgroup.conjugate(g)
                orbit.add((group.conj(g, h), index[kg.members]))
            seen |= orbit
            rep = min(orbit, key=lambda p: (p[1], p[0]))
            orbits.append((rep, tuple(sorted(orbit, key=lambda p: (p[1], p[0])))))

    def sort_key(item):
        (h, ki), _ = item
        e = lattice[ki]
        return (-e.fixed_space.dim, e.order, ki, group.element_order(h), h)

    orbits.sort(key=sort_key)
    counts = pmap(lambda item: count_components(lattice[item[0][1]], cap), orbits)
    strata = []
    for sid, (((h, ki), conj), comps) in enumerate(zip(orbits, counts)):
        e = lattice[ki]
        strata.append(Stratum(sid, h, e, e.fixed_space.dim, comps, (h, e.witness), ki, conj))
    return StratificationResult(group, lattice, strata)


def _circle_strata(action: CircleWeightAction, cap: int) -> StratificationResult:
    lattice = _circle_lattice(action)
    items = []
    for ki, e in enumerate(lattice):
        if e.subgroup.order is not None:
            for t in e.subgroup.elements():
                items.append((t, ki, e.fixed_space.dim))
        else:
            part = simeq_classes(CircleIsotropy(None), action)
            cells = [c for cls in part.classes for c in cls.components]
            for c in cells:
                items.append((c, ki, e.fixed_space.dim + c.dim))
    big = 10 ** 9

    def sort_key(item):
        part, ki, d = item
        e = lattice[ki]
        gk = (part.lo, 1 if part.hi is None else 0, part.hi or 0) if isinstance(part, Cell) else (part, 0, 0)
        return (-d, big if e.order is None else e.order, gk)

    items.sort(key=sort_key)
    counts = pmap(lambda it: count_components(lattice[it[1]], cap), items)
    strata = []
    for sid, ((part, ki, d), comps) in enumerate(zip(items, counts)):
        e = lattice[ki]
        angle = part.sample() if isinstance(part, Cell) else part
        strata.append(Stratum(sid, part, e, d, comps, (angle, e.witness), ki))
    return StratificationResult(action, lattice, strata)


def closure_order(result: StratificationResult):
    """Strict frontier relation {(p, q) : P in closure(Q), P != Q} and its
    Hasse diagram (transitive reduction)."""
    strata = result.strata
    pairs = set()
    for p in strata:
        for q in strata:
            if p.id != q.id and _below(result, p, q):
                pairs.add((p.id, q.id))
    hasse = []
    for (a, b) in sorted(pairs):
        if not any((a, c) in pairs and (c, b) in pairs for c in range(len(strata))):
            hasse.append((a, b))
    return frozenset(pairs), tuple(hasse)


def _below(result: StratificationResult, p: Stratum, q: Stratum) -> bool:
    if isinstance(result.action, FiniteMatrixGroup):
        h_members = p.isotropy.subgroup.member_set
        for k, ki in q.conjugates:
            if k == p.group_part and result.lattice[ki].subgroup.member_set <= h_members:
                return True
        return False
    # circle
    pk, qk = p.isotropy.subgroup, q.isotropy.subgroup
    if pk.order is not None and qk.order is not None:
        return p.group_part == q.group_part and qk.issubgroup(pk)
    if pk.order is None and qk.order is not None:
        return p.group_part.is_point and p.group_part.lo == q.group_part
    if pk.order is not None and qk.order is None:
        return False
    return p.group_part.in_closure_of(q.group_part)


def depth(result: StratificationResult) -> tuple[int, ...]:
    """Length of the longest chain P = S_0 < S_1 < ... < S_k above each P."""
    above: dict[int, list[int]] = {s.id: [] for s in result.strata}
    for a, b in result.order:
        above[a].append(b)
    memo: dict[int, int] = {}

    def up(i):
        if i not in memo:
            memo[i] = max((1 + up(j) for j in above[i]), default=0)
        return memo[i]

    return tuple(up(s.id) for s in result.strata)


# ---------------------------------------------------------------------------
# inertia space


@dataclass(frozen=True)
class InertiaStratum:
    id: int
    source: int
    dim: int
    component_count: int | None


@dataclass(frozen=True)
class InertiaResult:
    strata: tuple[InertiaStratum, ...]
    order: frozenset
    hasse: tuple[tuple[int, int], ...]
    depth: tuple[int, ...]


def inertia_strata(result: StratificationResult, cap: int = DEFAULT_POSET_CAP) -> InertiaResult:
    """The strata pushed down to the inertia space (orbit space of the loop
    space under conjugation), with the inherited closure order."""
    out = []
    for s in result.strata:
        if isinstance(result.action, FiniteMatrixGroup):
            dim = s.dim
            comps = _quotient_components(result, s, cap)
        else:
            finite_iso = s.isotropy.order is not None
            dim = s.dim - 1 if finite_iso else s.dim
            comps = s.component_count
        out.append(InertiaStratum(s.id, s.id, dim, comps))
    return InertiaResult(tuple(out), result.order, result.hasse, result.depth)


def _quotient_components(result: StratificationResult, s: Stratum, cap: int):
    """Orbits of the stabilizer of (h, K) on the chambers of V_{=K}, by
    Burnside: a chamber is g-stable iff it meets V^g, and the g-stable
    chambers are the regions of the arrangement traced on V^K n V^g."""
    group = result.action
    h, k = s.group_part, s.isotropy.subgroup
    stab = [g for g in range(group.order)
            if group.conj(g, h) == h and k.conjugate(g).member_set == k.member_set]
    hyper = s.isotropy.hyperplanes
    total = 0
    for g in stab:
        w = intersect(s.isotropy.fixed_space, group.fixed_spaces[g])
        c = count_regions(w, hyper, cap)
        if c is None:
            return None
        total += c
    if total % len(stab):
        raise AssertionError("Burnside count is not an integer")
    return total // len(stab)


def stratum_of(result: StratificationResult, group_part, x: Sequence) -> list[int]:
    """Ids of all strata whose symbolic description contains (group_part, x)."""
    hits = []
    for s in result.strata:
        if _symbolic_contains(result, s, group_part, x):
            hits.append(s.id)
    return hits


def _symbolic_contains(result, s: Stratum, part, x) -> bool:
    if isinstance(result.action, FiniteMatrixGroup):
        for h, ki in s.conjugates:
            if h == part and result.lattice[ki].contains_point(x):
                return True
        return False
    if isinstance(s.group_part, Cell):
        if not s.group_part.contains(part):
            return False
    elif normalize_angle(part) != s.group_part:
        return False
    return s.isotropy.contains_point(x)
