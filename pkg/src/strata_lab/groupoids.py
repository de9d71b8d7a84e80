"""Finite groupoids given by explicit tables.

Objects are 0..n-1 and arrows 0..m-1.  Composition follows the usual
convention: mul[(g, h)] is "g after h" and is defined exactly when
src[g] == tgt[h].  On finite discrete spaces the topological conditions
(openness, submersions) hold vacuously, so only the algebra is checked.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence


@dataclass(frozen=True)
class FiniteGroupoid:
    n_objects: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    unit: tuple[int, ...]
    inv: tuple[int, ...]
    mul: dict = field(hash=False, compare=False)
    labels: tuple = field(default=(), hash=False, compare=False)

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    def hom(self, x: int, y: int) -> list[int]:
        """Arrows from x to y."""
        return [a for a in range(self.n_arrows) if self.src[a] == x and self.tgt[a] == y]

    def isotropy(self, x: int) -> list[int]:
        return self.hom(x, x)


@dataclass(frozen=True)
class GroupoidMorphism:
    source: FiniteGroupoid
    target: FiniteGroupoid
    object_map: tuple[int, ...]
    arrow_map: tuple[int, ...]


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate(g: FiniteGroupoid, limit: int = 50) -> ValidationReport:
    """Check every groupoid axiom by enumeration; list each violation."""
    out: list[str] = []
    m, n = g.n_arrows, g.n_objects

    def add(msg):
        if len(out) < limit:
            out.append(msg)

    for name, table, size, rng in (("src", g.src, m, n), ("tgt", g.tgt, m, n),
                                   ("unit", g.unit, n, m), ("inv", g.inv, m, m)):
        if len(table) != size:
            add(f"{name} table has {len(table)} entries, expected {size}")
            return ValidationReport(out)
        for i, v in enumerate(table):
            if not 0 <= v < rng:
                add(f"{name}[{i}] = {v} out of range")
    if out:
        return ValidationReport(out)
    for x in range(n):
        u = g.unit[x]
        if g.src[u] != x or g.tgt[u] != x:
            add(f"unit of object {x} is not a loop at {x}")
    for a, b in g.mul:
        if g.src[a] != g.tgt[b]:
            add(f"mul defined on non-composable pair ({a}, {b})")
    for a, b in product(range(m), repeat=2):
        if g.src[a] == g.tgt[b]:
            c = g.mul.get((a, b))
            if c is None:
                add(f"mul missing on composable pair ({a}, {b})")
            elif not 0 <= c < m:
                add(f"mul({a}, {b}) = {c} out of range")
            elif g.src[c] != g.src[b] or g.tgt[c] != g.tgt[a]:
                add(f"mul({a}, {b}) has wrong source or target")
    if out:
        return ValidationReport(out)
    for a in range(m):
        if g.mul[(a, g.unit[g.src[a]])] != a or g.mul[(g.unit[g.tgt[a]], a)] != a:
            add(f"unit law fails for arrow {a}")
        i = g.inv[a]
        if g.src[i] != g.tgt[a] or g.tgt[i] != g.src[a]:
            add(f"inverse of arrow {a} has wrong source or target")
            continue
        if g.mul[(i, a)] != g.unit[g.src[a]] or g.mul[(a, i)] != g.unit[g.tgt[a]]:
            add(f"inverse law fails for arrow {a}")
    for a, b in g.mul:
        for c in range(m):
            if g.src[b] == g.tgt[c]:
                if g.mul[(g.mul[(a, b)], c)] != g.mul[(a, g.mul[(b, c)])]:
                    add(f"associativity fails for triple ({a}, {b}, {c})")
    return ValidationReport(out)


def validate_morphism(f: GroupoidMorphism) -> ValidationReport:
    s, t = f.source, f.target
    out = []
    for a in range(s.n_arrows):
        fa = f.arrow_map[a]
        if t.src[fa] != f.object_map[s.src[a]] or t.tgt[fa] != f.object_map[s.tgt[a]]:
            out.append(f"arrow {a}: source/target not preserved")
        if f.arrow_map[s.inv[a]] != t.inv[fa]:
            out.append(f"arrow {a}: inverse not preserved")
    for x in range(s.n_objects):
        if f.arrow_map[s.unit[x]] != t.unit[f.object_map[x]]:
            out.append(f"object {x}: unit not preserved")
    for (a, b), c in s.mul.items():
        if t.mul.get((f.arrow_map[a], f.arrow_map[b])) != f.arrow_map[c]:
            out.append(f"composition of ({a}, {b}) not preserved")
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# constructions


def _from_arrows(objects: int, arrows: list[tuple], src, tgt, compose, identity, inverse) -> FiniteGroupoid:
    """Build tables from hashable arrow descriptions and their operations."""
    index = {a: i for i, a in enumerate(arrows)}
    s = tuple(src(a) for a in arrows)
    t = tuple(tgt(a) for a in arrows)
    unit = tuple(index[identity(x)] for x in range(objects))
    inv = tuple(index[inverse(a)] for a in arrows)
    by_src: dict[int, list[int]] = {}
    for i, a in enumerate(arrows):
        by_src.setdefault(s[i], []).append(i)
    mul = {}
    for j, b in enumerate(arrows):
        for i in by_src.get(t[j], []):
            mul[(i, j)] = index[compose(arrows[i], b)]
    return FiniteGroupoid(objects, s, t, unit, inv, mul, tuple(arrows))


@dataclass(frozen=True)
class FiniteGroupTable:
    """A finite group as a multiplication table on 0..n-1 (0 need not be e)."""

    mul: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def identity(self) -> int:
        for e in range(self.order):
            if all(self.mul[e][g] == g for g in range(self.order)):
                return e
        raise ValueError("no identity element")

    def inverse(self, g: int) -> int:
        e = self.identity
        for h in range(self.order):
            if self.mul[g][h] == e:
                return h
        raise ValueError(f"element {g} has no inverse")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroupTable":
        return cls(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))

    @classmethod
    def from_matrix_group(cls, group) -> "FiniteGroupTable":
        return cls(tuple(tuple(row) for row in group.mul_table))

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroupTable":
        from itertools import permutations

        perms = sorted(permutations(range(n)))
        idx = {p: i for i, p in enumerate(perms)}
        return cls(tuple(tuple(idx[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms))


def one_object(group: FiniteGroupTable) -> FiniteGroupoid:
    """A group as a groupoid with a single object."""
    return translation_groupoid(group, [tuple(0 for _ in range(group.order))])


def translation_groupoid(group: FiniteGroupTable, action: Sequence[Sequence[int]] | None = None) -> FiniteGroupoid:
    """G x X with s(g, x) = x and t(g, x) = g.x.

    ``action[x][g]`` is g.x, given as a table indexed by point then element.
    """
    if action is None:
        action = [[0] * group.order]
    x_count = len(action)
    e = group.identity
    for x in range(x_count):
        if len(action[x]) != group.order:
            raise ValueError(f"action row {x} has wrong length")
        if action[x][e] != x:
            raise ValueError(f"identity moves point {x}")
        for g in range(group.order):
            if not 0 <= action[x][g] < x_count:
                raise ValueError(f"action[{x}][{g}] out of range")
    for x in range(x_count):
        for g in range(group.order):
            for h in range(group.order):
                if action[action[x][h]][g] != action[x][group.mul[g][h]]:
                    raise ValueError(f"action not compatible with multiplication at ({g}, {h}, {x})")
    arrows = [(g, x) for x in range(x_count) for g in range(group.order)]
    return _from_arrows(
        x_count, arrows,
        src=lambda a: a[1],
        tgt=lambda a: action[a[1]][a[0]],
        compose=lambda a, b: (group.mul[a[0]][b[0]], b[1]),
        identity=lambda x: (e, x),
        inverse=lambda a: (group.inverse(a[0]), action[a[1]][a[0]]),
    )


def pair_groupoid(n: int) -> FiniteGroupoid:
    arrows = [(y, x) for x in range(n) for y in range(n)]
    return _from_arrows(n, arrows, src=lambda a: a[1], tgt=lambda a: a[0],
                        compose=lambda a, b: (a[0], b[1]), identity=lambda x: (x, x),
                        inverse=lambda a: (a[1], a[0]))


def loop_space(g: FiniteGroupoid) -> list[int]:
    """Arrows whose source equals their target."""
    return [a for a in range(g.n_arrows) if g.src[a] == g.tgt[a]]


def inertia_groupoid(g: FiniteGroupoid) -> FiniteGroupoid:
    """G acting on its loop space by conjugation.

    Objects are loops h (numbered in order); arrows are pairs (a, h) with
    s(a) = s(h), sending h to a h a^-1.
    """
    loops = loop_space(g)
    pos = {h: i for i, h in enumerate(loops)}
    arrows = [(a, h) for h in loops for a in range(g.n_arrows) if g.src[a] == g.src[h]]

    def conj(a, h):
        return g.mul[(g.mul[(a, h)], g.inv[a])]

    return _from_arrows(
        len(loops), arrows,
        src=lambda ar: pos[ar[1]],
        tgt=lambda ar: pos[conj(*ar)],
        compose=lambda x, y: (g.mul[(x[0], y[0])], y[1]),
        identity=lambda i: (g.unit[g.src[loops[i]]], loops[i]),
        inverse=lambda ar: (g.inv[ar[0]], conj(*ar)),
    )


def pullback_groupoid(g: FiniteGroupoid, f: Sequence[int]) -> FiniteGroupoid:
    """G[Y] for f: Y -> G_0: arrows (y, z, a) with t(a) = f(y), s(a) = f(z)."""
    if any(not 0 <= v < g.n_objects for v in f):
        raise ValueError("map to objects out of range")
    y_count = len(f)
    arrows = [(y, z, a) for a in range(g.n_arrows)
              for y in range(y_count) if f[y] == g.tgt[a]
              for z in range(y_count) if f[z] == g.src[a]]
    return _from_arrows(
        y_count, arrows,
        src=lambda ar: ar[1],
        tgt=lambda ar: ar[0],
        compose=lambda p, q: (p[0], q[1], g.mul[(p[2], q[2])]),
        identity=lambda y: (y, y, g.unit[f[y]]),
        inverse=lambda ar: (ar[1], ar[0], g.inv[ar[2]]),
    )


def full_subgroupoid(g: FiniteGroupoid, objects: Sequence[int]) -> GroupoidMorphism:
    """Inclusion of the full subgroupoid on ``objects``."""
    objs = list(objects)
    pos = {x: i for i, x in enumerate(objs)}
    arrows = [a for a in range(g.n_arrows) if g.src[a] in pos and g.tgt[a] in pos]
    apos = {a: i for i, a in enumerate(arrows)}
    sub = FiniteGroupoid(
        len(objs),
        tuple(pos[g.src[a]] for a in arrows),
        tuple(pos[g.tgt[a]] for a in arrows),
        tuple(apos[g.unit[x]] for x in objs),
        tuple(apos[g.inv[a]] for a in arrows),
        {(apos[a], apos[b]): apos[c] for (a, b), c in g.mul.items() if a in apos and b in apos},
    )
    return GroupoidMorphism(sub, g, tuple(objs), tuple(arrows))


# ---------------------------------------------------------------------------
# orbits and equivalences


def orbits(g: FiniteGroupoid) -> list[tuple[int, ...]]:
    """Connected components of the object set, each sorted, ordered by least member."""
    parent = list(range(g.n_objects))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(g.n_arrows):
        ra, rb = find(g.src[a]), find(g.tgt[a])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for x in range(g.n_objects):
        groups.setdefault(find(x), []).append(x)
    return [tuple(v) for _, v in sorted(groups.items())]


def orbit_signature(g: FiniteGroupoid) -> Counter:
    """Multiset of (orbit size, isotropy order) over the orbits."""
    return Counter((len(o), len(g.isotropy(o[0]))) for o in orbits(g))


@dataclass
class MoritaVerdict:
    verdict: str
    reason: str = ""
    object_map: tuple | None = None
    arrow_map: tuple | None = None
    nodes: int = 0


def _degree_profile(g: FiniteGroupoid) -> list[tuple]:
    return [(len(g.isotropy(x)), sum(1 for a in range(g.n_arrows) if g.src[a] == x)) for x in range(g.n_objects)]


def find_isomorphism(a: FiniteGroupoid, b: FiniteGroupoid, budget: int = 10 ** 6):
    """Search for a groupoid isomorphism a -> b.

    Returns (object_map, arrow_map), False when none exists, or None when
    the node budget runs out.
    """
    if (a.n_objects, a.n_arrows) != (b.n_objects, b.n_arrows):
        return False
    pa, pb = _degree_profile(a), _degree_profile(b)
    if sorted(pa) != sorted(pb) or orbit_signature(a) != orbit_signature(b):
        return False
    nodes = 0
    # objects: match by profile; arrows: per hom-set, by backtracking
    order = sorted(range(a.n_arrows), key=lambda x: (a.src[x] != a.tgt[x], a.src[x], a.tgt[x], x))
    omap = [-1] * a.n_objects
    used_obj = [False] * b.n_objects
    amap = [-1] * a.n_arrows
    used_arr = [False] * b.n_arrows

    def consistent():
        for (p, q), r in a.mul.items():
            if amap[p] >= 0 and amap[q] >= 0 and amap[r] >= 0:
                if b.mul.get((amap[p], amap[q])) != amap[r]:
                    return False
        return True

    arrow_order = order

    def assign_arrows(k):
        nonlocal nodes
        if k == len(arrow_order):
            return True
        x = arrow_order[k]
        if amap[x] >= 0:
            return assign_arrows(k + 1)
        s, t = omap[a.src[x]], omap[a.tgt[x]]
        for y in b.hom(s, t):
            if used_arr[y]:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget
            amap[x], used_arr[y] = y, True
            forced = []
            ok = True
            iy = b.inv[y]
            ix = a.inv[x]
            if amap[ix] < 0:
                if used_arr[iy]:
                    ok = False
                else:
                    amap[ix], used_arr[iy] = iy, True
                    forced.append(ix)
            elif amap[ix] != iy:
                ok = False
            if ok and consistent() and assign_arrows(k + 1):
                return True
            for z in forced:
                used_arr[amap[z]] = False
                amap[z] = -1
            amap[x], used_arr[y] = -1, False
        return False

    def assign_objects(i):
        nonlocal nodes
        if i == a.n_objects:
            # units first
            for x in range(a.n_objects):
                u, v = a.unit[x], b.unit[omap[x]]
                amap[u], used_arr[v] = v, True
            if assign_arrows(0):
                return True
            for x in range(a.n_objects):
                used_arr[amap[a.unit[x]]] = False
                amap[a.unit[x]] = -1
            return False
        for j in range(b.n_objects):
            if used_obj[j] or pb[j] != pa[i]:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget
            omap[i], used_obj[j] = j, True
            if assign_objects(i + 1):
                return True
            omap[i], used_obj[j] = -1, False
        return False

    try:
        if assign_objects(0):
            return tuple(omap), tuple(amap)
        return False
    except _Budget:
        return None


class _Budget(Exception):
    pass


def morita_check(g: FiniteGroupoid, h: FiniteGroupoid, f: Sequence[int], k: Sequence[int],
                 budget: int = 10 ** 6) -> MoritaVerdict:
    """Decide whether G[Y] and H[Y] are isomorphic, with f, k surjective.

    The isomorphism found need not be the identity on Y; the morphisms
    G[Y] -> G and H[Y] -> H are still weak equivalences, so either way the
    groupoids are Morita equivalent.
    """
    if len(f) != len(k):
        return MoritaVerdict("not_surjective", "f and g have different domains")
    if set(f) != set(range(g.n_objects)):
        return MoritaVerdict("not_surjective", "f misses an object")
    if set(k) != set(range(h.n_objects)):
        return MoritaVerdict("not_surjective", "g misses an object")
    gy, hy = pullback_groupoid(g, f), pullback_groupoid(h, k)
    found = find_isomorphism(gy, hy, budget)
    if found is None:
        return MoritaVerdict("undecided", f"search budget of {budget} nodes exhausted")
    if found is False:
        reason = "arrow counts differ" if gy.n_arrows != hy.n_arrows else "no isomorphism of pullbacks"
        return MoritaVerdict("not_isomorphic", reason)
    return MoritaVerdict("morita_equivalent", "", found[0], found[1])


@dataclass
class WeakEquivalenceVerdict:
    essentially_surjective: bool
    fully_faithful: bool
    reason: str = ""

    @property
    def verdict(self) -> str:
        if self.essentially_surjective and self.fully_faithful:
            return "weak_equivalence"
        if not self.essentially_surjective:
            return "not_essentially_surjective"
        return "not_fully_faithful"


def weak_equivalence_check(f: GroupoidMorphism) -> WeakEquivalenceVerdict:
    """(ES): every object of G receives an arrow from the image of f_0.
    (FF): K_1 maps bijectively onto {(a, x, y) : s(a) = f(x), t(a) = f(y)}."""
    k, g = f.source, f.target
    image = {f.object_map[x] for x in range(k.n_objects)}
    reached = {g.tgt[a] for a in range(g.n_arrows) if g.src[a] in image}
    es = reached == set(range(g.n_objects))
    fibered = Counter()
    for a in range(k.n_arrows):
        fibered[(f.arrow_map[a], k.src[a], k.tgt[a])] += 1
    expected = {(a, x, y) for x in range(k.n_objects) for y in range(k.n_objects)
                for a in g.hom(f.object_map[x], f.object_map[y])}
    ff = set(fibered) == expected and all(v == 1 for v in fibered.values())
    reason = []
    if not es:
        reason.append(f"objects {sorted(set(range(g.n_objects)) - reached)} not reached")
    if not ff:
        reason.append("arrows do not biject onto the fibered product")
    return WeakEquivalenceVerdict(es, ff, "; ".join(reason))


def identity_morphism(g: FiniteGroupoid) -> GroupoidMorphism:
    return GroupoidMorphism(g, g, tuple(range(g.n_objects)), tuple(range(g.n_arrows)))


def compose_morphisms(f: GroupoidMorphism, h: GroupoidMorphism) -> GroupoidMorphism:
    """h after f."""
    return GroupoidMorphism(f.source, h.target,
                            tuple(h.object_map[v] for v in f.object_map),
                            tuple(h.arrow_map[v] for v in f.arrow_map))


def relabel(g: FiniteGroupoid, obj_perm: Sequence[int], arr_perm: Sequence[int]) -> tuple[FiniteGroupoid, GroupoidMorphism]:
    """An isomorphic copy with objects x -> obj_perm[x], arrows a -> arr_perm[a]."""
    n, m = g.n_objects, g.n_arrows
    inv_o = [0] * n
    inv_a = [0] * m
    for x, y in enumerate(obj_perm):
        inv_o[y] = x
    for a, b in enumerate(arr_perm):
        inv_a[b] = a
    h = FiniteGroupoid(
        n,
        tuple(obj_perm[g.src[inv_a[b]]] for b in range(m)),
        tuple(obj_perm[g.tgt[inv_a[b]]] for b in range(m)),
        tuple(arr_perm[g.unit[inv_o[y]]] for y in range(n)),
        tuple(arr_perm[g.inv[inv_a[b]]] for b in range(m)),
        {(arr_perm[a], arr_perm[b]): arr_perm[c] for (a, b), c in g.mul.items()},
    )
    return h, GroupoidMorphism(g, h, tuple(obj_perm), tuple(arr_perm))
