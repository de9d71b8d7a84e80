"""Finite matrix groups and linear circle actions.

A :class:`FiniteMatrixGroup` is an explicit element list with a
multiplication table; element 0 is always the identity and the ordering is a
deterministic breadth-first closure of the (sorted) generators.  The circle
is never sampled: a :class:`CircleWeightAction` is described by its integer
weights and all questions about it reduce to integrality of ``n * t`` for
rational angles ``t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

from ._kernels import IntegerAction
from .linalg import (
    MAX_DIM,
    DimensionError,
    RationalMatrix,
    RationalSubspace,
    canonicalize,
    kernel,
    to_fraction,
    vec,
)

DEFAULT_ORDER_CAP = 384


class GroupTooLarge(RuntimeError):
    """Closure exceeded the configured order cap."""


@dataclass(frozen=True, eq=False)
class FiniteMatrixGroup:
    ambient_dim: int
    elements: tuple[RationalMatrix, ...]
    mul_table: tuple[tuple[int, ...], ...]
    inv_table: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.mul_table[self.mul_table[g][h]][self.inv_table[g]]

    @cached_property
    def index(self) -> dict:
        return {m.key(): i for i, m in enumerate(self.elements)}

    def index_of(self, m: RationalMatrix) -> int:
        return self.index[m.key()]

    @cached_property
    def fixed_spaces(self) -> tuple[RationalSubspace, ...]:
        ident = RationalMatrix.identity(self.ambient_dim)
        return tuple(kernel(m - ident) for m in self.elements)

    @cached_property
    def integer_action(self) -> IntegerAction:
        nums, dens = [], []
        for m in self.elements:
            d = 1
            for r in m.rows:
                for a in r:
                    d = lcm(d, a.denominator)
            nums.append([int(a * d) for r in m.rows for a in r])
            dens.append(d)
        return IntegerAction(nums, dens, self.ambient_dim)

    def element_order(self, h: int) -> int:
        k, x = 1, h
        while x != 0:
            x = self.mul_table[x][h]
            k += 1
        return k

    def powers(self, h: int) -> list[int]:
        out, x = [0], h
        while x != 0:
            out.append(x)
            x = self.mul_table[x][h]
        return sorted(out)

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def stabilizer(self, x: Sequence) -> "Subgroup":
        """Isotropy group of a rational point, by direct matrix action."""
        x = vec(x)
        d = 1
        for a in x:
            d = lcm(d, a.denominator)
        xi = [int(a * d) for a in x]
        return Subgroup(self, tuple(self.integer_action.stabilizer(xi)))

    def conjugated(self, p: RationalMatrix) -> "FiniteMatrixGroup":
        """The same abstract group acting through P rho P^-1 (same indices)."""
        pinv = p.inverse()
        elements = tuple(p @ m @ pinv for m in self.elements)
        return FiniteMatrixGroup(self.ambient_dim, elements, self.mul_table, self.inv_table)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteMatrixGroup = field(compare=False, hash=False, repr=False)
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self.member_set

    def __iter__(self):
        return iter(self.members)

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def issubgroup(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    def conjugate(self, g: int) -> "Subgroup":
        return Subgroup(self.parent, tuple(self.parent.conj(g, k) for k in self.members))

    def is_closed(self) -> bool:
        s = self.member_set
        g = self.parent
        if 0 not in s:
            return False
        return all(g.mul(a, b) in s for a in s for b in s) and all(g.inv(a) in s for a in s)

    def is_abelian(self) -> bool:
        g = self.parent
        return all(g.mul(a, b) == g.mul(b, a) for a in self.members for b in self.members)

    @cached_property
    def fixed_space(self) -> RationalSubspace:
        g = self.parent
        out = RationalSubspace.full(g.ambient_dim)
        for k in self.members:
            if k:
                out = out & g.fixed_spaces[k]
        return out

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, members={list(self.members)})"


def _sort_key(m: RationalMatrix):
    return tuple(a for r in m.rows for a in r)


def close_generators(gens: Iterable, cap: int = DEFAULT_ORDER_CAP, dim: int | None = None) -> FiniteMatrixGroup:
    """Smallest matrix group containing ``gens``.

    Elements are discovered breadth-first from the identity, right
    multiplying by the generators in lexicographic order of their entries.
    """
    mats = [g if isinstance(g, RationalMatrix) else RationalMatrix.from_rows(g) for g in gens]
    if dim is None:
        if not mats:
            raise ValueError("dimension needed for an empty generating set")
        dim = mats[0].nrows
    if dim > MAX_DIM:
        raise DimensionError(f"representation dimension {dim} exceeds cap {MAX_DIM}")
    for m in mats:
        if m.shape != (dim, dim):
            raise ValueError(f"generator of shape {m.shape} in a {dim}-dimensional group")
        if m.rank() != dim:
            raise ValueError("non-invertible generator")
    ident = RationalMatrix.identity(dim)
    uniq = {m.key(): m for m in mats if m != ident}
    ordered = sorted(uniq.values(), key=_sort_key)

    elements = [ident]
    index = {ident.key(): 0}
    queue = deque([0])
    while queue:
        x = elements[queue.popleft()]
        for s in ordered:
            y = x @ s
            k = y.key()
            if k not in index:
                if len(elements) >= cap:
                    raise GroupTooLarge(f"group too large or infinite (more than {cap} elements)")
                index[k] = len(elements)
                elements.append(y)
                queue.append(index[k])
    return _with_tables(dim, elements, index)


def _probe_vector(dim: int, elements: Sequence[RationalMatrix]) -> tuple[Fraction, ...]:
    """A point whose orbit has |G| distinct images (trivial stabilizer)."""
    t = 2
    while True:
        v = tuple(Fraction(t) ** i + i for i in range(dim))
        images = {m.apply(v) for m in elements}
        if len(images) == len(elements):
            return v
        t += 1


def _with_tables(dim: int, elements: list[RationalMatrix], index: dict) -> FiniteMatrixGroup:
    order = len(elements)
    if dim == 0 or order == 1:
        mul = tuple(tuple([0] * order) for _ in range(order))
        return FiniteMatrixGroup(dim, tuple(elements), mul, tuple([0] * order))
    v = _probe_vector(dim, elements)
    images = [m.apply(v) for m in elements]
    lookup = {w: i for i, w in enumerate(images)}
    mul = []
    for a in elements:
        mul.append(tuple(lookup[a.apply(images[b])] for b in range(order)))
    inv = [0] * order
    for a in range(order):
        row = mul[a]
        for b in range(order):
            if row[b] == 0:
                inv[a] = b
                break
    return FiniteMatrixGroup(dim, tuple(elements), tuple(mul), tuple(inv))


def centralizer(group: FiniteMatrixGroup, h: int) -> Subgroup:
    mt = group.mul_table
    return Subgroup(group, tuple(g for g in range(group.order) if mt[g][h] == mt[h][g]))


def normalizer(group: FiniteMatrixGroup, sub: Subgroup) -> Subgroup:
    s = sub.member_set
    keep = []
    for g in range(group.order):
        if all(group.conj(g, k) in s for k in sub.members):
            keep.append(g)
    return Subgroup(group, tuple(keep))


def cartan_associated(group: FiniteMatrixGroup, h: int) -> Subgroup:
    """The Cartan subgroup associated to ``h``.

    In a finite group the identity component is trivial, so the subgroup
    must be topologically cyclic with component group generated by h:
    that is the cyclic group generated by h.
    """
    return Subgroup(group, tuple(group.powers(h)))


def generated_subgroup(group: FiniteMatrixGroup, gens: Iterable[int]) -> Subgroup:
    members = {0}
    frontier = [0]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = group.mul(x, s)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(group, tuple(members))


def conjugacy_classes(group: FiniteMatrixGroup) -> list[list[int]]:
    """Conjugation orbits, each sorted, ordered by least element."""
    seen = set()
    classes = []
    for h in range(group.order):
        if h in seen:
            continue
        cls = sorted({group.conj(g, h) for g in range(group.order)})
        seen.update(cls)
        classes.append(cls)
    return classes


# ---------------------------------------------------------------------------
# circle actions


def normalize_angle(t) -> Fraction:
    t = to_fraction(t)
    return t - (t.numerator // t.denominator)


@dataclass(frozen=True, eq=False)
class CircleWeightAction:
    """S^1 acting on C^r + R^d0; block j rotates by 2 pi n_j t.

    Canonical coordinates order the blocks first, as ``(x_1, y_1, ..., x_r,
    y_r)``, then the trivial coordinates.  An optional invertible ``basis``
    P re-expresses the representation as P rho P^-1.
    """

    weights: tuple[int, ...]
    trivial_dim: int = 0
    basis: RationalMatrix | None = None

    def __post_init__(self):
        w = tuple(int(n) for n in self.weights)
        if any(n == 0 for n in w):
            raise ValueError("circle weights must be nonzero")
        if self.trivial_dim < 0:
            raise ValueError("trivial dimension must be nonnegative")
        object.__setattr__(self, "weights", w)
        if self.ambient_dim > MAX_DIM:
            raise DimensionError(f"representation dimension {self.ambient_dim} exceeds cap {MAX_DIM}")
        if self.basis is not None and self.basis.shape != (self.ambient_dim, self.ambient_dim):
            raise ValueError("basis change has the wrong shape")

    @property
    def ambient_dim(self) -> int:
        return 2 * len(self.weights) + self.trivial_dim

    def conjugated(self, p: RationalMatrix) -> "CircleWeightAction":
        new = p if self.basis is None else p @ self.basis
        return CircleWeightAction(self.weights, self.trivial_dim, new)

    @cached_property
    def basis_inverse(self) -> RationalMatrix | None:
        return None if self.basis is None else self.basis.inverse()

    def to_canonical(self, x: Sequence) -> tuple[Fraction, ...]:
        x = vec(x)
        return x if self.basis is None else self.basis_inverse.apply(x)

    def from_canonical(self, x: Sequence) -> tuple[Fraction, ...]:
        x = vec(x)
        return x if self.basis is None else self.basis.apply(x)

    def block_space(self, blocks: Iterable[int], with_trivial: bool = True) -> RationalSubspace:
        n = self.ambient_dim
        axes = []
        for j in blocks:
            axes += [2 * j, 2 * j + 1]
        if with_trivial:
            axes += list(range(2 * len(self.weights), n))
        space = RationalSubspace.coordinate(n, sorted(axes))
        return space if self.basis is None else space.image(self.basis)

    def fixing_blocks(self, t) -> list[int]:
        t = normalize_angle(t)
        return [j for j, nj in enumerate(self.weights) if (nj * t).denominator == 1]

    def fixed_space(self, t) -> RationalSubspace:
        return self.block_space(self.fixing_blocks(t))

    def support(self, x: Sequence) -> list[int]:
        y = self.to_canonical(x)
        return [j for j in range(len(self.weights)) if y[2 * j] or y[2 * j + 1]]

    def isotropy_order(self, x: Sequence) -> int | None:
        """Order m of the isotropy group Z/m of ``x``; None for all of S^1."""
        supp = self.support(x)
        if not supp:
            return None
        g = 0
        for j in supp:
            g = gcd(g, self.weights[j])
        return abs(g)

    def fixes(self, t, x: Sequence) -> bool:
        return set(self.support(x)) <= set(self.fixing_blocks(t))


def fixed_subspace(action, g) -> RationalSubspace:
    """V^g for a finite-group element index or a rational circle angle."""
    if isinstance(action, FiniteMatrixGroup):
        return action.fixed_spaces[g]
    if isinstance(action, CircleWeightAction):
        return action.fixed_space(g)
    raise TypeError(f"unsupported action {type(action).__name__}")


def cyclic_group(n: int) -> FiniteMatrixGroup:
    """Z/n acting on Q^1 (n <= 2) or as a rotation-like rational matrix.

    Only orders 1, 2, 3, 4, 6 have faithful rational 2-dimensional
    realizations; these are used for the shipped examples and tests.
    """
    if n == 1:
        return close_generators([], dim=1)
    if n == 2:
        return close_generators([[[-1]]])
    gens = {3: [[0, -1], [1, -1]], 4: [[0, -1], [1, 0]], 6: [[1, -1], [1, 0]]}
    if n not in gens:
        raise ValueError("no faithful rational plane realization of this order")
    return close_generators([gens[n]])


def symmetric_group_standard() -> FiniteMatrixGroup:
    """S_3 on the plane x + y + z = 0, in the basis (e1 - e2, e2 - e3)."""
    swap12 = [[-1, 1], [0, 1]]
    cycle = [[0, -1], [1, -1]]
    return close_generators([swap12, cycle])
