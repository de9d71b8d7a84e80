"""Chambers of central hyperplane arrangements inside a rational subspace.

Two independent counts are provided: :func:`count_regions` sums |mu| over
the intersection poset (Zaslavsky), and :func:`chambers_by_sign_vectors`
enumerates sign vectors and decides each one exactly by Fourier-Motzkin
elimination.  The second is exponential and exists to check the first.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .linalg import RationalSubspace, canonicalize, dot, intersect

DEFAULT_POSET_CAP = 4096


def _dedupe(hyperplanes: Iterable[RationalSubspace]) -> list[RationalSubspace]:
    seen, out = set(), []
    for h in hyperplanes:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return out


def restrict(ambient: RationalSubspace, hyperplanes: Iterable[RationalSubspace]) -> tuple[list[RationalSubspace], bool]:
    """Intersect each hyperplane with ``ambient``.

    Returns the distinct proper traces that are hyperplanes of ``ambient``
    and a flag that is True when some hyperplane contains all of it (the
    complement is then empty).
    """
    out, swallowed = [], False
    for h in hyperplanes:
        t = intersect(ambient, h)
        if t == ambient:
            swallowed = True
        elif t.dim == ambient.dim - 1:
            out.append(t)
    return _dedupe(out), swallowed


def intersection_poset(ambient: RationalSubspace, hyperplanes: Sequence[RationalSubspace], cap: int = DEFAULT_POSET_CAP):
    """All intersections of subfamilies (``ambient`` itself included), or
    None when there are more than ``cap`` of them.

    Flats are generated through their annihilators: meeting a flat with a
    hyperplane adds the hyperplane's normals, one row reduction per step.
    """
    n = ambient.ambient_dim
    normals = [h.annihilator().basis for h in hyperplanes]
    top = ambient.annihilator()
    seen = {top}
    layer = {top}
    while layer:
        nxt = set()
        for a in layer:
            for rows in normals:
                y = canonicalize(a.basis + rows, n)
                if y != a and y not in seen:
                    nxt.add(y)
        seen |= nxt
        if len(seen) > cap:
            return None
        layer = nxt
    return sorted((a.annihilator() for a in seen), key=lambda s: (-s.dim, s.basis))


def mobius_from_top(flats: Sequence[RationalSubspace], hyperplanes: Sequence[RationalSubspace] | None = None) -> dict:
    """mu(ambient, X) for each flat, ordered by reverse inclusion.

    With the hyperplanes given, X <= Y is decided by comparing the sets of
    hyperplanes containing each flat, which is much cheaper than a subspace
    test.
    """
    if hyperplanes is not None:
        above = [frozenset(i for i, h in enumerate(hyperplanes) if x <= h) for x in flats]
        below = lambda i, j: above[j] <= above[i]  # noqa: E731
    else:
        below = lambda i, j: flats[i] <= flats[j]  # noqa: E731
    mu = {}
    vals = []
    for i, x in enumerate(flats):
        v = 1 if i == 0 else -sum(vals[j] for j in range(i) if flats[j].dim > x.dim and below(i, j))
        vals.append(v)
        mu[x] = v
    return mu


def count_regions(ambient: RationalSubspace, hyperplanes: Iterable[RationalSubspace], cap: int = DEFAULT_POSET_CAP):
    """Number of connected components of ``ambient`` minus the hyperplanes.

    Hyperplanes are codimension-one subspaces of ``ambient`` (others are
    intersected down first).  Returns None when the poset exceeds ``cap``.
    """
    hs, swallowed = restrict(ambient, hyperplanes)
    if swallowed:
        return 0
    flats = intersection_poset(ambient, hs, cap)
    if flats is None:
        return None
    mu = mobius_from_top(flats, hs)
    return sum(abs(v) for v in mu.values())


# ---------------------------------------------------------------------------
# brute-force oracle


def _primitive(row: Sequence) -> tuple[int, ...]:
    """Positive multiple of a rational row with coprime integer entries."""
    den = 1
    for a in row:
        d = Fraction(a).denominator
        den = den * d // gcd(den, d)
    ints = [int(Fraction(a) * den) for a in row]
    return _reduce(ints)


def _reduce(ints: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for a in ints:
        g = gcd(g, a)
    return tuple(a // g for a in ints) if g > 1 else tuple(ints)


def strictly_feasible(rows: Sequence[Sequence], dim: int) -> bool:
    """Whether {c : r . c > 0 for every row} is nonempty (Fourier-Motzkin)."""
    system = {_primitive(r) for r in rows}
    for k in range(dim):
        if any(not any(r) for r in system):
            return False
        pos = [r for r in system if r[k] > 0]
        neg = [r for r in system if r[k] < 0]
        nxt = {r for r in system if r[k] == 0}
        for p in pos:
            for q in neg:
                nxt.add(_reduce([-q[k] * a + p[k] * b for a, b in zip(p, q)]))
        system = nxt
    return not system


def functionals(ambient: RationalSubspace, hyperplanes: Iterable[RationalSubspace]) -> list[tuple[Fraction, ...]]:
    """Each hyperplane of ``ambient`` as a linear form in basis coordinates."""
    out = []
    for h in hyperplanes:
        t = intersect(ambient, h)
        found = None
        for a in t.annihilator().basis:
            f = tuple(dot(a, b) for b in ambient.basis)
            if any(f):
                found = f
                break
        out.append(found if found is not None else tuple(Fraction(0) for _ in ambient.basis))
    return out


def chambers_by_sign_vectors(ambient: RationalSubspace, hyperplanes: Iterable[RationalSubspace]) -> int:
    """Count chambers as the strictly feasible sign vectors in {+1, -1}^m.

    Vectors are grown one hyperplane at a time; an infeasible prefix has no
    feasible extension, so its subtree is skipped.
    """
    forms = functionals(ambient, hyperplanes)
    d = ambient.dim
    if not forms:
        return 1
    prefixes: list[list[tuple]] = [[]]
    for f in forms:
        nxt = []
        for rows in prefixes:
            for s in (1, -1):
                cand = rows + [tuple(s * a for a in f)]
                if strictly_feasible(cand, d):
                    nxt.append(cand)
        prefixes = nxt
    return len(prefixes)
