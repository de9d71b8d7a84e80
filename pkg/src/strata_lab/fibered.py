"""Stratified linear models and their fibered products.

A model is a rational vector space cut into pieces of the form
W minus a finite union of proper subspaces of W.  Such a set is empty only
when one of the removed subspaces is W itself, so nonemptiness is decided
exactly.  Given linear maps f: A -> T and g: B -> T, the fibered product is
{(a, b) : f a = g b} and its pieces are the fibered products of pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arrangements import DEFAULT_POSET_CAP, count_regions, intersection_poset
from .groups import FiniteMatrixGroup
from .linalg import RationalMatrix, RationalSubspace, canonicalize, contains_point, intersect, kernel
from .strata import find_witness, isotropy_lattice


class StratificationHypothesisError(ValueError):
    """A map fails the piecewise surjectivity needed for fibered products."""


@dataclass(frozen=True)
class LinearPiece:
    label: str
    span: RationalSubspace
    excluded: tuple[RationalSubspace, ...]
    witness: tuple[Fraction, ...]

    @property
    def dim(self) -> int:
        return self.span.dim

    def contains(self, x: Sequence) -> bool:
        return contains_point(self.span, x) and not any(contains_point(e, x) for e in self.excluded)

    def component_count(self, cap: int = DEFAULT_POSET_CAP):
        hyper = [e for e in self.excluded if e.dim == self.span.dim - 1]
        return count_regions(self.span, hyper, cap)


def _piece(label: str, span: RationalSubspace, excluded) -> LinearPiece | None:
    traces = {intersect(span, e) for e in excluded}
    if span in traces:
        return None
    ex = tuple(sorted(traces, key=lambda s: (-s.dim, s.basis)))
    return LinearPiece(label, span, ex, find_witness(span, ex))


@dataclass(frozen=True)
class LinearStratification:
    """Pieces of Q^n with the strict frontier relation between them."""

    ambient_dim: int
    pieces: tuple[LinearPiece, ...]
    order: frozenset

    def below(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.order

    def piece_of(self, x: Sequence) -> int:
        hits = [i for i, p in enumerate(self.pieces) if p.contains(x)]
        if len(hits) != 1:
            raise ValueError(f"point lies in {len(hits)} pieces")
        return hits[0]

    @classmethod
    def point(cls) -> "LinearStratification":
        return cls.trivial(0)

    @classmethod
    def trivial(cls, n: int) -> "LinearStratification":
        return cls(n, (_piece("all", RationalSubspace.full(n), ()),), frozenset())

    @classmethod
    def from_arrangement(cls, n: int, hyperplanes: Sequence[RationalSubspace]) -> "LinearStratification":
        """Flats of a central arrangement, each minus its proper subflats."""
        flats = intersection_poset(RationalSubspace.full(n), list(hyperplanes), cap=10 ** 6)
        pieces = []
        for i, f in enumerate(flats):
            sub = [g for g in flats if g.dim < f.dim and g <= f]
            pieces.append(_piece(f"flat{i}", f, sub))
        return cls._with_inclusion_order(n, pieces)

    @classmethod
    def from_isotropy(cls, group: FiniteMatrixGroup) -> "LinearStratification":
        """Orbit-type pieces V_{=K} of a finite linear action."""
        pieces = [LinearPiece(f"K{i}", e.fixed_space, e.excluded, e.witness)
                  for i, e in enumerate(isotropy_lattice(group))]
        return cls._with_inclusion_order(group.ambient_dim, pieces)

    @classmethod
    def _with_inclusion_order(cls, n: int, pieces) -> "LinearStratification":
        pieces = tuple(p for p in pieces if p is not None)
        order = frozenset((i, j) for i, p in enumerate(pieces) for j, q in enumerate(pieces)
                          if i != j and p.span < q.span)
        return cls(n, pieces, order)


def _direct_sum(a: RationalSubspace, b: RationalSubspace) -> RationalSubspace:
    n, m = a.ambient_dim, b.ambient_dim
    zeros_b, zeros_a = (Fraction(0),) * m, (Fraction(0),) * n
    vecs = [tuple(v) + zeros_b for v in a.basis] + [zeros_a + tuple(v) for v in b.basis]
    return canonicalize(vecs, n + m)


def _check_surjective(name: str, model: LinearStratification, f: RationalMatrix, target: LinearStratification,
                      need_onto: bool) -> None:
    for i, p in enumerate(model.pieces):
        y = f.apply(p.witness)
        try:
            t = target.pieces[target.piece_of(y)]
        except ValueError as exc:
            raise StratificationHypothesisError(f"{name} piece {p.label}: image not in a single target piece") from exc
        img = p.span.image(f)
        if not img <= t.span:
            raise StratificationHypothesisError(f"{name} piece {p.label} is not mapped into target piece {t.label}")
        if need_onto and img != t.span:
            raise StratificationHypothesisError(
                f"{name} piece {p.label} does not map onto the span of target piece {t.label}")


def stratify_fibered_product(a: LinearStratification, f: RationalMatrix, b: LinearStratification,
                             g: RationalMatrix, target: LinearStratification | None = None) -> LinearStratification:
    """Induced stratification of {(x, y) : f x = g y}.

    ``target`` stratifies the common codomain (one piece if omitted).  Every
    piece of ``a`` must map onto the span of the target piece it lands in,
    the linear form of the submersion hypothesis; every piece of ``b`` must
    map into a single target piece.
    """
    m = f.nrows
    if g.nrows != m or (m and (f.ncols != a.ambient_dim or g.ncols != b.ambient_dim)):
        raise ValueError("map shapes do not match the models")
    target = target or LinearStratification.trivial(m)
    _check_surjective("first", a, f, target, need_onto=True)
    _check_surjective("second", b, g, target, need_onto=False)
    stacked = RationalMatrix.from_rows(
        [tuple(f.rows[r]) + tuple(-v for v in g.rows[r]) for r in range(m)]
    ) if m else None
    n = a.ambient_dim + b.ambient_dim
    ker = kernel(stacked) if stacked is not None else RationalSubspace.full(n)
    pieces, index = [], []
    for i, p in enumerate(a.pieces):
        for j, q in enumerate(b.pieces):
            span = intersect(_direct_sum(p.span, q.span), ker)
            excluded = [intersect(_direct_sum(e, q.span), ker) for e in p.excluded]
            excluded += [intersect(_direct_sum(p.span, e), ker) for e in q.excluded]
            piece = _piece(f"{p.label}x{q.label}", span, excluded)
            if piece is not None:
                pieces.append(piece)
                index.append((i, j))
    order = frozenset(
        (u, v) for u, (i, j) in enumerate(index) for v, (k, l) in enumerate(index)
        if u != v and a.below(i, k) and b.below(j, l)
    )
    return LinearStratification(n, tuple(pieces), order)
