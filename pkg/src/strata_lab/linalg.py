"""Exact rational linear algebra.

Every subspace is stored by its reduced row-echelon basis, so two equal
subspaces compare (and hash) equal without further work.  Coordinates are
:class:`fractions.Fraction` throughout; nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from ._kernels import rref_int

# representation spaces larger than this are rejected at construction
MAX_DIM = 16


class DimensionError(ValueError):
    """Operands live in different ambient spaces."""


def to_fraction(value) -> Fraction:
    """Parse an exact number: int, Fraction, or a string like ``"-3/4"``.

    Floats are rejected to keep the core exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def vec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def _scale_to_int(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for a in row:
        den = lcm(den, a.denominator)
    return [int(a * den) for a in row]


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    int_rows = [_scale_to_int(r) for r in rows]
    reduced, pivots = rref_int(int_rows, ncols)
    basis = []
    for row, c in zip(reduced, pivots):
        p = row[c]
        basis.append(tuple(Fraction(a, p) for a in row))
    return tuple(basis), tuple(pivots)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class RationalMatrix:
    """Dense row-major matrix with Fraction entries."""

    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        rs = tuple(vec(r) for r in rows)
        ncols = len(rs[0]) if rs else 0
        if any(len(r) != ncols for r in rs):
            raise DimensionError("ragged matrix rows")
        return cls(rs, ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(0) for _ in range(ncols)) for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.rows)) if self.rows else (), self.nrows)

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(dot(r, v) for r in self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(dot(r, c) for c in cols) for r in self.rows), other.ncols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return RationalMatrix(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return RationalMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix(tuple(tuple(c * a for a in r) for r in self.rows), self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def rank(self) -> int:
        return len(_rref(self.rows, self.ncols)[0])

    def inverse(self) -> "RationalMatrix":
        """Gauss-Jordan inverse; raises ValueError if singular."""
        n = self.nrows
        if not self.is_square():
            raise DimensionError("only square matrices are invertible")
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        basis, pivots = _rref(aug, 2 * n)
        if len(pivots) != n or pivots[-1] != n - 1:
            raise ValueError("matrix is singular")
        return RationalMatrix(tuple(tuple(row[n:]) for row in basis), n)

    def key(self) -> tuple:
        return self.rows

    def as_strings(self) -> list[list[str]]:
        return [[str(a) for a in r] for r in self.rows]


@dataclass(frozen=True)
class RationalSubspace:
    """A subspace of Q^n held by its RREF basis.

    Equality is structural: equal subspaces have identical ``basis`` tuples.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def zero(cls, n: int) -> "RationalSubspace":
        return cls(n, (), ())

    @classmethod
    def full(cls, n: int) -> "RationalSubspace":
        return canonicalize([tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)], n)

    @classmethod
    def coordinate(cls, n: int, axes: Iterable[int]) -> "RationalSubspace":
        return canonicalize([tuple(Fraction(int(i == j)) for j in range(n)) for i in axes], n)

    def __contains__(self, v) -> bool:
        return contains_point(self, v)

    def __le__(self, other: "RationalSubspace") -> bool:
        return self.issubspace(other)

    def __lt__(self, other: "RationalSubspace") -> bool:
        return self.dim < other.dim and self.issubspace(other)

    def issubspace(self, other: "RationalSubspace") -> bool:
        _check(self, other)
        if self.dim > other.dim:
            return False
        return all(contains_point(other, b) for b in self.basis)

    def __add__(self, other: "RationalSubspace") -> "RationalSubspace":
        _check(self, other)
        return canonicalize(self.basis + other.basis, self.ambient_dim)

    def __and__(self, other: "RationalSubspace") -> "RationalSubspace":
        return intersect(self, other)

    def annihilator(self) -> "RationalSubspace":
        """Linear forms (as vectors, via the standard pairing) vanishing here."""
        if not self.basis:
            return RationalSubspace.full(self.ambient_dim)
        return kernel(RationalMatrix(self.basis, self.ambient_dim))

    def image(self, m: RationalMatrix) -> "RationalSubspace":
        if m.ncols != self.ambient_dim:
            raise DimensionError("matrix does not act on this space")
        return canonicalize([m.apply(b) for b in self.basis], m.nrows)

    def preimage(self, m: RationalMatrix) -> "RationalSubspace":
        """{v : m v in self}."""
        if m.nrows != self.ambient_dim:
            raise DimensionError("matrix does not map into this space")
        eqs = self.annihilator().basis
        rows = [tuple(dot(e, col) for col in zip(*m.rows)) for e in eqs]
        if not rows:
            return RationalSubspace.full(m.ncols)
        return kernel(RationalMatrix(tuple(rows), m.ncols))

    def coordinates(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Coefficients of ``v`` in the RREF basis; ``v`` must lie here."""
        v = vec(v)
        if not contains_point(self, v):
            raise ValueError("point is not in the subspace")
        return tuple(v[c] for c in self.pivots)

    def combine(self, coeffs: Sequence) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coeffs, self.basis):
            c = to_fraction(c)
            if c:
                for j, a in enumerate(b):
                    if a:
                        out[j] += c * a
        return tuple(out)

    def project(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Orthogonal projection (standard inner product), exactly."""
        v = vec(v)
        if not self.basis:
            return tuple(Fraction(0) for _ in v)
        b = RationalMatrix(self.basis, self.ambient_dim)
        gram = b @ b.transpose()
        rhs = b.apply(v)
        coeffs = gram.inverse().apply(rhs)
        return self.combine(coeffs)

    def relative_codim(self, inner: "RationalSubspace") -> int:
        return self.dim - inner.dim

    def to_json(self) -> list[list[str]]:
        return [[str(a) for a in b] for b in self.basis]

    def __repr__(self) -> str:
        rows = ", ".join("(" + ", ".join(str(a) for a in b) + ")" for b in self.basis)
        return f"RationalSubspace(n={self.ambient_dim}, span{{{rows}}})"


def _check(a: RationalSubspace, b: RationalSubspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def canonicalize(vectors: Iterable[Sequence], ambient_dim: int | None = None) -> RationalSubspace:
    """Span of ``vectors`` in canonical RREF form."""
    rows = [vec(v) for v in vectors]
    if ambient_dim is None:
        if not rows:
            raise DimensionError("ambient dimension needed for an empty generating set")
        ambient_dim = len(rows[0])
    for r in rows:
        if len(r) != ambient_dim:
            raise DimensionError(f"vector of length {len(r)} in Q^{ambient_dim}")
    basis, pivots = _rref(rows, ambient_dim)
    return RationalSubspace(ambient_dim, basis, pivots)


def kernel(m: RationalMatrix) -> RationalSubspace:
    """Null space of ``m``."""
    n = m.ncols
    basis, pivots = _rref(m.rows, n)
    free = [j for j in range(n) if j not in pivots]
    vectors = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(basis, pivots):
            v[p] = -row[f]
        vectors.append(v)
    return canonicalize(vectors, n)


def intersect(a: RationalSubspace, b: RationalSubspace) -> RationalSubspace:
    _check(a, b)
    if a.dim == 0 or b.dim == 0:
        return RationalSubspace.zero(a.ambient_dim)
    if a == b:
        return a
    eqs = a.annihilator().basis + b.annihilator().basis
    if not eqs:
        return a
    return kernel(RationalMatrix(eqs, a.ambient_dim))


def intersect_all(spaces: Iterable[RationalSubspace], ambient_dim: int) -> RationalSubspace:
    out = RationalSubspace.full(ambient_dim)
    for s in spaces:
        out = intersect(out, s)
        if out.dim == 0:
            break
    return out


def contains_point(s: RationalSubspace, v: Sequence) -> bool:
    """True iff ``v`` lies in ``s`` (reduction against the RREF basis)."""
    v = vec(v)
    if len(v) != s.ambient_dim:
        raise DimensionError(f"point of length {len(v)} in Q^{s.ambient_dim}")
    r = list(v)
    for row, p in zip(s.basis, s.pivots):
        c = r[p]
        if c:
            for j in range(p, len(r)):
                if row[j]:
                    r[j] -= c * row[j]
    return not any(r)


def solve(m: RationalMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of ``m x = b``, or None when inconsistent."""
    b = vec(b)
    if len(b) != m.nrows:
        raise DimensionError("right-hand side length mismatch")
    aug = [tuple(r) + (bi,) for r, bi in zip(m.rows, b)]
    basis, pivots = _rref(aug, m.ncols + 1)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [Fraction(0)] * m.ncols
    for row, p in zip(basis, pivots):
        x[p] = row[-1]
    return tuple(x)
