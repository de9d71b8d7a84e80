"""Polynomial differential forms on Q^n with exact coefficients.

A form is a dict mapping (exponent vector, increasing index tuple) to a
nonzero coefficient; the pair (e, I) stands for x^e dx_{I[0]} ^ ... ^ dx_{I[-1]}.
Most operations are written over an arbitrary coefficient ring so that the
circle average can pass through Gaussian rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Iterable, Mapping, Sequence

from .groups import CircleWeightAction, FiniteMatrixGroup
from .linalg import RationalMatrix, RationalSubspace, to_fraction

Term = tuple[tuple[int, ...], tuple[int, ...]]


# ---------------------------------------------------------------------------
# coefficient helpers


@dataclass(frozen=True)
class Gaussian:
    """a + b i with rational a, b."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, o):
        o = _g(o)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-_g(o))

    def __mul__(self, o):
        o = _g(o)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)


def _g(v) -> Gaussian:
    return v if isinstance(v, Gaussian) else Gaussian(Fraction(v))


I_UNIT = Gaussian(Fraction(0), Fraction(1))


def _merge_sign(a: Sequence[int], b: Sequence[int]):
    """Sign and sorted union for dx_a ^ dx_b, or (0, None) on overlap."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


def _add_into(out: dict, key, c) -> None:
    v = out.get(key)
    v = c if v is None else v + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _wedge_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for (ea, ia), ca in a.items():
        for (eb, ib), cb in b.items():
            s, idx = _merge_sign(ia, ib)
            if s:
                _add_into(out, (tuple(x + y for x, y in zip(ea, eb)), idx), ca * cb * s)
    return out


def _d_terms(t: Mapping, n: int) -> dict:
    out: dict = {}
    for (e, idx), c in t.items():
        for i in range(n):
            if e[i] == 0 or i in idx:
                continue
            s, new = _merge_sign((i,), idx)
            e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
            _add_into(out, (e2, new), c * e[i] * s)
    return out


def _poly_mul(p: Mapping, q: Mapping) -> dict:
    out: dict = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            _add_into(out, tuple(x + y for x, y in zip(ea, eb)), ca * cb)
    return out


def _interior_terms(t: Mapping, field: Sequence[Mapping]) -> dict:
    """Contraction with the polynomial vector field sum_i field[i] d/dx_i."""
    out: dict = {}
    for (e, idx), c in t.items():
        for pos, i in enumerate(idx):
            comp = field[i]
            if not comp:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            s = -1 if pos % 2 else 1
            for fe, fc in comp.items():
                _add_into(out, (tuple(x + y for x, y in zip(e, fe)), rest), c * fc * s)
    return out


def _pullback_terms(t: Mapping, maps: Sequence[Mapping], m: int, one) -> dict:
    """Substitute x_i -> maps[i] (polynomials in m variables)."""
    zero_e = (0,) * m
    dmaps = [_d_terms({(e, ()): c for e, c in f.items()}, m) for f in maps]
    out: dict = {}
    power_cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in power_cache:
            if k == 0:
                power_cache[key] = {zero_e: one}
            else:
                power_cache[key] = _poly_mul(power(i, k - 1), maps[i])
        return power_cache[key]

    for (e, idx), c in t.items():
        poly = {zero_e: c}
        for i, k in enumerate(e):
            if k:
                poly = _poly_mul(poly, power(i, k))
        form = {(pe, ()): pc for pe, pc in poly.items()}
        for i in idx:
            form = _wedge_terms(form, dmaps[i])
            if not form:
                break
        for key, v in form.items():
            _add_into(out, key, v)
    return out


# ---------------------------------------------------------------------------
# the form type


class PolyForm:
    """Polynomial differential form on Q^n with rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Term, object] | None = None):
        self.n = n
        clean: dict = {}
        for (e, idx), c in (terms or {}).items():
            e, idx = tuple(e), tuple(idx)
            if len(e) != n:
                raise ValueError(f"exponent vector {e} has wrong length for n = {n}")
            if list(idx) != sorted(set(idx)) or any(not 0 <= i < n for i in idx):
                raise ValueError(f"index set {idx} is not strictly increasing in range")
            _add_into(clean, (e, idx), to_fraction(c))
        self.terms = clean

    # construction helpers
    @classmethod
    def zero(cls, n: int) -> "PolyForm":
        return cls(n)

    @classmethod
    def const(cls, n: int, c) -> "PolyForm":
        return cls(n, {((0,) * n, ()): c})

    @classmethod
    def coord(cls, n: int, i: int) -> "PolyForm":
        e = [0] * n
        e[i] = 1
        return cls(n, {(tuple(e), ()): 1})

    @classmethod
    def dx(cls, n: int, i: int) -> "PolyForm":
        return cls(n, {((0,) * n, (i,)): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], idx: Sequence[int] = (), c=1) -> "PolyForm":
        return cls(len(exps), {(tuple(exps), tuple(idx)): c})

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "PolyForm":
        f = cls.__new__(cls)
        f.n = n
        f.terms = terms
        return f

    # structure
    @property
    def degrees(self) -> set[int]:
        return {len(idx) for _, idx in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees
        if len(ds) > 1:
            raise ValueError("form is not homogeneous in form degree")
        return ds.pop() if ds else 0

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyForm) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def _same(self, other: "PolyForm") -> None:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return PolyForm._raw(self.n, out)

    def __neg__(self) -> "PolyForm":
        return PolyForm._raw(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        c = to_fraction(c)
        if not c:
            return PolyForm(self.n)
        return PolyForm._raw(self.n, {k: v * c for k, v in self.terms.items()})

    def wedge(self, other: "PolyForm") -> "PolyForm":
        self._same(other)
        return PolyForm._raw(self.n, _wedge_terms(self.terms, other.terms))

    __xor__ = wedge

    def d(self) -> "PolyForm":
        return PolyForm._raw(self.n, _d_terms(self.terms, self.n))

    def interior(self, field: Sequence[Mapping]) -> "PolyForm":
        """Contraction with a polynomial vector field, given per coordinate
        as {exponent vector: coefficient}."""
        if len(field) != self.n:
            raise ValueError("vector field has wrong number of components")
        return PolyForm._raw(self.n, _interior_terms(self.terms, field))

    def pullback(self, maps: Sequence["PolyForm"]) -> "PolyForm":
        """F^* for F = (maps[0], ..., maps[n-1]), each a 0-form on Q^m."""
        if len(maps) != self.n:
            raise ValueError(f"need {self.n} component polynomials, got {len(maps)}")
        m = maps[0].n if maps else 0
        polys = []
        for f in maps:
            if f.n != m or any(idx for _, idx in f.terms):
                raise ValueError("map components must be 0-forms on a common space")
            polys.append({e: c for (e, _), c in f.terms.items()})
        return PolyForm._raw(m, _pullback_terms(self.terms, polys, m, Fraction(1)))

    def linear_pullback(self, m: RationalMatrix) -> "PolyForm":
        """Pullback along x -> m x."""
        return self.pullback(linear_map(m))

    def restrict_degrees(self, p: int | None = None, k: int | None = None) -> "PolyForm":
        return PolyForm._raw(self.n, {(e, idx): c for (e, idx), c in self.terms.items()
                                      if (p is None or sum(e) == p) and (k is None or len(idx) == k)})

    def __repr__(self) -> str:
        return f"PolyForm({format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)


def linear_map(m: RationalMatrix) -> list[PolyForm]:
    """Components of x -> m x as 0-forms."""
    n = m.ncols
    out = []
    for row in m.rows:
        terms = {}
        for j, a in enumerate(row):
            if a:
                e = [0] * n
                e[j] = 1
                terms[(tuple(e), ())] = a
        out.append(PolyForm(n, terms))
    return out


def euler_field(n: int) -> list[dict]:
    return [{tuple(int(i == j) for j in range(n)): Fraction(1)} for i in range(n)]


# ---------------------------------------------------------------------------
# homotopy operator


def contraction_K(w: PolyForm) -> PolyForm:
    """K w = integral_0^1 H_t^*(xi_t _| w) dt for H_t(v) = t v.

    On x^e dx_I with |e| = p and |I| = k >= 1 the integrand is
    t^(p+k-1) times the Euler contraction, so the integral divides by p + k.
    """
    out: dict = {}
    euler = euler_field(w.n)
    for (e, idx), c in w.terms.items():
        if not idx:
            continue
        div = sum(e) + len(idx)
        for key, v in _interior_terms({(e, idx): c}, euler).items():
            _add_into(out, key, v / div)
    return PolyForm._raw(w.n, out)


def h0_pullback(w: PolyForm) -> PolyForm:
    """Pullback along the constant map to the origin: constants survive."""
    zero = (0,) * w.n
    c = w.terms.get((zero, ()))
    return PolyForm._raw(w.n, {(zero, ()): c} if c else {})


def homotopy_identity_check(w: PolyForm) -> PolyForm:
    """Residual w - H_0^* w - dKw - Kdw; identically zero."""
    return w - h0_pullback(w) - contraction_K(w).d() - contraction_K(w.d())


# ---------------------------------------------------------------------------
# group averaging and horizontality


def fundamental_field(action: CircleWeightAction) -> list[dict]:
    """The generator of the circle action as a linear vector field."""
    n = action.ambient_dim
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j, w in enumerate(action.weights):
        rows[2 * j][2 * j + 1] = Fraction(-w)
        rows[2 * j + 1][2 * j] = Fraction(w)
    a = RationalMatrix.from_rows(rows)
    if action.basis is not None:
        a = action.basis @ a @ action.basis_inverse
    field = []
    for row in a.rows:
        comp = {}
        for j, v in enumerate(row):
            if v:
                comp[tuple(int(i == j) for i in range(n))] = v
        field.append(comp)
    return field


@dataclass(frozen=True)
class HorizontalCheck:
    contraction: PolyForm
    trivially_horizontal: bool

    @property
    def horizontal(self) -> bool:
        return self.contraction.is_zero()


def horizontal_part_check(w: PolyForm, action) -> HorizontalCheck:
    """The contraction of w with the fundamental field; finite groups have
    no infinitesimal directions, so every form is horizontal there."""
    if isinstance(action, FiniteMatrixGroup):
        return HorizontalCheck(PolyForm(w.n), True)
    if w.n != action.ambient_dim:
        raise ValueError("form and action live on different spaces")
    return HorizontalCheck(w.interior(fundamental_field(action)), False)


def reynolds(w: PolyForm, action) -> PolyForm:
    """Projection onto invariant forms.

    Finite groups: the average of the pullbacks.  The circle: pass to
    complex coordinates z = x + iy, zbar = x - iy on each weight block,
    where rotation acts diagonally, keep the terms of total weight zero and
    convert back.  Both are exact.
    """
    if isinstance(action, FiniteMatrixGroup):
        if w.n != action.ambient_dim:
            raise ValueError("form and action live on different spaces")
        total = PolyForm(w.n)
        for g in action.elements:
            total = total + w.linear_pullback(g)
        return total.scale(Fraction(1, action.order))
    if isinstance(action, CircleWeightAction):
        return _circle_average(w, action)
    raise TypeError(f"unsupported action {type(action).__name__}")


def _circle_average(w: PolyForm, action: CircleWeightAction) -> PolyForm:
    n = action.ambient_dim
    r = len(action.weights)
    if w.n != n:
        raise ValueError("form and action live on different spaces")
    if action.basis is not None:
        # canonical coordinates y = P^-1 x; average there and come back
        inner = _circle_average(w.linear_pullback(action.basis), CircleWeightAction(action.weights, action.trivial_dim))
        return inner.linear_pullback(action.basis_inverse)
    half = Fraction(1, 2)
    one = Gaussian(Fraction(1))

    def unit(i, c):
        return {tuple(int(k == i) for k in range(n)): c}

    # real coordinates in terms of (z_j, zbar_j) stored at slots (2j, 2j+1)
    to_complex = []
    for j in range(r):
        z, zb = 2 * j, 2 * j + 1
        x = {**unit(z, Gaussian(half)), **unit(zb, Gaussian(half))}
        y = {**unit(z, Gaussian(Fraction(0), -half)), **unit(zb, Gaussian(Fraction(0), half))}
        to_complex += [x, y]
    for i in range(2 * r, n):
        to_complex.append(unit(i, one))
    terms = {k: Gaussian(v) for k, v in w.terms.items()}
    cx = _pullback_terms(terms, to_complex, n, one)

    def weight(e, idx):
        total = 0
        for j, wt in enumerate(action.weights):
            a = e[2 * j] + (2 * j in idx)
            b = e[2 * j + 1] + (2 * j + 1 in idx)
            total += wt * (a - b)
        return total

    kept = {k: v for k, v in cx.items() if weight(*k) == 0}
    back = []
    for j in range(r):
        xi, yi = 2 * j, 2 * j + 1
        back += [{**unit(xi, one), **unit(yi, I_UNIT)}, {**unit(xi, one), **unit(yi, -I_UNIT)}]
    for i in range(2 * r, n):
        back.append(unit(i, one))
    real = _pullback_terms(kept, back, n, one)
    out = {}
    for k, v in real.items():
        if v.im:
            raise ArithmeticError("circle average produced a non-real coefficient")
        if v.re:
            out[k] = v.re
    return PolyForm._raw(n, out)


# ---------------------------------------------------------------------------
# relative ideal


def _coordinate_axes(y: RationalSubspace | Iterable[int], n: int) -> set[int]:
    if not isinstance(y, RationalSubspace):
        return set(y)
    axes = set()
    for row, p in zip(y.basis, y.pivots):
        if any(v for i, v in enumerate(row) if i != p):
            raise ValueError("not a coordinate subspace: restrict after a linear change of coordinates")
        axes.add(p)
    return axes


def relative_ideal_quotient(w: PolyForm, y: RationalSubspace | Iterable[int]) -> PolyForm:
    """Normal form of w modulo I^k for the vanishing ideal of a coordinate
    subspace: drop terms with a complementary variable or differential."""
    axes = _coordinate_axes(y, w.n)
    out = {}
    for (e, idx), c in w.terms.items():
        if any(e[i] for i in range(w.n) if i not in axes) or any(i not in axes for i in idx):
            continue
        out[(e, idx)] = c
    return PolyForm._raw(w.n, out)


# ---------------------------------------------------------------------------
# bases


def monomials(n: int, p: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree p, in lexicographically decreasing order."""
    if n == 0:
        return [()] if p == 0 else []
    out = []
    for first in range(p, -1, -1):
        for rest in monomials(n - 1, p - first):
            out.append((first,) + rest)
    return out


def form_basis(n: int, p: int, k: int) -> list[Term]:
    return [(e, idx) for e in monomials(n, p) for idx in combinations(range(n), k)]


def space_dim(n: int, p: int, k: int) -> int:
    return comb(n + p - 1, p) * comb(n, k) if p >= 0 else 0


# ---------------------------------------------------------------------------
# text format

DEFAULT_NAMES = ("x", "y", "z", "w", "u", "v")

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<d>d[A-Za-z]\w*)|(?P<var>[A-Za-z]\w*)"
                    r"|(?P<op>[-+*^()]))")


class FormSyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


def variable_names(n: int) -> tuple[str, ...]:
    return DEFAULT_NAMES[:n] if n <= len(DEFAULT_NAMES) else tuple(f"x{i + 1}" for i in range(n))


def parse_form(text: str, n: int | None = None, names: Sequence[str] | None = None) -> PolyForm:
    """Parse forms such as ``2/3 x^2 y dx^dz - dy``.

    A term is an optional rational coefficient, then variable powers, then
    differentials joined by ``^``.  Variables default to x, y, z, w, u, v.
    """
    if names is None:
        if n is None:
            used = set(re.findall(r"[A-Za-z]\w*", text))
            used = {u[1:] if u.startswith("d") and u[1:] in DEFAULT_NAMES else u for u in used}
            n = max((DEFAULT_NAMES.index(u) + 1 for u in used if u in DEFAULT_NAMES), default=1)
        names = variable_names(n)
    n = len(names)
    pos = {v: i for i, v in enumerate(names)}
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise FormSyntaxError(f"unexpected character {text[i]!r}", i + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        i = m.end()
    result = PolyForm(n)
    k = 0
    if not tokens:
        raise FormSyntaxError("empty form", 1)
    while k < len(tokens):
        sign = 1
        while k < len(tokens) and tokens[k][0] == "op" and tokens[k][1] in "+-":
            if tokens[k][1] == "-":
                sign = -sign
            k += 1
        if k == len(tokens):
            raise FormSyntaxError("dangling sign", tokens[-1][2])
        coeff = Fraction(sign)
        exps = [0] * n
        diffs: list[int] = []
        seen = False
        while k < len(tokens) and not (tokens[k][0] == "op" and tokens[k][1] in "+-"):
            kind, val, col = tokens[k]
            if kind == "num":
                try:
                    coeff *= to_fraction(val)
                except (ValueError, ZeroDivisionError) as exc:
                    raise FormSyntaxError(str(exc), col) from None
            elif kind == "var":
                if val not in pos:
                    raise FormSyntaxError(f"unknown variable {val!r}", col)
                power = 1
                if k + 2 < len(tokens) and tokens[k + 1][1] == "^" and tokens[k + 2][0] == "num":
                    power = int(tokens[k + 2][1])
                    k += 2
                exps[pos[val]] += power
            elif kind == "d":
                name = val[1:]
                if name not in pos:
                    raise FormSyntaxError(f"unknown differential {val!r}", col)
                diffs.append(pos[name])
            elif val == "*" or (val == "^" and diffs):
                pass
            else:
                raise FormSyntaxError(f"unexpected {val!r}", col)
            seen = True
            k += 1
        if not seen:
            raise FormSyntaxError("empty term", tokens[k - 1][2] if k else 1)
        if len(set(diffs)) != len(diffs):
            continue
        form = PolyForm(n, {(tuple(exps), ()): coeff})
        for j in diffs:
            form = form.wedge(PolyForm.dx(n, j))
        result = result + form
    return result


def format_form(w: PolyForm, names: Sequence[str] | None = None) -> str:
    names = names or variable_names(w.n)
    if not w.terms:
        return "0"
    parts = []
    for (e, idx), c in sorted(w.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], [-x for x in kv[0][0]])):
        mono = " ".join(f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(e) if k)
        diff = "^".join(f"d{names[i]}" for i in idx)
        body = " ".join(s for s in (mono, diff) if s)
        mag = abs(c)
        coef = "" if (mag == 1 and body) else str(mag)
        piece = " ".join(s for s in (coef, body) if s)
        parts.append(("- " if c < 0 else "+ ") + piece)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[1:]
