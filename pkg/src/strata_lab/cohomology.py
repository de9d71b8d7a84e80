"""Cohomology of basic polynomial forms in bounded coefficient degree.

Linear actions preserve the bigrading (p, k) = (coefficient degree, form
degree), d maps (p, k) to (p - 1, k + 1) and contraction with the
fundamental field maps (p, k) to (p + 1, k - 1), so the basic complex splits
along s = p + k into finite pieces.  Keeping p <= D, the piece s is complete
in form degrees k >= s - D; cohomology in degree k is therefore computed
exactly for every s <= D + k - 1 (and s <= D when k = 0).  Classes at larger
s are outside the window and reported as such, never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from ._parallel import pmap
from .forms import (
    Gaussian,
    I_UNIT,
    PolyForm,
    _pullback_terms,
    form_basis,
    fundamental_field,
    monomials,
    reynolds,
)
from .groups import CircleWeightAction, FiniteMatrixGroup
from .linalg import RationalMatrix, canonicalize, kernel


def _coords(w: PolyForm, index: dict) -> tuple[Fraction, ...]:
    v = [Fraction(0)] * len(index)
    for key, c in w.terms.items():
        v[index[key]] = c
    return tuple(v)


def _from_coords(n: int, basis, v) -> PolyForm:
    return PolyForm._raw(n, {basis[i]: c for i, c in enumerate(v) if c})


def _circle_invariants(action: CircleWeightAction, p: int, k: int) -> list[PolyForm]:
    """Real and imaginary parts of the weight-zero complex monomials."""
    n = action.ambient_dim
    r = len(action.weights)
    one = Gaussian(Fraction(1))

    def unit(i, c):
        return {tuple(int(j == i) for j in range(n)): c}

    back = []
    for j in range(r):
        back += [{**unit(2 * j, one), **unit(2 * j + 1, I_UNIT)},
                 {**unit(2 * j, one), **unit(2 * j + 1, -I_UNIT)}]
    for i in range(2 * r, n):
        back.append(unit(i, one))
    out = []
    for e, idx in form_basis(n, p, k):
        wt = sum(w * (e[2 * j] + (2 * j in idx) - e[2 * j + 1] - (2 * j + 1 in idx))
                 for j, w in enumerate(action.weights))
        if wt:
            continue
        real = _pullback_terms({(e, idx): one}, back, n, one)
        re = {key: v.re for key, v in real.items() if v.re}
        im = {key: v.im for key, v in real.items() if v.im}
        for part in (re, im):
            if part:
                out.append(PolyForm._raw(n, part))
    return out


@dataclass
class _Model:
    action: object
    n: int
    cache: dict = field(default_factory=dict)

    def basis(self, p: int, k: int):
        key = ("basis", p, k)
        if key not in self.cache:
            b = form_basis(self.n, p, k) if p >= 0 else []
            self.cache[key] = (b, {t: i for i, t in enumerate(b)})
        return self.cache[key]

    def invariant(self, p: int, k: int) -> list[PolyForm]:
        a = self.action
        if p < 0 or k < 0 or k > self.n:
            return []
        if isinstance(a, FiniteMatrixGroup):
            cands = [reynolds(PolyForm._raw(self.n, {t: Fraction(1)}), a) for t in self.basis(p, k)[0]]
        elif a.basis is None:
            cands = _circle_invariants(a, p, k)
        else:
            canon = CircleWeightAction(a.weights, a.trivial_dim)
            cands = [w.linear_pullback(a.basis_inverse) for w in _circle_invariants(canon, p, k)]
        basis, index = self.basis(p, k)
        space = canonicalize([_coords(w, index) for w in cands if w], len(basis))
        return [_from_coords(self.n, basis, v) for v in space.basis]

    def basic(self, p: int, k: int) -> list[PolyForm]:
        key = ("basic", p, k)
        if key in self.cache:
            return self.cache[key]
        inv = self.invariant(p, k)
        a = self.action
        if isinstance(a, FiniteMatrixGroup) or k == 0 or not inv:
            out = inv
        else:
            xi = fundamental_field(a)
            tbasis, tindex = self.basis(p + 1, k - 1)
            cols = [_coords(w.interior(xi), tindex) for w in inv]
            m = RationalMatrix.from_rows([[c[i] for c in cols] for i in range(len(tbasis))])
            ker = kernel(m)
            out = []
            for coeffs in ker.basis:
                total = PolyForm(self.n)
                for c, w in zip(coeffs, inv):
                    if c:
                        total = total + w.scale(c)
                out.append(total)
        self.cache[key] = out
        return out

    def d_rank(self, p: int, k: int) -> int:
        """Rank of d on basic forms of bidegree (p, k)."""
        src = self.basic(p, k)
        if not src or p == 0 or k >= self.n:
            return 0
        basis, index = self.basis(p - 1, k + 1)
        return canonicalize([_coords(w.d(), index) for w in src], len(basis)).dim


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    betti: int
    window: int
    per_total_degree: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "betti": self.betti,
            "total_degree_window": self.window,
            "nonzero_pieces": [[s, b] for s, b in self.per_total_degree if b],
        }


@dataclass(frozen=True)
class BasicCohomology:
    ambient_dim: int
    max_poly_degree: int
    degrees: tuple[DegreeResult, ...]

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(d.betti for d in self.degrees)

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "max_poly_degree": self.max_poly_degree,
            "betti": list(self.betti),
            "degrees": [d.to_json() for d in self.degrees],
            "truncation": "classes with p + k above the window are not computed",
        }


def basic_cohomology(action, max_poly_degree: int) -> BasicCohomology:
    """Betti numbers of the basic complex, exact within each window."""
    if max_poly_degree < 1:
        raise ValueError("max_poly_degree must be at least 1")
    n = action.ambient_dim
    model = _Model(action, n)
    dmax = max_poly_degree

    def one_degree(k: int) -> DegreeResult:
        top = dmax if k == 0 else dmax + k - 1
        pieces = []
        for s in range(k, top + 1):
            p = s - k
            dim = len(model.basic(p, k))
            rank_out = model.d_rank(p, k)
            rank_in = model.d_rank(p + 1, k - 1) if k >= 1 else 0
            pieces.append((s, dim - rank_out - rank_in))
        return DegreeResult(k, sum(b for _, b in pieces), top, tuple(pieces))

    # the cache is shared; run degrees in sequence but let the thread pool
    # take over when STRATA_LAB_THREADS asks for it
    results = pmap(one_degree, range(n + 1))
    return BasicCohomology(n, dmax, tuple(results))
