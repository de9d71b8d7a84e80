"""Sampling checks of a computed stratification.

Everything here classifies points from scratch: the isotropy group of x is
found by applying every group element (or, for the circle, by enumerating
the angles that fix x), never by consulting the isotropy lattice.  The
symbolic strata are then asked whether they contain the point, and the two
answers are compared.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Sequence

from .groups import CircleWeightAction, FiniteMatrixGroup, normalize_angle
from .linalg import RationalMatrix, kernel, vec
from .strata import Cell, StratificationResult, Stratum, stratum_of


# ---------------------------------------------------------------------------
# direct classification


def _circle_isotropy_bruteforce(action: CircleWeightAction, x) -> int | None:
    """Number of angles fixing x (None when every angle does)."""
    y = action.to_canonical(x)
    supp = [j for j in range(len(action.weights)) if y[2 * j] or y[2 * j + 1]]
    if not supp:
        return None
    n0 = abs(action.weights[supp[0]])
    count = 0
    for a in range(n0):
        t = Fraction(a, n0)
        if all((action.weights[j] * t).denominator == 1 for j in supp):
            count += 1
    return count


def _circle_cell_direct(action: CircleWeightAction, t: Fraction) -> Cell:
    """The connected piece of t's simeq class, from nearest special angles."""
    t = normalize_angle(t)
    if not action.weights:
        return Cell(Fraction(0), None, True)
    if any((n * t).denominator == 1 for n in action.weights):
        return Cell(t)
    lo = max(Fraction(floor(abs(n) * t), abs(n)) for n in action.weights)
    hi = min(Fraction(floor(abs(n) * t) + 1, abs(n)) for n in action.weights)
    return Cell(lo, hi)


def _fundamental_matrix(action: CircleWeightAction) -> RationalMatrix:
    n = action.ambient_dim
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j, w in enumerate(action.weights):
        rows[2 * j][2 * j + 1] = Fraction(-w)
        rows[2 * j + 1][2 * j] = Fraction(w)
    m = RationalMatrix.from_rows(rows)
    if action.basis is not None:
        m = action.basis @ m @ action.basis_inverse
    return m


@dataclass
class Classifier:
    """Direct germ labels for loop points of one action, with caching."""

    action: object
    _cache: dict = field(default_factory=dict)

    def label(self, part, x) -> tuple:
        """Label of the germ at (part, x); raises ValueError off the loop space."""
        x = vec(x)
        a = self.action
        if isinstance(a, FiniteMatrixGroup):
            k = a.stabilizer(x)
            if part not in k:
                raise ValueError("not a loop point: h does not fix x")
            return self._pair_key(part, k.members)
        m = _circle_isotropy_bruteforce(a, x)
        t = normalize_angle(part)
        if m is None:
            return ("S1", _circle_cell_direct(a, t))
        if (t * m).denominator != 1:
            raise ValueError("not a loop point: angle does not fix x")
        return (m, t)

    def fixed_space(self, part, x):
        """V^{G_x} computed directly from the isotropy group."""
        a = self.action
        if isinstance(a, FiniteMatrixGroup):
            return a.stabilizer(x).fixed_space
        m = _circle_isotropy_bruteforce(a, x)
        if m is None:
            return kernel(_fundamental_matrix(a))
        return a.fixed_space(Fraction(1, m))

    def _pair_key(self, h: int, members: tuple) -> tuple:
        key = (h, members)
        if key not in self._cache:
            g = self.action
            best = None
            for c in range(g.order):
                cand = (tuple(sorted(g.conj(c, k) for k in members)), g.conj(c, h))
                if best is None or cand < best:
                    best = cand
            self._cache[key] = best
        return self._cache[key]

    def stratum_label(self, s: Stratum) -> tuple:
        part, x = s.witness
        return self.label(part, x)


# ---------------------------------------------------------------------------
# sampling


def sample_loop_points(action, count: int, rng: random.Random) -> list[tuple]:
    """Random rational loop points (part, x), biased toward small strata."""
    out = []
    if isinstance(action, FiniteMatrixGroup):
        for _ in range(count):
            h = rng.randrange(action.order)
            w = action.fixed_spaces[h]
            for _ in range(rng.choice((0, 0, 1, 2))):
                w = w & action.fixed_spaces[rng.randrange(action.order)]
            coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(w.dim)]
            if rng.random() < 0.05:
                coeffs = [Fraction(0)] * w.dim
            out.append((h, w.combine(coeffs)))
        return out
    special = sorted({Fraction(a, abs(n)) for n in action.weights for a in range(abs(n))}) or [Fraction(0)]
    mids = [(a + b) / 2 for a, b in zip(special, special[1:] + [Fraction(1)])]
    r = len(action.weights)
    for _ in range(count):
        roll = rng.random()
        if roll < 0.4:
            t = rng.choice(special)
        elif roll < 0.6:
            t = rng.choice(mids)
        else:
            t = normalize_angle(Fraction(rng.randint(0, 60), rng.randint(1, 12)))
        blocks = [j for j in action.fixing_blocks(t) if rng.random() < 0.7]
        y = [Fraction(0)] * action.ambient_dim
        for j in blocks:
            y[2 * j] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            y[2 * j + 1] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        for i in range(2 * r, action.ambient_dim):
            if rng.random() < 0.8:
                y[i] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        out.append((t, action.from_canonical(y)))
    return out


@dataclass
class CheckReport:
    name: str
    passed: bool
    checked: int
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "invariant": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexamples": self.counterexamples[:10],
        }


def _fmt_point(part, x) -> dict:
    return {"group_part": str(part), "x": [str(v) for v in x]}


def check_partition(result: StratificationResult, samples: int = 10_000, seed: int = 0) -> CheckReport:
    """Every sampled loop point lies in exactly one stratum, whose label and
    fixed space agree with the direct computation."""
    rng = random.Random(seed)
    cls = Classifier(result.action)
    labels = [cls.stratum_label(s) for s in result.strata]
    spaces = [s.isotropy.fixed_space for s in result.strata]
    bad = []
    points = sample_loop_points(result.action, samples, rng)
    for part, x in points:
        hits = stratum_of(result, part, x)
        lab = cls.label(part, x)
        if len(hits) != 1:
            bad.append({**_fmt_point(part, x), "hits": hits})
            continue
        sid = hits[0]
        if labels[sid] != lab:
            bad.append({**_fmt_point(part, x), "stratum": sid, "reason": "label mismatch"})
            continue
        if isinstance(result.action, CircleWeightAction) or len(result.strata[sid].conjugates) <= 1:
            if cls.fixed_space(part, x) != spaces[sid]:
                bad.append({**_fmt_point(part, x), "stratum": sid, "reason": "fixed space mismatch"})
        elif cls.fixed_space(part, x) not in {result.lattice[ki].fixed_space for _, ki in result.strata[sid].conjugates}:
            bad.append({**_fmt_point(part, x), "stratum": sid, "reason": "fixed space mismatch"})
    return CheckReport("partition", not bad, len(points), bad)


# ---------------------------------------------------------------------------
# frontier


def _norm(v) -> float:
    return sum(float(a) ** 2 for a in v) ** 0.5


def _circ(a: Fraction, b: Fraction) -> float:
    d = abs(float(normalize_angle(a - b)))
    return min(d, 1.0 - d)


SCALES = tuple(Fraction(1, 2 ** i) for i in range(1, 17))
DIRECTIONS = 6


def sampled_approach(result: StratificationResult, p: Stratum, q: Stratum, cls: Classifier | None = None,
                     rng: random.Random | None = None) -> tuple[bool, float]:
    """Search for points of Q converging to the witness of P.

    Candidate sequences come from scaling toward the witness inside the
    linear pieces of Q (strata are cones).  Each candidate is classified
    directly and kept only if it really lies in Q.  Returns whether the kept
    points approach the witness, and the smallest distance seen.
    """
    cls = cls or Classifier(result.action)
    rng = rng or random.Random(0)
    target = cls.stratum_label(q)
    ppart, px = p.witness
    px = vec(px)
    best = float("inf")
    for part_seq, space in _candidate_sequences(result, p, q, rng):
        proj = space.project(px)
        # a single direction can be unlucky (parallel to P itself), so try a few
        for _ in range(DIRECTIONS):
            y = space.combine([Fraction(rng.randint(1, 5), rng.randint(1, 3)) * rng.choice((1, -1))
                               for _ in range(space.dim)])
            dists = []
            for s, part in zip(SCALES, part_seq):
                z = tuple(a + s * b for a, b in zip(proj, y))
                try:
                    lab = cls.label(part, z)
                except ValueError:
                    continue
                if lab != target:
                    continue
                d = _norm([a - b for a, b in zip(z, px)])
                if isinstance(part, Fraction) or isinstance(ppart, Fraction):
                    d += _circ(Fraction(part), Fraction(ppart))
                dists.append(d)
            if dists:
                best = min(best, min(dists))
            if len(dists) >= 4:
                tail = dists[-4:]
                if tail[-1] < 1e-3 and all(a >= b for a, b in zip(tail, tail[1:])):
                    return True, best
    return False, best


def _candidate_sequences(result: StratificationResult, p: Stratum, q: Stratum, rng):
    """(group parts along the scales, linear piece of Q) pairs to try."""
    ppart = p.witness[0]
    if isinstance(result.action, FiniteMatrixGroup):
        for k, ki in q.conjugates:
            if k == ppart:
                yield [k] * len(SCALES), result.lattice[ki].fixed_space
        return
    space = q.isotropy.fixed_space
    if not q.is_cell:
        if _circ(Fraction(q.group_part), Fraction(ppart)) == 0:
            yield [q.group_part] * len(SCALES), space
        else:
            # constant angle at positive distance: still sampled, never approaches
            yield [q.group_part] * len(SCALES), space
        return
    cell = q.group_part
    for sign in (1, -1):
        parts = [normalize_angle(Fraction(ppart) + sign * s / 4) for s in SCALES]
        if not any(cell.contains(t) for t in parts):
            parts = [cell.sample()] * len(SCALES)
        yield parts, space


def check_frontier(result: StratificationResult, seed: int = 0) -> CheckReport:
    """Asserted P <= Q iff sampling finds Q-points converging to P's witness;
    also checks that the asserted relation is a partial order."""
    rng = random.Random(seed)
    cls = Classifier(result.action)
    bad = []
    ids = [s.id for s in result.strata]
    order = result.order
    for a in ids:
        for b in ids:
            if a != b and (a, b) in order and (b, a) in order:
                bad.append({"reason": "antisymmetry", "pair": [a, b]})
            for c in ids:
                if (a, b) in order and (b, c) in order and a != c and (a, c) not in order:
                    bad.append({"reason": "transitivity", "triple": [a, b, c]})
    checked = 0
    for p in result.strata:
        for q in result.strata:
            if p.id == q.id:
                continue
            found, dist = sampled_approach(result, p, q, cls, rng)
            checked += 1
            if found != ((p.id, q.id) in order):
                bad.append({"reason": "frontier", "lower": p.id, "upper": q.id,
                            "asserted": (p.id, q.id) in order, "sampled": found,
                            "closest": None if dist == float("inf") else dist})
    return CheckReport("frontier", not bad, checked, bad)


def check_frontier_claims(result: StratificationResult, claimed: set, seed: int = 0) -> CheckReport:
    """Compare an externally supplied strict order against sampling."""
    rng = random.Random(seed)
    cls = Classifier(result.action)
    bad = []
    checked = 0
    for p in result.strata:
        for q in result.strata:
            if p.id == q.id:
                continue
            found, _ = sampled_approach(result, p, q, cls, rng)
            checked += 1
            if found != ((p.id, q.id) in claimed):
                bad.append({"reason": "frontier", "lower": p.id, "upper": q.id,
                            "claimed": (p.id, q.id) in claimed, "sampled": found})
    return CheckReport("frontier", not bad, checked, bad)


def check_local_contractibility(result: StratificationResult, samples: int = 200, seed: int = 0) -> CheckReport:
    """Scaling x by t in (0, 1] keeps a loop point in its stratum."""
    rng = random.Random(seed)
    cls = Classifier(result.action)
    bad = []
    pts = [s.witness for s in result.strata]
    pts += sample_loop_points(result.action, samples, rng)
    checked = 0
    for part, x in pts:
        base = stratum_of(result, part, x)
        for _ in range(3):
            t = Fraction(rng.randint(1, 16), 16)
            y = tuple(t * a for a in x)
            checked += 1
            if stratum_of(result, part, y) != base or cls.label(part, y) != cls.label(part, x):
                bad.append({**_fmt_point(part, x), "scale": str(t)})
    return CheckReport("local-contractibility", not bad, checked, bad)


def closure_from_hasse(n: int, edges) -> set:
    """Transitive closure of a Hasse edge list."""
    above = {i: set() for i in range(n)}
    for a, b in edges:
        above[a].add(b)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            extra = set()
            for j in above[i]:
                extra |= above[j]
            if not extra <= above[i]:
                above[i] |= extra
                changed = True
    return {(i, j) for i in range(n) for j in above[i]}
