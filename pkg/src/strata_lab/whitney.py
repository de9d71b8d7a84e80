"""Numerical probe of Whitney's condition B between incident strata.

This is the only module that uses floating point.  Sample points are built
exactly (rational coordinates, exact polynomial values) and classified
exactly; only the final secant and tangent vectors are rounded to doubles,
each coordinate correctly rounded by ``float(Fraction)``.  The angle between
a secant line and a tangent plane is asin(|residual| / |secant|) after
orthogonal projection.

A probe that misses its tolerance reports "no numerical evidence": sampling
can support a limit statement but never refute it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .forms import PolyForm, fundamental_field
from .groups import CircleWeightAction, FiniteMatrixGroup, normalize_angle
from .linalg import RationalSubspace, vec
from .oracle import Classifier
from .strata import Cell, StratificationResult, Stratum


def default_scales() -> tuple[Fraction, ...]:
    return tuple(Fraction(1, 2 ** i) for i in range(1, 21))


@dataclass(frozen=True)
class ProbeConfig:
    base: int
    upper: int
    base_point: tuple | None = None
    scales: tuple[Fraction, ...] = field(default_factory=default_scales)
    samples_per_scale: int = 32
    angle_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if any(not a > b for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly decreasing")
        if not self.scales or self.scales[-1] <= 0:
            raise ValueError("scales must be positive")
        if not self.angle_tolerance > 0:
            raise ValueError("angle tolerance must be positive")
        if self.samples_per_scale < 1:
            raise ValueError("need at least one sample per scale")


class NotIncidentError(ValueError):
    pass


class InvarianceError(ValueError):
    pass


@dataclass(frozen=True)
class InvariantMap:
    """Polynomials p_1..p_N on V, checked exactly to be invariant."""

    polynomials: tuple[PolyForm, ...]

    def verify(self, action) -> None:
        for i, p in enumerate(self.polynomials):
            if p.n != action.ambient_dim or any(idx for _, idx in p.terms):
                raise InvarianceError(f"component {i} is not a polynomial on the representation space")
            if isinstance(action, FiniteMatrixGroup):
                for g in range(1, action.order):
                    if p.linear_pullback(action.elements[g]) != p:
                        raise InvarianceError(f"component {i} is not invariant under element {g}")
            else:
                if not p.d().interior(fundamental_field(action)).is_zero():
                    raise InvarianceError(f"component {i} is not invariant under the circle")

    def value(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = []
        for p in self.polynomials:
            total = Fraction(0)
            for (e, _), c in p.terms.items():
                term = c
                for xi, k in zip(x, e):
                    if k:
                        term *= xi ** k
                total += term
            out.append(total)
        return tuple(out)

    def jacobian(self, x: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
        rows = []
        for p in self.polynomials:
            grad = p.d()
            row = [Fraction(0)] * p.n
            for (e, idx), c in grad.terms.items():
                term = c
                for xi, k in zip(x, e):
                    if k:
                        term *= xi ** k
                row[idx[0]] += term
            rows.append(tuple(row))
        return rows


# ---------------------------------------------------------------------------
# sampling


def _rand_frac(rng: np.random.Generator) -> Fraction:
    num = int(rng.integers(-8, 9))
    den = int(rng.integers(1, 9))
    return Fraction(num, den)


def _rand_in(space: RationalSubspace, rng) -> tuple[Fraction, ...]:
    return space.combine([_rand_frac(rng) for _ in range(space.dim)])


def _upper_pieces(result: StratificationResult, q: Stratum, part, point) -> list[RationalSubspace]:
    """Linear pieces of Q through the base point with the same group part."""
    if isinstance(result.action, FiniteMatrixGroup):
        return [result.lattice[ki].fixed_space for k, ki in q.conjugates
                if k == part and point in result.lattice[ki].fixed_space]
    return [q.isotropy.fixed_space] if point in q.isotropy.fixed_space else []


def _group_offsets(p: Stratum, q: Stratum, part, s: Fraction, rng) -> Fraction | None:
    """Offset of the angle coordinate for a sample of Q at scale s."""
    if not isinstance(q.group_part, Cell) or q.group_part.dim == 0:
        return Fraction(0)
    for _ in range(8):
        tau = Fraction(int(rng.integers(1, 9)), 8) * (1 if rng.integers(0, 2) else -1)
        if q.group_part.contains(normalize_angle(Fraction(part) + s * tau)):
            return s * tau
    return None


@dataclass
class _Sample:
    upper_point: tuple
    base_point: tuple
    tangent: list


def _tangent_basis(result, q: Stratum, space: RationalSubspace) -> list[tuple[Fraction, ...]]:
    """Exact tangent frame of Q in (angle, x) coordinates."""
    circle = isinstance(result.action, CircleWeightAction)
    frame = [((Fraction(0),) if circle else ()) + tuple(b) for b in space.basis]
    if circle and isinstance(q.group_part, Cell) and q.group_part.dim == 1:
        frame.append((Fraction(1),) + (Fraction(0),) * space.ambient_dim)
    return frame


def _collect(result: StratificationResult, cfg: ProbeConfig, p: Stratum, q: Stratum, cls: Classifier,
             rng: np.random.Generator, s: Fraction) -> list[_Sample]:
    part, b = (cfg.base_point if cfg.base_point is not None else p.witness)
    b = vec(b)
    base_label = cls.label(part, b)
    upper_label = cls.stratum_label(q)
    circle = isinstance(result.action, CircleWeightAction)
    pieces = _upper_pieces(result, q, part, b)
    if not pieces:
        return []
    base_space = cls.fixed_space(part, b)
    out = []
    for _ in range(cfg.samples_per_scale):
        # a base point near b, staying in P
        y = tuple(a + s * c for a, c in zip(b, _rand_in(base_space, rng)))
        if cls.label(part, y) != base_label:
            continue
        space = pieces[int(rng.integers(0, len(pieces)))]
        x = tuple(a + s * c for a, c in zip(b, _rand_in(space, rng)))
        dt = _group_offsets(p, q, part, s, rng) if circle else Fraction(0)
        if dt is None:
            continue
        qpart = normalize_angle(Fraction(part) + dt) if circle else part
        try:
            if cls.label(qpart, x) != upper_label:
                continue
        except ValueError:
            continue
        if circle:
            out.append(_Sample((dt,) + x, (Fraction(0),) + y, _tangent_basis(result, q, space)))
        else:
            out.append(_Sample(x, y, _tangent_basis(result, q, space)))
    return out


def _angle(secant: np.ndarray, frame: np.ndarray) -> tuple[float, float]:
    """Angle between a line and the column space of ``frame``, plus the
    relative least-squares residual of the frame itself (0 for exact frames)."""
    norm = float(np.linalg.norm(secant))
    if norm == 0.0:
        return 0.0, 0.0
    if frame.size == 0:
        return float(np.pi / 2), 0.0
    q, _ = np.linalg.qr(frame)
    resid = secant - q @ (q.T @ secant)
    ratio = min(1.0, float(np.linalg.norm(resid)) / norm)
    return float(np.arcsin(ratio)), 0.0


def _to_float(v: Sequence[Fraction]) -> np.ndarray:
    return np.array([float(a) for a in v], dtype=float)


def _report(kind: str, cfg: ProbeConfig, rows: list[dict], extra: dict | None = None) -> dict:
    finest = next((r for r in reversed(rows) if r["max_angle"] is not None), None)
    ok = finest is not None and finest["max_angle"] <= cfg.angle_tolerance
    tail = [r["max_angle"] for r in rows[-5:] if r["max_angle"] is not None]
    trend = "flat" if tail and max(tail) <= cfg.angle_tolerance else (
        "decreasing" if len(tail) > 1 and all(a >= b for a, b in zip(tail, tail[1:])) else "undetermined")
    out = {
        "probe": kind,
        "base": cfg.base,
        "upper": cfg.upper,
        "seed": cfg.seed,
        "samples_per_scale": cfg.samples_per_scale,
        "angle_tolerance": cfg.angle_tolerance,
        "scales": rows,
        "trend": trend,
        "verdict": "pass" if ok else "no numerical evidence",
    }
    if extra:
        out.update(extra)
    return out


def _pair(result: StratificationResult, cfg: ProbeConfig) -> tuple[Stratum, Stratum]:
    n = len(result.strata)
    if not (0 <= cfg.base < n and 0 <= cfg.upper < n):
        raise NotIncidentError("stratum id out of range")
    if cfg.base == cfg.upper or (cfg.base, cfg.upper) not in result.order:
        raise NotIncidentError(f"stratum {cfg.base} is not in the closure of stratum {cfg.upper}")
    return result.strata[cfg.base], result.strata[cfg.upper]


def probe_whitney_b(result: StratificationResult, cfg: ProbeConfig) -> dict:
    """Max secant-to-tangent angle per scale for sequences converging to the
    base point."""
    p, q = _pair(result, cfg)
    rng = np.random.default_rng(cfg.seed)
    cls = Classifier(result.action)
    rows = []
    for s in cfg.scales:
        samples = _collect(result, cfg, p, q, cls, rng, s)
        angles = []
        for smp in samples:
            secant = _to_float([a - c for a, c in zip(smp.upper_point, smp.base_point)])
            frame = np.array([_to_float(v) for v in smp.tangent]).T if smp.tangent else np.zeros((0, 0))
            angles.append(_angle(secant, frame)[0])
        rows.append({"scale": str(s), "samples": len(angles), "max_angle": max(angles) if angles else None})
    return _report("whitney-b", cfg, rows)


def probe_quotient_whitney(result: StratificationResult, inv: InvariantMap, cfg: ProbeConfig) -> dict:
    """The same probe after pushing both strata through the invariant map.

    Tangent planes of the image are estimated from the Jacobian applied to
    the exact tangent frame, keeping singular directions above a relative
    threshold; the discarded part is reported as the estimation residual.
    """
    inv.verify(result.action)
    p, q = _pair(result, cfg)
    rng = np.random.default_rng(cfg.seed)
    cls = Classifier(result.action)
    circle = isinstance(result.action, CircleWeightAction)
    rows = []
    worst_resid = 0.0
    for s in cfg.scales:
        samples = _collect(result, cfg, p, q, cls, rng, s)
        angles = []
        for smp in samples:
            ux, bx = (smp.upper_point[1:], smp.base_point[1:]) if circle else (smp.upper_point, smp.base_point)
            pu, pb = inv.value(ux), inv.value(bx)
            head = [smp.upper_point[0] - smp.base_point[0]] if circle else []
            secant = _to_float(head + [a - c for a, c in zip(pu, pb)])
            jac = inv.jacobian(ux)
            pushed = []
            for v in smp.tangent:
                dv = v[1:] if circle else v
                img = [sum((r[i] * dv[i] for i in range(len(dv))), Fraction(0)) for r in jac]
                pushed.append(([v[0]] if circle else []) + img)
            frame = np.array([_to_float(v) for v in pushed]).T
            if frame.size == 0:
                angles.append(float(np.pi / 2))
                continue
            u, sv, _ = np.linalg.svd(frame, full_matrices=False)
            if sv.size == 0 or sv[0] == 0.0:
                angles.append(float(np.pi / 2))
                continue
            keep = sv > sv[0] * 1e-9
            resid = float(np.sqrt(np.sum(sv[~keep] ** 2)) / sv[0])
            worst_resid = max(worst_resid, resid)
            angles.append(_angle(secant, u[:, keep])[0])
        rows.append({"scale": str(s), "samples": len(angles), "max_angle": max(angles) if angles else None})
    return _report("quotient-whitney-b", cfg, rows, {"estimation_residual": worst_resid,
                                                      "invariants": [str(p) for p in inv.polynomials]})


def incident_pairs(result: StratificationResult) -> list[tuple[int, int]]:
    return sorted(result.order)


def report_json(report: dict) -> str:
    """Byte-stable serialization."""
    return json.dumps(report, sort_keys=True, separators=(",", ":"))
