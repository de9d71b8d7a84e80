"""JSON payloads, text tables and DOT output for command results."""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__
from .groups import CircleWeightAction, FiniteMatrixGroup
from .strata import Cell, InertiaResult, StratificationResult

SCHEMA_VERSION = "1.0"


def envelope(command: str, digest: str | None, results: dict, timing: float | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "strata-lab",
        "version": __version__,
        "command": command,
        "input_digest": digest,
        "results": results,
        "timing": None if timing is None else {"wall_seconds": round(timing, 6)},
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _part(p) -> str:
    if isinstance(p, Cell):
        return p.label()
    return str(p)


def action_summary(action) -> dict:
    if isinstance(action, FiniteMatrixGroup):
        return {"kind": "finite-matrix", "dim": action.ambient_dim, "order": action.order}
    return {"kind": "circle-weights", "dim": action.ambient_dim, "weights": list(action.weights),
            "trivial_dim": action.trivial_dim}


def strata_payload(result: StratificationResult) -> dict:
    finite = isinstance(result.action, FiniteMatrixGroup)
    rows = []
    for s in result.strata:
        part, x = s.witness
        rows.append({
            "id": s.id,
            "group_part": (f"g{s.group_part}" if finite else _part(s.group_part)),
            "group_part_kind": "element" if finite else ("cell" if s.is_cell else "angle"),
            "isotropy_order": s.isotropy.order,
            "isotropy": s.isotropy.label(),
            "dim": s.dim,
            "components": "unknown" if s.component_count is None else s.component_count,
            "depth": result.depth[s.id],
            "witness": {"group_part": f"g{part}" if finite else str(part), "x": [str(v) for v in x]},
        })
    out = {
        "action": action_summary(result.action),
        "strata": rows,
        "hasse": [list(e) for e in result.hasse],
        "order": sorted([list(e) for e in result.order]),
        "max_depth": result.max_depth,
    }
    if finite:
        out["elements"] = [m.as_strings() for m in result.action.elements]
    return out


def inertia_payload(inertia: InertiaResult) -> dict:
    return {
        "strata": [{"id": s.id, "source": s.source, "dim": s.dim,
                    "components": "unknown" if s.component_count is None else s.component_count,
                    "depth": inertia.depth[s.id]} for s in inertia.strata],
        "hasse": [list(e) for e in inertia.hasse],
        "order": sorted([list(e) for e in inertia.order]),
    }


def strata_table(payload: dict) -> str:
    head = ("id", "group part", "isotropy", "dim", "comps", "depth", "witness")
    rows = [head]
    for r in payload["strata"]:
        rows.append((str(r["id"]), r["group_part"], r["isotropy"], str(r["dim"]), str(r["components"]),
                     str(r["depth"]), "(" + ", ".join(r["witness"]["x"]) + ")"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.append("hasse: " + (", ".join(f"{a}<{b}" for a, b in payload["hasse"]) or "none"))
    return "\n".join(lines) + "\n"


def hasse_dot(payload: dict, name: str = "strata") -> str:
    """Hasse diagram with dim and depth in each node label; edges point up."""
    lines = [f'digraph "{name}" {{', "  rankdir=BT;", "  node [shape=box];"]
    for r in payload["strata"]:
        label = f'{r["id"]}: {r["group_part"]} / {r["isotropy"]}\\ndim {r["dim"]}, depth {r["depth"]}'
        lines.append(f'  s{r["id"]} [label="{label}"];')
    for a, b in payload["hasse"]:
        lines.append(f"  s{a} -> s{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
