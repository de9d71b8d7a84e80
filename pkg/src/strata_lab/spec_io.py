"""Input specifications.

Specs are YAML documents.  Every number must be an integer or a string
holding an exact rational such as ``"-3/4"``; floats are refused.  Errors
carry the line and column of the offending node.  The digest hashes a
canonical JSON rendering of the parsed spec, so it ignores layout and
comments and only changes when the meaning does.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .forms import FormSyntaxError, PolyForm, parse_form
from .groupoids import FiniteGroupoid, FiniteGroupTable, one_object, translation_groupoid
from .groups import DEFAULT_ORDER_CAP, CircleWeightAction, FiniteMatrixGroup, close_generators
from .linalg import RationalMatrix, to_fraction

KINDS = ("finite-matrix", "circle-weights", "finite-groupoid")
_COMMON_KEYS = {"kind", "name", "cap", "forms", "invariants"}
_KIND_KEYS = {
    "finite-matrix": {"generators", "dim"},
    "circle-weights": {"weights", "trivial_dim", "basis"},
    "finite-groupoid": {"groupoid", "other", "cover", "subgroupoid"},
}


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


def _err(node: yaml.Node | None, message: str) -> SpecError:
    if node is None:
        return SpecError(message)
    m = node.start_mark
    return SpecError(message, m.line + 1, m.column + 1)


# ---------------------------------------------------------------------------
# node helpers


def _mapping(node, what: str) -> dict[str, yaml.Node]:
    if not isinstance(node, yaml.MappingNode):
        raise _err(node, f"{what} must be a mapping")
    out = {}
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            raise _err(k, "mapping keys must be plain words")
        if k.value in out:
            raise _err(k, f"duplicate key {k.value!r}")
        out[k.value] = v
    return out


def _seq(node, what: str) -> list[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise _err(node, f"{what} must be a list")
    return list(node.value)


def _rational(node) -> Fraction:
    if not isinstance(node, yaml.ScalarNode):
        raise _err(node, "expected a number")
    text = node.value.strip()
    if node.tag == "tag:yaml.org,2002:float":
        raise _err(node, f"inexact number {text!r}; write a fraction such as \"1/2\"")
    try:
        return to_fraction(text)
    except ZeroDivisionError:
        raise _err(node, f"malformed fraction {text!r}: zero denominator") from None
    except (ValueError, TypeError):
        raise _err(node, f"malformed number {text!r}") from None


def _int(node, what: str, lo: int | None = None) -> int:
    v = _rational(node)
    if v.denominator != 1:
        raise _err(node, f"{what} must be an integer")
    if lo is not None and v < lo:
        raise _err(node, f"{what} must be at least {lo}")
    return int(v)


def _str(node, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise _err(node, f"{what} must be text")
    return node.value


def _matrix(node, what: str) -> RationalMatrix:
    rows = [[_rational(c) for c in _seq(r, f"row of {what}")] for r in _seq(node, what)]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise _err(node, f"{what} must be a nonempty rectangular matrix")
    return RationalMatrix.from_rows(rows)


def _int_table(node, what: str) -> list[int]:
    return [_int(c, f"entry of {what}", 0) for c in _seq(node, what)]


# ---------------------------------------------------------------------------
# spec types


@dataclass
class ActionSpec:
    kind: str
    name: str
    canonical: dict
    cap: int = DEFAULT_ORDER_CAP
    action: Any = None
    groupoid: FiniteGroupoid | None = None
    extras: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        text = json.dumps(self.canonical, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _mat_json(m: RationalMatrix) -> list[list[str]]:
    return m.as_strings()


def load_spec(text: str, cap: int | None = None) -> ActionSpec:
    """Parse and validate a spec document and build its action."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise SpecError(f"YAML syntax: {exc.problem}", m.line + 1 if m else None, m.column + 1 if m else None) from None
    if root is None:
        raise SpecError("empty spec")
    top = _mapping(root, "spec")
    if "kind" not in top:
        raise _err(root, "missing 'kind'")
    kind = _str(top["kind"], "kind")
    if kind not in KINDS:
        raise _err(top["kind"], f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    name = _str(top["name"], "name") if "name" in top else kind
    for k, node in top.items():
        if k not in _COMMON_KEYS | _KIND_KEYS[kind]:
            raise _err(node, f"unknown key {k!r}")
    cap_value = cap if cap is not None else (_int(top["cap"], "cap", 1) if "cap" in top else DEFAULT_ORDER_CAP)
    handler = {"finite-matrix": _finite, "circle-weights": _circle, "finite-groupoid": _groupoid}[kind]
    spec = handler(top, root, name, cap_value)
    if "forms" in top:
        forms = []
        for node in _seq(top["forms"], "forms"):
            src = _str(node, "form")
            try:
                forms.append(parse_form(src, spec.action.ambient_dim) if spec.action is not None else parse_form(src))
            except FormSyntaxError as exc:
                m = node.start_mark
                raise SpecError(f"form {src!r}: {exc}", m.line + 1, m.column + 1) from None
        spec.extras["forms"] = forms
        spec.canonical["forms"] = [str(f) for f in forms]
    if "invariants" in top:
        if spec.action is None:
            raise _err(top["invariants"], "invariants need an action spec")
        polys = []
        for node in _seq(top["invariants"], "invariants"):
            try:
                p = parse_form(_str(node, "invariant"), spec.action.ambient_dim)
            except FormSyntaxError as exc:
                raise _err(node, str(exc)) from None
            if any(idx for _, idx in p.terms):
                raise _err(node, "invariants must be polynomials (0-forms)")
            polys.append(p)
        spec.extras["invariants"] = polys
        spec.canonical["invariants"] = [str(p) for p in polys]
    return spec


def _finite(top, root, name, cap) -> ActionSpec:
    if "generators" not in top:
        raise _err(root, "finite-matrix spec needs 'generators'")
    gens = [_matrix(g, "generator") for g in _seq(top["generators"], "generators")]
    dim = _int(top["dim"], "dim", 1) if "dim" in top else None
    if dim is None:
        if not gens:
            raise _err(top["generators"], "an empty generator list needs 'dim'")
        dim = gens[0].nrows
    for node, g in zip(_seq(top["generators"], "generators"), gens):
        if g.shape != (dim, dim):
            raise _err(node, f"generator must be {dim} x {dim}")
        if g.rank() != dim:
            raise _err(node, "generator is not invertible")
    canonical = {"kind": "finite-matrix", "dim": dim, "generators": sorted(_mat_json(g) for g in gens)}
    spec = ActionSpec("finite-matrix", name, canonical, cap)
    spec.action = close_generators(gens, cap=cap, dim=dim)
    return spec


def _circle(top, root, name, cap) -> ActionSpec:
    if "weights" not in top:
        raise _err(root, "circle-weights spec needs 'weights'")
    weights = []
    for node in _seq(top["weights"], "weights"):
        w = _int(node, "weight")
        if w == 0:
            raise _err(node, "weights must be nonzero")
        weights.append(w)
    trivial = _int(top["trivial_dim"], "trivial_dim", 0) if "trivial_dim" in top else 0
    basis = _matrix(top["basis"], "basis") if "basis" in top else None
    n = 2 * len(weights) + trivial
    if basis is not None:
        if basis.shape != (n, n):
            raise _err(top["basis"], f"basis must be {n} x {n}")
        if basis.rank() != n:
            raise _err(top["basis"], "basis is not invertible")
    canonical = {"kind": "circle-weights", "weights": weights, "trivial_dim": trivial,
                 "basis": _mat_json(basis) if basis is not None else None}
    spec = ActionSpec("circle-weights", name, canonical, cap)
    spec.action = CircleWeightAction(tuple(weights), trivial, basis)
    return spec


def _group_table(node) -> tuple[FiniteGroupTable, dict]:
    g = _mapping(node, "group")
    if len(g) != 1:
        raise _err(node, "group must have exactly one of: cyclic, symmetric, table")
    (key, val), = g.items()
    if key == "cyclic":
        n = _int(val, "cyclic order", 1)
        return FiniteGroupTable.cyclic(n), {"cyclic": n}
    if key == "symmetric":
        n = _int(val, "symmetric degree", 1)
        if n > 5:
            raise _err(val, "symmetric degree above 5 is not supported")
        return FiniteGroupTable.symmetric(n), {"symmetric": n}
    if key == "table":
        rows = [_int_table(r, "table row") for r in _seq(val, "table")]
        n = len(rows)
        if any(len(r) != n or any(v >= n for v in r) for r in rows):
            raise _err(val, "table must be square with entries below its size")
        t = FiniteGroupTable(tuple(tuple(r) for r in rows))
        try:
            t.identity
            for a in range(n):
                t.inverse(a)
        except ValueError as exc:
            raise _err(val, str(exc)) from None
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                        raise _err(val, f"table is not associative at ({a}, {b}, {c})")
        return t, {"table": rows}
    raise _err(node, f"unknown group description {key!r}")


def _groupoid_from(node) -> tuple[FiniteGroupoid, dict]:
    m = _mapping(node, "groupoid")
    if "group" in m:
        table, desc = _group_table(m["group"])
        if "action" in m:
            act = [_int_table(r, "action row") for r in _seq(m["action"], "action")]
            try:
                g = translation_groupoid(table, act)
            except ValueError as exc:
                raise _err(m["action"], f"invalid action table: {exc}") from None
            return g, {"group": desc, "action": act}
        return one_object(table), {"group": desc}
    if "objects" in m:
        n = _int(m["objects"], "objects", 0)
        need = ("src", "tgt", "unit", "inv", "mul")
        for k in need:
            if k not in m:
                raise _err(node, f"explicit groupoid needs {k!r}")
        src, tgt = _int_table(m["src"], "src"), _int_table(m["tgt"], "tgt")
        unit, inv = _int_table(m["unit"], "unit"), _int_table(m["inv"], "inv")
        mul = {}
        for row in _seq(m["mul"], "mul"):
            trip = _int_table(row, "mul entry")
            if len(trip) != 3:
                raise _err(row, "mul entries are [a, b, a*b]")
            mul[(trip[0], trip[1])] = trip[2]
        g = FiniteGroupoid(n, tuple(src), tuple(tgt), tuple(unit), tuple(inv), mul)
        return g, {"objects": n, "src": src, "tgt": tgt, "unit": unit, "inv": inv,
                   "mul": sorted([a, b, c] for (a, b), c in mul.items())}
    raise _err(node, "groupoid needs either 'group' or 'objects'")


def _groupoid(top, root, name, cap) -> ActionSpec:
    if "groupoid" not in top:
        raise _err(root, "finite-groupoid spec needs 'groupoid'")
    g, desc = _groupoid_from(top["groupoid"])
    canonical: dict = {"kind": "finite-groupoid", "groupoid": desc}
    spec = ActionSpec("finite-groupoid", name, canonical, cap, groupoid=g)
    if "other" in top:
        h, hdesc = _groupoid_from(top["other"])
        spec.extras["other"] = h
        canonical["other"] = hdesc
    if "cover" in top:
        c = _mapping(top["cover"], "cover")
        if "f" not in c:
            raise _err(top["cover"], "cover needs 'f'")
        f = _int_table(c["f"], "cover f")
        if any(v >= g.n_objects for v in f):
            raise _err(c["f"], "cover f maps outside the objects")
        spec.extras["f"] = f
        canonical["cover"] = {"f": f}
        if "g" in c:
            k = _int_table(c["g"], "cover g")
            other = spec.extras.get("other")
            if other is None:
                raise _err(c["g"], "cover g needs an 'other' groupoid")
            if any(v >= other.n_objects for v in k):
                raise _err(c["g"], "cover g maps outside the other objects")
            spec.extras["g"] = k
            canonical["cover"]["g"] = k
    if "subgroupoid" in top:
        objs = _int_table(top["subgroupoid"], "subgroupoid")
        if any(v >= g.n_objects for v in objs):
            raise _err(top["subgroupoid"], "subgroupoid object out of range")
        spec.extras["subgroupoid"] = objs
        canonical["subgroupoid"] = objs
    return spec


# ---------------------------------------------------------------------------
# shipped specs


def example_names() -> list[str]:
    root = resources.files("strata_lab") / "specs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def example_text(name: str) -> str:
    path = resources.files("strata_lab") / "specs" / f"{name}.yaml"
    if not path.is_file():
        raise SpecError(f"no shipped example {name!r}; available: {', '.join(example_names())}")
    return path.read_text()


def load_example(name: str, cap: int | None = None) -> ActionSpec:
    return load_spec(example_text(name), cap)


def load_file(path: str | Path, cap: int | None = None) -> ActionSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    return load_spec(text, cap)
