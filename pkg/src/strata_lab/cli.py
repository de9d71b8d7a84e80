"""Command line entry point: ``strata-lab <command> [options]``.

Exit codes: 0 success, 1 an invariant or probe failed, 2 usage or parse
error, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import oracle
from .cohomology import basic_cohomology
from .forms import homotopy_identity_check, horizontal_part_check, reynolds
from .groupoids import (
    full_subgroupoid,
    inertia_groupoid,
    loop_space,
    morita_check,
    orbits,
    pullback_groupoid,
    validate,
    weak_equivalence_check,
)
from .groups import GroupTooLarge
from .linalg import DimensionError
from .report import dumps, envelope, hasse_dot, inertia_payload, strata_payload, strata_table
from .spec_io import ActionSpec, SpecError, example_names, load_example, load_file
from .strata import inertia_strata, loop_strata
from .whitney import InvariantMap, NotIncidentError, ProbeConfig, probe_quotient_whitney, probe_whitney_b

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="FILE", help="spec file (YAML)")
    src.add_argument("--example", metavar="NAME", help="use a shipped spec: " + ", ".join(example_names()))
    common.add_argument("--json", metavar="FILE", help="write the JSON report to FILE")
    common.add_argument("--dot", metavar="FILE", help="write the Hasse diagram in DOT format")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-degree", type=int, default=5, metavar="D")
    common.add_argument("--cap", type=int, default=None, metavar="N", help="group order cap")
    common.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")

    p = argparse.ArgumentParser(prog="strata-lab",
                                description="Exact stratification of loop and inertia spaces of linear group actions.",
                                epilog="exit codes: 0 ok, 1 invariant failure, 2 usage or parse error, 3 resource cap")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("strata", parents=[common], help="loop space strata, closure order, depth")
    s.add_argument("--inertia", action="store_true", help="also report the inertia space strata")
    v = sub.add_parser("validate", parents=[common], help="sampling checks of the stratification")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--check-file", metavar="FILE", help="check a strata JSON report instead of the computed order")
    sub.add_parser("derham", parents=[common], help="basic cohomology and form identities")
    g = sub.add_parser("groupoid", parents=[common], help="finite groupoid calculus")
    g.add_argument("--op", default="summary",
                   choices=("summary", "validate", "inertia", "loop", "orbits", "pullback", "morita", "weak"))
    w = sub.add_parser("whitney", parents=[common], help="numerical Whitney B probes")
    w.add_argument("--base", type=int)
    w.add_argument("--upper", type=int)
    w.add_argument("--samples-per-scale", type=int, default=32)
    w.add_argument("--tolerance", type=float, default=1e-6)
    return p


def _load(args) -> ActionSpec:
    if args.cap is not None and args.cap < 1:
        raise UsageError("--cap must be positive")
    if args.example:
        return load_example(args.example, args.cap)
    if args.input:
        return load_file(args.input, args.cap)
    raise UsageError("one of --input or --example is required")


def _need_action(spec: ActionSpec):
    if spec.action is None:
        raise UsageError(f"this command needs an action spec, got {spec.kind}")
    return spec.action


def _need_groupoid(spec: ActionSpec):
    if spec.groupoid is None:
        raise UsageError(f"this command needs a finite-groupoid spec, got {spec.kind}")
    return spec.groupoid


# ---------------------------------------------------------------------------
# commands


def cmd_strata(spec: ActionSpec, args) -> tuple[dict, str, int]:
    result = loop_strata(_need_action(spec))
    payload = strata_payload(result)
    text = strata_table(payload)
    if args.inertia:
        payload["inertia"] = inertia_payload(inertia_strata(result))
        text += "inertia: " + ", ".join(
            f'{r["id"]}: dim {r["dim"]}, comps {r["components"]}' for r in payload["inertia"]["strata"]) + "\n"
    if args.dot:
        Path(args.dot).write_text(hasse_dot(payload, spec.name))
    return payload, text, EXIT_OK


def _claimed_order(path: str, n: int) -> tuple[set, list]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read strata file {path}: {exc}") from None
    res = data.get("results", data)
    rows = res.get("strata")
    if not isinstance(rows, list):
        raise UsageError("strata file has no 'strata' table")
    if "order" in res:
        claimed = {tuple(e) for e in res["order"]}
    else:
        claimed = oracle.closure_from_hasse(len(rows), res.get("hasse", []))
    return claimed, rows


def cmd_validate(spec: ActionSpec, args) -> tuple[dict, str, int]:
    if spec.groupoid is not None:
        g = spec.groupoid
        checks = [{"invariant": "groupoid-axioms", "passed": validate(g).valid, "checked": g.n_arrows,
                   "counterexamples": validate(g).violations[:10]}]
        inert = validate(inertia_groupoid(g))
        checks.append({"invariant": "inertia-axioms", "passed": inert.valid, "checked": 1,
                       "counterexamples": inert.violations[:10]})
    else:
        result = loop_strata(spec.action)
        checks = [oracle.check_partition(result, args.samples, args.seed).to_json()]
        if args.check_file:
            claimed, rows = _claimed_order(args.check_file, len(result.strata))
            table = []
            if len(rows) != len(result.strata):
                table.append({"reason": "stratum count", "file": len(rows), "computed": len(result.strata)})
            else:
                for r, s in zip(rows, result.strata):
                    if r.get("dim") != s.dim:
                        table.append({"reason": "dim", "stratum": s.id, "file": r.get("dim"), "computed": s.dim})
            checks.append({"invariant": "strata-table", "passed": not table, "checked": len(rows),
                           "counterexamples": table[:10]})
            bad = [{"reason": "partial order", "pair": list(e)} for e in claimed
                   if tuple(reversed(e)) in claimed and e[0] != e[1]]
            checks.append({"invariant": "order-axioms", "passed": not bad, "checked": len(claimed),
                           "counterexamples": bad[:10]})
            checks.append(oracle.check_frontier_claims(result, claimed, args.seed).to_json())
        else:
            checks.append(oracle.check_frontier(result, args.seed).to_json())
        checks.append(oracle.check_local_contractibility(result, seed=args.seed).to_json())
    ok = all(c["passed"] for c in checks)
    text = "".join(f'{"PASS" if c["passed"] else "FAIL"}  {c["invariant"]} ({c["checked"]} checked)\n'
                   for c in checks)
    return {"checks": checks, "passed": ok}, text, EXIT_OK if ok else EXIT_INVARIANT


def cmd_derham(spec: ActionSpec, args) -> tuple[dict, str, int]:
    action = _need_action(spec)
    if args.max_degree < 1:
        raise UsageError("--max-degree must be at least 1")
    coh = basic_cohomology(action, args.max_degree)
    expected = (1,) + (0,) * (len(coh.betti) - 1)
    forms = []
    ok = coh.betti == expected
    for w in spec.extras.get("forms", []):
        resid = homotopy_identity_check(w)
        avg = reynolds(w, action)
        hor = horizontal_part_check(avg, action)
        entry = {
            "form": str(w),
            "homotopy_residual": str(resid),
            "d_squared": str(w.d().d()),
            "reynolds": str(avg),
            "reynolds_idempotent": reynolds(avg, action) == avg,
            "average_horizontal": hor.horizontal,
            "trivially_horizontal": hor.trivially_horizontal,
        }
        ok = ok and resid.is_zero() and w.d().d().is_zero() and entry["reynolds_idempotent"]
        forms.append(entry)
    payload = {"basic_cohomology": coh.to_json(), "acyclic": coh.betti == expected, "forms": forms}
    text = f"betti (D = {args.max_degree}): {coh.betti}\n"
    for f in forms:
        text += f'{f["form"]}: residual {f["homotopy_residual"]}, average {f["reynolds"]}\n'
    return payload, text, EXIT_OK if ok else EXIT_INVARIANT


def cmd_groupoid(spec: ActionSpec, args) -> tuple[dict, str, int]:
    g = _need_groupoid(spec)
    op = args.op
    rep = validate(g)
    payload: dict = {"objects": g.n_objects, "arrows": g.n_arrows, "valid": rep.valid,
                     "violations": rep.violations[:20]}
    code = EXIT_OK if rep.valid else EXIT_INVARIANT
    if not rep.valid:
        return payload, "invalid groupoid:\n" + "\n".join(rep.violations[:20]) + "\n", code
    if op in ("summary", "orbits"):
        payload["orbits"] = [list(o) for o in orbits(g)]
    if op in ("summary", "loop"):
        payload["loop_space"] = loop_space(g)
    if op in ("summary", "inertia"):
        inert = inertia_groupoid(g)
        payload["inertia"] = {"objects": inert.n_objects, "arrows": inert.n_arrows,
                              "valid": validate(inert).valid, "orbit_count": len(orbits(inert))}
    if op in ("summary", "pullback") and "f" in spec.extras:
        pb = pullback_groupoid(g, spec.extras["f"])
        payload["pullback"] = {"objects": pb.n_objects, "arrows": pb.n_arrows,
                               "orbit_count": len(orbits(pb)), "valid": validate(pb).valid}
    if op in ("summary", "morita") and "other" in spec.extras:
        if "g" not in spec.extras:
            raise UsageError("morita check needs cover maps f and g")
        v = morita_check(g, spec.extras["other"], spec.extras["f"], spec.extras["g"])
        payload["morita"] = {"verdict": v.verdict, "reason": v.reason,
                             "object_map": list(v.object_map) if v.object_map else None}
    if op in ("summary", "weak") and "subgroupoid" in spec.extras:
        w = weak_equivalence_check(full_subgroupoid(g, spec.extras["subgroupoid"]))
        payload["weak_equivalence"] = {"verdict": w.verdict, "essentially_surjective": w.essentially_surjective,
                                       "fully_faithful": w.fully_faithful, "reason": w.reason}
    if op == "morita" and "morita" not in payload:
        raise UsageError("morita check needs an 'other' groupoid and cover maps")
    if op == "weak" and "weak_equivalence" not in payload:
        raise UsageError("weak equivalence check needs 'subgroupoid'")
    if op == "pullback" and "pullback" not in payload:
        raise UsageError("pullback needs a cover map f")
    text = "".join(f"{k}: {json.dumps(v)}\n" for k, v in payload.items() if k != "violations")
    return payload, text, code


def cmd_whitney(spec: ActionSpec, args) -> tuple[dict, str, int]:
    action = _need_action(spec)
    result = loop_strata(action)
    if (args.base is None) != (args.upper is None):
        raise UsageError("--base and --upper go together")
    pairs = [(args.base, args.upper)] if args.base is not None else sorted(result.order)
    probes, quotient = [], []
    inv = InvariantMap(tuple(spec.extras["invariants"])) if "invariants" in spec.extras else None
    for b, u in pairs:
        cfg = ProbeConfig(b, u, samples_per_scale=args.samples_per_scale, angle_tolerance=args.tolerance,
                          seed=args.seed)
        probes.append(probe_whitney_b(result, cfg))
        if inv is not None:
            quotient.append(probe_quotient_whitney(result, inv, cfg))
    ok = all(p["verdict"] == "pass" for p in probes + quotient)
    payload = {"probes": probes, "quotient_probes": quotient, "passed": ok}
    text = ""
    for p in probes + quotient:
        worst = max((r["max_angle"] for r in p["scales"] if r["max_angle"] is not None), default=None)
        text += f'{p["probe"]} {p["base"]} < {p["upper"]}: {p["verdict"]} (max angle {worst})\n'
    return payload, text, EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {"strata": cmd_strata, "validate": cmd_validate, "derham": cmd_derham,
            "groupoid": cmd_groupoid, "whitney": cmd_whitney}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        spec = _load(args)
        payload, text, code = COMMANDS[args.command](spec, args)
    except (SpecError, UsageError, NotIncidentError) as exc:
        print(f"strata-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GroupTooLarge, DimensionError) as exc:
        print(f"strata-lab: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    elapsed = time.perf_counter() - start if args.timing else None
    report = envelope(args.command, spec.digest, payload, elapsed)
    if args.json:
        Path(args.json).write_text(dumps(report))
    sys.stdout.write(dumps(report) if args.format == "json" else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
