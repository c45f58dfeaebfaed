"""Command-line front end for plan evaluation, search and reporting.

Subcommands: evaluate, search, enumerate, scan-dates, stats, plot.
Runs write JSON results plus CSV tables and an SVG figure into the
output directory; everything except timing.json is reproducible bit for
bit from the config and seed.  Exit codes: 0 success, 1 usage error,
2 infeasible or empty outcome, 3 I/O failure.
"""

import argparse
import csv
import json
import os
import re
import sys
import time

import numpy as np

from . import plotting
from .baselines import (ENUMERATION_CAP, canonical_space, enumerate_all,
                        enumeration_by_sequence, random_search, unrank)
from .config import config_from_dict, load_config, with_overrides
from .errors import (InfeasiblePlan, MalformedSolution, MgaError,
                     SpaceTooLarge)
from .legs import evaluate_plan
from .planner import (best_by_sequence, decode, search, sequence_code,
                      type_tables)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EMPTY = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _record_dict(record):
    return {
        "lambdas": list(record.lambdas),
        "leg_times": list(record.leg_times),
        "leg_dv": list(record.leg_dv),
        "v0": record.v0,
        "v_inf_arrival": record.v_inf_arrival,
        "total_T": record.total_T,
        "f_obj": record.f_obj,
        "path_id": record.path_id,
    }


def _record_row(record):
    join = lambda vals: ";".join(repr(float(v)) for v in vals)
    return [record.path_id, repr(record.f_obj), repr(record.v_inf_arrival),
            repr(record.v0), repr(record.total_T), join(record.lambdas),
            join(record.leg_times), join(record.leg_dv)]


_RECORD_HEADER = ["path", "f_obj", "v_inf_arrival", "v0", "total_T_days",
                  "lambdas", "leg_times_days", "leg_dv_kms"]


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=1)
        f.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _parse_vector(text):
    parts = [p for p in re.split(r"[\s,]+", text.strip()) if p]
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise MalformedSolution(f"vector entries must be integers: {text!r}")


def _sequence_table(problem, entries):
    rows = []
    for code, e in best_by_sequence(problem, entries):
        r = e.record
        rows.append([code, repr(e.f_obj), repr(r.v_inf_arrival),
                     repr(float(sum(r.leg_dv))), repr(r.total_T),
                     " ".join(str(v) for v in e.s)])
    return rows


_SEQ_HEADER = ["sequence", "f_obj", "v_inf_arrival", "dv_total_kms",
               "total_T_days", "s"]


def cmd_evaluate(args):
    cfg = load_config(args.config)
    s = _parse_vector(args.vector)
    plan = decode(s, cfg.problem)
    try:
        ev = evaluate_plan(plan, cfg.problem)
    except InfeasiblePlan as err:
        print(f"infeasible at leg {err.leg}")
        return EXIT_EMPTY
    code = sequence_code(cfg.problem, plan.targets)
    print(",".join(_RECORD_HEADER))
    for rec in ev.records:
        print(",".join(_record_row(rec)))
    print(f"# sequence {code} branches {len(ev.records)} "
          f"f_obj {ev.f_obj!r}")
    if args.out:
        out = _ensure_dir(args.out)
        _write_json(os.path.join(out, "evaluate.json"), {
            "kind": "evaluate", "config": cfg.raw,
            "vector": list(s), "sequence": code, "f_obj": ev.f_obj,
            "records": [_record_dict(r) for r in ev.records]})
        _write_csv(os.path.join(out, "evaluate.csv"), _RECORD_HEADER,
                   [_record_row(r) for r in ev.records])
        plotting.render_branch(
            cfg.problem, plan, ev.records[0].lambdas,
            os.path.join(out, "trajectory.svg"),
            title=f"{code}  f_obj={ev.f_obj:.4f} km/s")
    return EXIT_OK


def _entry_dict(e):
    return {"s": list(e.s), "f_obj": e.f_obj, "record": _record_dict(e.record)}


def cmd_search(args):
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, seed=args.seed, n_eval_max=args.max_evals)
    t0 = time.perf_counter()
    result = search(cfg.problem, cfg.search)
    wall = time.perf_counter() - t0
    out = _ensure_dir(args.out)
    stats = result.stats
    _write_json(os.path.join(out, "results.json"), {
        "kind": "search", "config": cfg.raw,
        "entries": [_entry_dict(e) for e in result.entries],
        "stats": {
            "n_eval": stats.n_eval, "n_iterations": stats.n_iterations,
            "n_constructed": stats.n_constructed,
            "n_discarded": stats.n_discarded,
            "n_duplicates": stats.n_duplicates,
            "n_feasible": stats.n_feasible,
            "step_iterations": list(stats.step_iterations)}})
    rows = []
    for k, e in enumerate(result.entries):
        r = e.record
        rows.append([k, " ".join(str(v) for v in e.s),
                     sequence_code(cfg.problem, decode(e.s, cfg.problem).targets),
                     repr(e.f_obj), repr(r.v_inf_arrival), repr(r.v0),
                     repr(r.total_T), r.path_id])
    _write_csv(os.path.join(out, "entries.csv"),
               ["rank", "s", "sequence", "f_obj", "v_inf_arrival", "v0",
                "total_T_days", "path"], rows)
    _write_csv(os.path.join(out, "sequences.csv"), _SEQ_HEADER,
               _sequence_table(cfg.problem, result.entries))
    _write_json(os.path.join(out, "timing.json"), {"wall_time_s": wall})
    if result.entries:
        best = result.entries[0]
        code = sequence_code(cfg.problem, decode(best.s, cfg.problem).targets)
        plotting.render_branch(
            cfg.problem, decode(best.s, cfg.problem), best.record.lambdas,
            os.path.join(out, "best.svg"),
            title=f"{code}  f_obj={best.f_obj:.4f} km/s")
        print(f"feasible {len(result.entries)} best {best.f_obj!r} "
              f"sequence {code} evals {stats.n_eval}")
        return EXIT_OK
    print(f"no feasible solution in {stats.n_eval} evaluations")
    return EXIT_EMPTY


def cmd_enumerate(args):
    cfg = load_config(args.config)
    cap = args.cap if args.cap is not None else ENUMERATION_CAP
    try:
        report = enumerate_all(cfg.problem, cap=cap)
    except SpaceTooLarge as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_USAGE
    out = _ensure_dir(args.out)
    seq_rows = enumeration_by_sequence(cfg.problem, report)
    best = None
    if report.best is not None:
        best = {"index": report.best_index, "s": list(report.best.s),
                "f_obj": report.best.f_obj,
                "sequence": sequence_code(
                    cfg.problem,
                    decode(report.best.s, cfg.problem).targets),
                "record": _record_dict(report.best.record)}
    _write_json(os.path.join(out, "enumeration.json"), {
        "kind": "enumeration", "config": cfg.raw,
        "n_raw": report.n_raw, "n_canonical": report.n_canonical,
        "n_feasible": report.n_feasible, "best": best,
        "sequences": [{"sequence": c, "f_obj": f, "index": k}
                      for c, f, k in seq_rows]})
    tables = type_tables(cfg.problem)
    canon_rows, _, _ = canonical_space(cfg.problem, tables)
    codes = [[cfg.problem.catalog[n].code or n for n in sets.targets]
             for sets in cfg.problem.legs]
    p0 = cfg.problem.catalog[cfg.problem.P0].code or cfg.problem.P0
    with open(os.path.join(out, "outcomes.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "s", "sequence", "f_obj", "l_u"])
        for k in range(report.n_canonical):
            s = unrank(cfg.problem, k, tables, canon_rows)
            seq = p0 + "".join(codes[i][s[2 * i] - 1]
                               for i in range(cfg.problem.n_p))
            fo = report.f_obj[k]
            w.writerow([k, " ".join(str(v) for v in s), seq,
                        "" if np.isnan(fo) else repr(float(fo)),
                        int(report.l_u[k])])
    _write_csv(os.path.join(out, "sequences.csv"),
               ["sequence", "f_obj", "index"],
               [[c, repr(f), k] for c, f, k in seq_rows])
    _write_json(os.path.join(out, "timing.json"),
                {"wall_time_s": report.wall_time_s})
    if report.best is not None:
        plotting.render_branch(
            cfg.problem, decode(report.best.s, cfg.problem),
            report.best.record.lambdas, os.path.join(out, "best.svg"),
            title=f"{best['sequence']}  f_obj={report.best.f_obj:.4f} km/s")
        print(f"canonical {report.n_canonical} (raw {report.n_raw}) "
              f"feasible {report.n_feasible} best {report.best.f_obj!r} "
              f"sequence {best['sequence']}")
        return EXIT_OK
    print(f"canonical {report.n_canonical} (raw {report.n_raw}): "
          "no feasible solution")
    return EXIT_EMPTY


def cmd_scan_dates(args):
    cfg = load_config(args.config)
    if cfg.scan is None:
        print("config has no scan window", file=sys.stderr)
        return EXIT_USAGE
    reps = args.reps if args.reps is not None else cfg.reps
    seed0 = args.seed if args.seed is not None else cfg.search.seed
    t_start = time.perf_counter()
    rows = []
    for date in cfg.scan.dates():
        best = None
        n_eval = 0
        for r in range(reps):
            run_cfg = with_overrides(cfg, seed=seed0 + r, t0=date)
            result = search(run_cfg.problem, run_cfg.search)
            n_eval += result.stats.n_eval
            if result.entries:
                cand = result.entries[0]
                if best is None or (cand.f_obj, cand.total_T, cand.s) < \
                        (best.f_obj, best.total_T, best.s):
                    best = cand
        if best is None:
            rows.append({"t0": date, "status": "infeasible",
                         "sequence": "", "f_obj": None, "s": None,
                         "n_eval": n_eval})
        else:
            prob = with_overrides(cfg, t0=date).problem
            rows.append({
                "t0": date, "status": "feasible",
                "sequence": sequence_code(prob, decode(best.s, prob).targets),
                "f_obj": best.f_obj, "s": list(best.s),
                "record": _record_dict(best.record), "n_eval": n_eval})
    wall = time.perf_counter() - t_start
    out = _ensure_dir(args.out)
    _write_json(os.path.join(out, "scan.json"),
                {"kind": "scan", "config": cfg.raw, "reps": reps,
                 "seed": seed0, "rows": rows})
    _write_csv(os.path.join(out, "scan.csv"),
               ["t0_days", "status", "sequence", "f_obj", "n_eval"],
               [[row["t0"], row["status"], row["sequence"],
                 "" if row["f_obj"] is None else repr(row["f_obj"]),
                 row["n_eval"]] for row in rows])
    plotting.render_scan([(row["t0"], row["f_obj"]) for row in rows],
                         os.path.join(out, "scan.svg"))
    _write_json(os.path.join(out, "timing.json"), {"wall_time_s": wall})
    n_ok = sum(row["status"] == "feasible" for row in rows)
    for row in rows:
        fo = "-" if row["f_obj"] is None else repr(row["f_obj"])
        print(f"t0 {row['t0']}: {row['sequence'] or row['status']} {fo}")
    return EXIT_OK if n_ok else EXIT_EMPTY


def cmd_stats(args):
    cfg = load_config(args.config)
    reps = args.reps if args.reps is not None else cfg.reps
    seed0 = args.seed if args.seed is not None else cfg.search.seed
    t_start = time.perf_counter()
    runs = []
    for r in range(reps):
        run_cfg = with_overrides(cfg, seed=seed0 + r)
        result = search(run_cfg.problem, run_cfg.search)
        row = {"seed": seed0 + r, "n_eval": result.stats.n_eval,
               "feasible": bool(result.entries),
               "best_f_obj": result.entries[0].f_obj if result.entries
               else None}
        if args.baseline == "random":
            base = random_search(cfg.problem, cfg.search.n_eval_max,
                                 seed=seed0 + r)
            row["random_best_f_obj"] = (base.entries[0].f_obj
                                        if base.entries else None)
        runs.append(row)
    wall = time.perf_counter() - t_start

    bests = [r["best_f_obj"] for r in runs if r["best_f_obj"] is not None]
    summary = {
        "reps": reps, "seed": seed0,
        "feasible_rate": sum(r["feasible"] for r in runs) / reps,
        "mean_best_f_obj": float(np.mean(bests)) if bests else None,
        "mean_n_eval": float(np.mean([r["n_eval"] for r in runs])),
    }
    thr = cfg.success_threshold
    if thr is not None:
        summary["success_threshold"] = thr
        summary["success_rate"] = sum(
            b < thr for b in bests) / reps
        if args.baseline == "random":
            summary["random_success_rate"] = sum(
                r["random_best_f_obj"] is not None
                and r["random_best_f_obj"] < thr for r in runs) / reps
    out = _ensure_dir(args.out)
    _write_json(os.path.join(out, "stats.json"),
                {"kind": "stats", "config": cfg.raw, "summary": summary,
                 "runs": runs})
    header = ["seed", "n_eval", "feasible", "best_f_obj"]
    if args.baseline == "random":
        header.append("random_best_f_obj")
    _write_csv(os.path.join(out, "runs.csv"), header,
               [[row.get(k, "") for k in header] for row in runs])
    plotting.render_histogram(bests, os.path.join(out, "hist.svg"),
                              threshold=thr)
    _write_json(os.path.join(out, "timing.json"), {"wall_time_s": wall})
    for key, val in summary.items():
        print(f"{key}: {val}")
    return EXIT_OK if bests else EXIT_EMPTY


def cmd_plot(args):
    with open(args.results) as f:
        doc = json.load(f)
    cfg = config_from_dict(doc["config"])
    kind = doc.get("kind", "search")
    if kind == "evaluate":
        vector = doc["vector"]
    elif kind == "enumeration":
        if doc.get("best") is None:
            print("results hold no feasible solution", file=sys.stderr)
            return EXIT_EMPTY
        vector = doc["best"]["s"]
    else:
        entries = doc.get("entries", [])
        if not entries:
            print("results hold no feasible solution", file=sys.stderr)
            return EXIT_EMPTY
        if not 0 <= args.solution < len(entries):
            print(f"solution index {args.solution} out of range "
                  f"(0..{len(entries) - 1})", file=sys.stderr)
            return EXIT_USAGE
        vector = entries[args.solution]["s"]
    plan = decode(tuple(vector), cfg.problem)
    ev = evaluate_plan(plan, cfg.problem)
    record = ev.records[0]
    if args.branch:
        matches = [r for r in ev.records if r.path_id == args.branch]
        if not matches:
            known = ", ".join(r.path_id for r in ev.records)
            print(f"no branch {args.branch!r}; available: {known}",
                  file=sys.stderr)
            return EXIT_USAGE
        record = matches[0]
    code = sequence_code(cfg.problem, plan.targets)
    plotting.render_branch(
        cfg.problem, plan, record.lambdas, args.out,
        title=f"{code}  branch {record.path_id}  "
              f"f_obj={record.f_obj:.4f} km/s")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="mgaplan",
                     description="Planar multi-gravity-assist plan search")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p, out_default="mgaplan-out"):
        p.add_argument("--config", required=True,
                       help="config file path or packaged config name")
        p.add_argument("--out", default=out_default,
                       help="output directory")

    p = sub.add_parser("evaluate", help="evaluate one solution vector")
    p.add_argument("--config", required=True)
    p.add_argument("vector", help="solution vector, e.g. '1,1 2,37 1,6 1,1'")
    p.add_argument("--out", default=None,
                   help="optional directory for JSON/CSV/SVG output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("search", help="run the colony search once")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-evals", type=int, default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("enumerate", help="exhaustive scan of the space")
    common(p)
    p.add_argument("--cap", type=int, default=None,
                   help="refuse above this many canonical solutions")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("scan-dates", help="repeat the search over a "
                                          "launch-date grid")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.set_defaults(func=cmd_scan_dates)

    p = sub.add_parser("stats", help="seeded repetition campaign")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--baseline", choices=["none", "random"], default="none")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="render a stored solution to SVG")
    p.add_argument("--results", required=True, help="a results JSON file")
    p.add_argument("--solution", type=int, default=0,
                   help="entry index in the results file")
    p.add_argument("--branch", default=None, help="branch path id")
    p.add_argument("--out", default="trajectory.svg")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MalformedSolution as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, OSError) as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except (MgaError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
