"""Command-line entry point: ``stlsq {solve,identify,reproduce}``.

Exit codes: 0 success, 2 parse/config error, 3 rank failure, 4 empty initial
support, 5 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from stlsq.dictionary import DimensionError
from stlsq.dynamics import write_timeseries_csv
from stlsq.numkernel import RankDeficientError
from stlsq.pipeline import ConfigError, IdentifyConfig, identify, seed_from_env
from stlsq.reproduce import CASES, DEFAULT_SEED, format_checks, run_case
from stlsq.solver import EMPTY_INITIAL_SUPPORT, SolverParams, sindy_solve

EXIT_OK, EXIT_PARSE, EXIT_RANK, EXIT_EMPTY, EXIT_MISMATCH = 0, 2, 3, 4, 5


class ParseError(ValueError):
    pass


def read_matrix_csv(path):
    """Numeric CSV without header; errors name the file, row and column (1-based)."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise ParseError(f"{path}: file contains no data")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}: row {i + 1} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: row {i + 1}, column {j + 1}: not a number: {cell!r}") from None
            if not np.isfinite(out[i, j]):
                raise ParseError(f"{path}: row {i + 1}, column {j + 1}: non-finite value")
    return out


def read_vector_csv(path):
    M = read_matrix_csv(path)
    if M.shape[1] == 1:
        return M[:, 0]
    if M.shape[0] == 1:
        return M[0]
    raise ParseError(f"{path}: expected a single row or column, got shape {M.shape}")


def write_vector_csv(path, x, labels=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "term", "value"] if labels is not None else ["index", "value"])
        for j, v in enumerate(x):
            row = [j] + ([str(labels[j])] if labels is not None else []) + [repr(float(v))]
            w.writerow(row)


def read_solution_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return np.array([float(r[-1]) for r in rows[1:]])


def _dump_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_solve(args):
    A = read_matrix_csv(args.A)
    b = read_vector_csv(args.b)
    if A.shape[0] != b.shape[0]:
        raise ParseError(f"{args.A} has {A.shape[0]} rows but {args.b} has {b.shape[0]} entries")
    params = SolverParams(args.lam, args.gamma or 0.0)
    sol, trace = sindy_solve(A, b, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_vector_csv(out / "solution.csv", sol.x)
    report = {
        "lambda": args.lam,
        "gamma": args.gamma or 0.0,
        "shape": list(A.shape),
        "support": sol.support.tolist(),
        "residual_norm": sol.residual_norm,
        "objective": sol.objective,
        "trace": trace.to_dict(),
    }
    _dump_json(out / "trace.json", report)
    print(f"status={trace.status} refinements={trace.refinements} support={sol.support.tolist()}")
    for k, F in enumerate(trace.objective_values):
        print(f"  F(x{k}) = {F:.4f}   |Ax-b| = {trace.residual_norms[k]:.6g}")
    if trace.status == EMPTY_INITIAL_SUPPORT:
        print("warning: no coefficient of the least-squares start reaches lambda; "
              "returned the zero solution", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def identify_report(res):
    """JSON-ready run report; ``wall_time`` is the only non-deterministic field."""
    return {
        "config": res.config.to_dict(),
        "metrics": res.metrics,
        "terms": [str(lab) for lab in res.labels],
        "coefficients": res.coefficients.T.tolist(),
        "wall_time": res.wall_time,
    }


def cmd_identify(args):
    try:
        raw = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"{args.config}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    cfg = IdentifyConfig.from_dict(raw)
    cfg.seed = seed_from_env(cfg.seed)
    res = identify(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = res.coefficients.shape[1]
    with open(out / "coefficients.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["term"] + [f"du{i + 1}/dt" for i in range(d)])
        for j, lab in enumerate(res.labels):
            w.writerow([str(lab)] + [repr(float(v)) for v in res.coefficients[j]])
    _dump_json(out / "report.json", identify_report(res))
    _dump_json(out / "metrics.json", res.metrics)
    _dump_json(out / "traces.json", [t.to_dict() for t in res.traces])
    write_timeseries_csv(out / "data.csv", res.noisy)
    if res.resimulated is not None:
        write_timeseries_csv(out / "resimulated.csv", res.resimulated)

    m = res.metrics
    for i, terms in enumerate(m["supports"]):
        coef = [res.coefficients[res.labels.index(lab), i] for lab in res.labels if str(lab) in terms]
        rhs = " + ".join(f"{c:.4f}*{t}" for c, t in zip(coef, terms)) or "0"
        print(f"du{i + 1}/dt = {rhs}")
    if m["snr"] is not None:
        print(f"SNR = {m['snr']:.4f} dB")
    if m["relative_error"] is not None:
        print(f"relative error = {m['relative_error']:.4f}")
    if EMPTY_INITIAL_SUPPORT in m["statuses"]:
        print("warning: an equation had an empty initial support", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_reproduce(args):
    seed = args.seed
    if seed is None and args.case in ("lorenz", "thomas"):
        seed = seed_from_env(DEFAULT_SEED)
    checks = run_case(args.case, seed)
    print(f"case: {args.case}" + (f" (noise seed {seed})" if seed is not None else ""))
    print(format_checks(checks))
    failed = [c for c in checks if c.ok is False]
    print("FAIL" if failed else "PASS")
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stlsq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="sparse solve of Ax=b from CSV files")
    s.add_argument("--A", required=True, help="matrix CSV (no header)")
    s.add_argument("--b", required=True, help="right-hand side CSV (one row or column)")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--gamma", type=float, default=None, help="ridge weight (enables STRidge)")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("identify", help="simulate and identify a dynamical system")
    s.add_argument("--config", required=True, help="JSON run configuration")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_identify)

    s = sub.add_parser("reproduce", help="rerun a published example and compare")
    s.add_argument("--case", required=True, choices=sorted(CASES))
    s.add_argument("--seed", type=int, default=None, help="noise seed for lorenz/thomas")
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (ParseError, ConfigError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RankDeficientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.command != "reproduce":
        print(f"wall time {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
