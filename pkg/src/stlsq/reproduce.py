"""Named reproduction cases comparing computed values with published ones."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stlsq import fixtures as fx
from stlsq.pipeline import IdentifyConfig, identify
from stlsq.solver import SolverParams, sindy_solve

# noise seed for the single-draw identification cases; recovery of the exact
# support is seed dependent (see README)
DEFAULT_SEED = 12


@dataclass
class Check:
    name: str
    got: str
    expected: str
    tol: str
    ok: bool | None  # None: informational only


def _vec(v, digits=4):
    return "(" + ", ".join(f"{x:.{digits}f}" for x in np.asarray(v)) + ")"


def _close(name, got, expected, tol, digits=4):
    got = np.asarray(got, dtype=float)
    expected = np.asarray(expected, dtype=float)
    ok = got.shape == expected.shape and bool(np.max(np.abs(got - expected)) <= tol)
    return Check(name, _vec(got, digits), _vec(expected, digits), f"{tol:g}", ok)


def _equal(name, got, expected):
    return Check(name, str(got), str(expected), "exact", got == expected)


def _one_based(S):
    return [int(j) + 1 for j in S]


def _ordered(x, S):
    S = np.asarray(S)
    order = np.argsort(-np.abs(x[S]), kind="stable")
    return [int(j) + 1 for j in S[order]]


def example1_onestep():
    checks = []
    # lambda=10 sits on the boundary: x1[0]=9.7981 < 10 empties the next support
    for lam in (1.0, 5.0, 8.0):
        sol, tr = sindy_solve(fx.EXAMPLE1_A, fx.EXAMPLE1_B, SolverParams(lam))
        checks.append(_equal(f"lambda={lam:g} refinements", tr.refinements, 1))
        checks.append(_close(f"lambda={lam:g} x1", tr.iterates[-1], fx.EXAMPLE1_ONESTEP[1], 1e-4))
        checks.append(_equal(f"lambda={lam:g} supports", [_one_based(S) for S in tr.supports],
                             fx.EXAMPLE1_ONESTEP_SUPPORTS))
    return checks


def example1_fullpath():
    sol, tr = sindy_solve(fx.EXAMPLE1_A, fx.EXAMPLE1_B, SolverParams(0.802))
    checks = [_equal("refinements", tr.refinements, 4)]
    for k, (got, exp) in enumerate(zip(tr.iterates, fx.EXAMPLE1_FULLPATH)):
        checks.append(_close(f"x{k}", got, exp, 1e-3))
    checks.append(_equal("supports", [_one_based(S) for S in tr.supports], fx.EXAMPLE1_FULLPATH_SUPPORTS))
    return checks


def example2():
    sol, tr = sindy_solve(fx.EXAMPLE2_A, fx.EXAMPLE2_B, SolverParams(0.7))
    checks = [_equal("refinements", tr.refinements, 2)]
    ordered = [_ordered(x, S) for x, S in zip(tr.iterates, tr.supports)]
    checks.append(_equal("ordered supports", ordered, fx.EXAMPLE2_ORDERED_SUPPORTS))
    # x0 = A^+ b amplifies the two-decimal rounding of the printed noise
    # (sigma_min(A) ~ 0.018), so it is shown but not graded
    c = _close("x0 (not graded)", tr.iterates[0], fx.EXAMPLE2_ITERATES[0], 1e-2, 2)
    c.ok = None
    checks.append(c)
    checks.append(_close("x1", tr.iterates[1], fx.EXAMPLE2_ITERATES[1], 1e-2, 2))
    checks.append(_close("x2", tr.iterates[2], fx.EXAMPLE2_ITERATES[2], 1e-2, 2))
    checks.append(_equal("final support", _one_based(sol.support), [1, 2, 3]))
    return checks


def table1():
    inputs = {
        "example1_lambda8": (fx.EXAMPLE1_A, fx.EXAMPLE1_B),
        "example1_lambda0.802": (fx.EXAMPLE1_A, fx.EXAMPLE1_B),
        "example2_lambda0.7": (fx.EXAMPLE2_A, fx.EXAMPLE2_B),
    }
    checks = []
    for key, (lam, expected) in fx.TABLE1.items():
        A, b = inputs[key]
        _, tr = sindy_solve(A, b, SolverParams(lam))
        checks.append(_close(f"F {key}", tr.objective_values, expected, 1e-3))
    return checks


def _identification(system, reported, e_max, seed):
    cfg = IdentifyConfig.for_system(system, seed=seed)
    res = identify(cfg)
    m = res.metrics
    checks = [
        Check("support matches true model", str(res.supports()), "true terms", "exact", bool(m["support_exact"])),
        Check("relative error", f"{m['relative_error']:.4f}", f"<= {e_max:g} (published {reported['relative_error']})",
              f"{e_max:g}", m["relative_error"] <= e_max),
        Check("SNR [dB]", f"{m['snr']:.4f}", f"{reported['snr']}", "2", abs(m["snr"] - reported["snr"]) <= 2.0),
    ]
    idx = {str(lab): j for j, lab in enumerate(res.labels)}
    for i, eq in enumerate(reported["coefficients"]):
        got = [res.coefficients[idx[t], i] for t in eq]
        checks.append(Check(f"eq {i + 1} coefficients {list(eq)} (not graded)", _vec(got), _vec(list(eq.values())),
                            "-", None))
    return checks


def lorenz(seed=DEFAULT_SEED):
    return _identification("lorenz", fx.LORENZ_REPORTED, 0.1, seed)


def thomas(seed=DEFAULT_SEED):
    return _identification("thomas", fx.THOMAS_REPORTED, 0.05, seed)


CASES = {
    "example1_onestep": example1_onestep,
    "example1_fullpath": example1_fullpath,
    "example2": example2,
    "table1": table1,
    "lorenz": lorenz,
    "thomas": thomas,
}


def run_case(name, seed=None):
    fn = CASES[name]
    if name in ("lorenz", "thomas") and seed is not None:
        return fn(seed)
    return fn()


def format_checks(checks):
    rows = [("check", "computed", "expected", "tol", "result")]
    for c in checks:
        res = "info" if c.ok is None else ("PASS" if c.ok else "FAIL")
        rows.append((c.name, c.got, c.expected, c.tol, res))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows)
