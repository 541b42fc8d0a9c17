"""Command-line front end: ``csgs {solve,threshold,sweep,verify,oracle}``.

Machine-readable JSON goes to stdout (or ``--out``), a short human summary to
stderr.  Exit status: 0 success, 2 invalid input, 3 non-convergence or a
failed check (artifacts are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .energy import Params
from .nonexistence import monotonicity_sweep, sharp_threshold
from .solver import SolveConfig, minimize_on_M, shooting_scaling_check
from .verify import SampleSpec, run_all

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 2, 3
# acceptance levels used to decide the exit status
SOLVE_TOL = {"nehari": 1e-4, "pohozaev": 1e-4, "gamma": 1e-9, "pde_l2": 1e-3}
ORACLE_TOL = 1e-2
ORACLE_SCALING_TOL = 1e-3


class UsageError(ValueError):
    """Invalid flags or paths (exit status 2)."""


def build_id() -> str:
    """``git describe`` of the source tree, or ``CSGS_BUILD_ID``, or ``unknown``."""
    env = os.environ.get("CSGS_BUILD_ID")
    if env:
        return env
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5, check=True,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


@dataclass
class RunConfig:
    command: str
    params: dict
    out: Path | None = None
    csv: Path | None = None


def _envelope(command: str, params: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "build_id": build_id(),
        "result": result,
    }


def _clean(obj):
    """Make floats JSON-safe (``inf``/``nan`` become ``null``)."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _writable(path: Path | None) -> Path | None:
    if path is None:
        return None
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"cannot write to {path}")
    if path.exists() and not os.access(path, os.W_OK):
        raise UsageError(f"cannot write to {path}")
    return path


def _emit(doc: dict, out: Path | None) -> None:
    text = json.dumps(_clean(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _sidecar(out: Path | None, explicit: Path | None, suffix: str) -> Path | None:
    if explicit is not None:
        return explicit
    if out is not None:
        return out.with_name(out.stem + suffix)
    return None


# --- commands --------------------------------------------------------------


def _params_from(ns, oracle: bool = False) -> Params:
    return Params(omega=ns.omega, mu=ns.mu, q=ns.q, lam=ns.lam, p=ns.p, oracle=oracle)


def _solve_ok(res) -> bool:
    return res.converged and all(res.residuals[k] <= v for k, v in SOLVE_TOL.items())


def cmd_solve(ns) -> int:
    params = _params_from(ns)
    if params.p <= 5:
        raise UsageError(f"solve needs p > 5, got {params.p}")
    config = SolveConfig(
        R=ns.R, n=ns.n, stretch=ns.stretch, alpha=ns.alpha,
        init_width=ns.init_width, max_iters=ns.max_iters,
    )
    out = _writable(ns.out)
    prof = _writable(_sidecar(out, ns.profile, ".profile.csv"))
    t0 = time.perf_counter()
    res = minimize_on_M(params, config)
    ok = _solve_ok(res)
    result = res.summary()
    result["within_tolerance"] = ok
    if prof is not None:
        res.write_profile(prof)
        result["profile_csv"] = prof.name
    _emit(_envelope("solve", params.as_dict(), result), out)
    _say(
        f"solve: sigma = {res.sigma:.10g}  converged = {res.converged}  iterations = {res.iterations}  "
        f"|N|/(A+wB) = {res.residuals['nehari']:.2e}  |P|/(A+wB) = {res.residuals['pohozaev']:.2e}  "
        f"({time.perf_counter() - t0:.2f} s)"
    )
    return EXIT_OK if ok else EXIT_FAILED


def cmd_threshold(ns) -> int:
    params = Params(omega=1.0, mu=ns.mu, q=ns.q, lam=ns.lam, p=ns.p)
    if not 1 < params.p < 5:
        raise UsageError(f"threshold needs 1 < p < 5, got {params.p}")
    out = _writable(ns.out)
    res = sharp_threshold(params)
    d = res.to_dict()
    _emit(_envelope("threshold", d.pop("params"), d), out)
    _say(
        f"threshold ({res.regime}): omega* = {res.omega_sharp:.12g}  "
        f"omega_bar = {res.omega_sufficient:.12g}  t* = {res.t_star:.6g}"
    )
    return EXIT_OK


def _sweep_point(args):
    mode, axis, value, base, solve_kw = args
    kw = dict(base)
    kw[axis] = value
    if mode == "threshold":
        r = sharp_threshold(Params(**kw))
        return {"value": value, "omega_sharp": r.omega_sharp,
                "omega_sufficient": r.omega_sufficient, "t_star": r.t_star}
    res = minimize_on_M(Params(**kw), SolveConfig(**solve_kw))
    return {"value": value, "sigma": res.sigma, "converged": res.converged,
            "iterations": res.iterations, "nehari": res.residuals["nehari"],
            "pohozaev": res.residuals["pohozaev"], "within_tolerance": _solve_ok(res)}


def _sweep_mode(axis: str, values, p: float) -> str:
    if axis == "omega":
        return "solve"
    if axis == "p":
        if all(1 < v < 5 for v in values):
            return "threshold"
        if all(v > 5 for v in values):
            return "solve"
        raise UsageError("a p sweep must stay inside (1, 5) (thresholds) or above 5 (ground states)")
    if 1 < p < 5:
        return "threshold"
    if p > 5:
        return "solve"
    raise UsageError(f"p = {p} is neither a threshold (1<p<5) nor a solve (p>5) case")


def cmd_sweep(ns) -> int:
    if ns.steps < 1:
        raise UsageError("--steps must be >= 1")
    lo, hi = getattr(ns, "from"), ns.to
    if ns.log:
        if lo <= 0 or hi <= 0:
            raise UsageError("--log needs positive endpoints")
        values = np.geomspace(lo, hi, ns.steps)
    else:
        values = np.linspace(lo, hi, ns.steps)
    values = [float(v) for v in values]
    mode = _sweep_mode(ns.axis, values, ns.p)
    base = dict(omega=ns.omega, mu=ns.mu, q=ns.q, lam=ns.lam, p=ns.p)
    # validate every point before spending time on any of them
    for v in values:
        kw = dict(base)
        kw[ns.axis] = v
        Params(**kw)
    solve_kw = dict(R=ns.R, n=ns.n, alpha=ns.alpha)
    jobs = ns.jobs if ns.jobs is not None else int(os.environ.get("CSGS_JOBS", "1") or 1)
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    out = _writable(ns.out)
    csv_path = _writable(_sidecar(out, ns.csv, ".csv"))
    tasks = [(mode, ns.axis, v, base, solve_kw) for v in values]
    t0 = time.perf_counter()
    if jobs == 1:
        rows = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    checks = {}
    ok = True
    if mode == "threshold":
        cols = ["omega_sharp", "omega_sufficient", "t_star"]
        if ns.axis in ("q", "mu"):
            sorted_vals = sorted(values)
            table = monotonicity_sweep(ns.axis, Params(**base), sorted_vals)
            checks = table.checks
            ok = table.ok
    else:
        cols = ["sigma", "converged", "iterations", "nehari", "pohozaev"]
        ok = all(r["within_tolerance"] for r in rows)
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["axis", "value", *cols])
            for r in rows:
                w.writerow([ns.axis, repr(r["value"]), *(repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols)])
    params = {k if k != "lam" else "lambda": v for k, v in base.items() if k != ns.axis}
    result = {"axis": ns.axis, "mode": mode, "rows": rows, "checks": checks, "passed": ok}
    if csv_path is not None:
        result["csv"] = csv_path.name
    _emit(_envelope("sweep", params, result), out)
    _say(f"sweep over {ns.axis} ({mode}, {len(rows)} points, {jobs} jobs): "
         f"{'ok' if ok else 'FAILED'} ({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(ns) -> int:
    if ns.count < 0:
        raise UsageError("--count must be >= 0")
    spec = SampleSpec(seed=ns.seed, count=ns.count)
    jobs = ns.jobs if ns.jobs is not None else int(os.environ.get("CSGS_JOBS", "1") or 1)
    out = _writable(ns.out)
    t0 = time.perf_counter()
    rep = run_all(spec, jobs=max(1, jobs))
    suites = ["inequality_51", "inequality_52", "young_quartic", "young_sextic", "identities"]
    total = sum(rep[s]["violations"] for s in suites)
    rep["total_violations"] = total
    _emit(_envelope("verify", {"seed": ns.seed, "count": ns.count}, rep), out)
    _say(f"verify: {ns.count} samples, seed {ns.seed}, {total} violations "
         f"({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK if total == 0 else EXIT_FAILED


def cmd_oracle(ns) -> int:
    params = Params(omega=ns.omega, mu=0.0, q=0.0, lam=ns.lam, p=ns.p, oracle=True)
    if params.p <= 5:
        raise UsageError(f"oracle comparison needs p > 5, got {params.p}")
    out = _writable(ns.out)
    prof = _writable(_sidecar(out, ns.profile, ".profile.csv"))
    t0 = time.perf_counter()
    shoot = shooting_scaling_check(params.omega, params.lam, params.p)
    res = minimize_on_M(params, SolveConfig(R=ns.R, n=ns.n, alpha=ns.alpha))
    rel = abs(res.sigma - shoot["energy"]) / abs(shoot["energy"])
    ok = res.converged and rel <= ORACLE_TOL and shoot["energy_rel_error"] <= ORACLE_SCALING_TOL
    result = {
        "shooting": shoot,
        "variational": res.summary(),
        "energy_rel_diff": rel,
        "passed": ok,
    }
    if prof is not None:
        res.write_profile(prof)
        result["profile_csv"] = prof.name
    _emit(_envelope("oracle", params.as_dict(), result), out)
    _say(f"oracle: shooting {shoot['energy']:.10g}  variational {res.sigma:.10g}  "
         f"rel diff {rel:.2e}  scaling self-test {shoot['energy_rel_error']:.1e} "
         f"({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK if ok else EXIT_FAILED


# --- parser ----------------------------------------------------------------


def _physical(sub, p=6.0, with_omega=True):
    sub.add_argument("--p", type=float, default=p, help=f"nonlinearity exponent (default {p:g})")
    if with_omega:
        sub.add_argument("--omega", type=float, default=1.0)
    sub.add_argument("--mu", type=float, default=1.0)
    sub.add_argument("--q", type=float, default=1.0)
    sub.add_argument("--lambda", dest="lam", type=float, default=1.0)


def _grid_flags(sub):
    sub.add_argument("--alpha", type=float, default=None, help="scaling exponent (default per p)")
    sub.add_argument("--R", type=float, default=None, help="truncation radius (default 20/sqrt(omega))")
    sub.add_argument("--n", type=int, default=None, help="grid nodes (default: spacing 0.005, at least 4001)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="csgs", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    subs = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = subs.add_parser("solve", help="ground state by constrained minimisation (p > 5)")
    _physical(s)
    _grid_flags(s)
    s.add_argument("--stretch", type=float, default=1.0)
    s.add_argument("--init-width", type=float, default=None)
    s.add_argument("--max-iters", type=int, default=SolveConfig.max_iters)
    s.add_argument("--out", type=Path, default=None)
    s.add_argument("--profile", type=Path, default=None, help="CSV r,u,h,V1,V2 (default: beside --out)")
    s.set_defaults(func=cmd_solve)

    t = subs.add_parser("threshold", help="non-existence thresholds (1 < p < 5)")
    _physical(t, p=3.0, with_omega=False)
    t.add_argument("--out", type=Path, default=None)
    t.set_defaults(func=cmd_threshold)

    w = subs.add_parser("sweep", help="thresholds or ground states along one parameter")
    w.add_argument("--axis", choices=("q", "mu", "omega", "p"), required=True)
    w.add_argument("--from", type=float, required=True)
    w.add_argument("--to", type=float, required=True)
    w.add_argument("--steps", type=int, required=True)
    w.add_argument("--log", action="store_true", help="geometric spacing")
    _physical(w, p=3.0)
    _grid_flags(w)
    w.add_argument("--jobs", type=int, default=None, help="worker processes (default $CSGS_JOBS or 1)")
    w.add_argument("--out", type=Path, default=None)
    w.add_argument("--csv", type=Path, default=None, help="table CSV (default: beside --out)")
    w.set_defaults(func=cmd_sweep)

    v = subs.add_parser("verify", help="randomised inequality and identity suites")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--count", type=int, default=1000)
    v.add_argument("--jobs", type=int, default=None)
    v.add_argument("--out", type=Path, default=None)
    v.set_defaults(func=cmd_verify)

    o = subs.add_parser("oracle", help="q = mu = 0 solve against the shooting method")
    o.add_argument("--p", type=float, default=6.0)
    o.add_argument("--omega", type=float, default=1.0)
    o.add_argument("--lambda", dest="lam", type=float, default=1.0)
    _grid_flags(o)
    o.add_argument("--out", type=Path, default=None)
    o.add_argument("--profile", type=Path, default=None)
    o.set_defaults(func=cmd_oracle)
    return ap


def run(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except UsageError as e:
        _say(f"csgs: error: {e}")
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr)
    skip = {"func", "command", "out", "csv", "profile", "verbose"}
    cfg = RunConfig(
        ns.command, {k: v for k, v in vars(ns).items() if k not in skip},
        ns.out, getattr(ns, "csv", None),
    )
    logging.getLogger(__name__).info("run %s", cfg)
    try:
        return ns.func(ns)
    except (UsageError, ValueError) as e:
        _say(f"csgs {ns.command}: error: {e}")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
