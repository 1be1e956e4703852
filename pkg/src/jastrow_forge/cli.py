"""``jastrow-forge`` command line.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.
Every run appends one record to ``manifest.json`` in its output directory.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import (
    ConfigError,
    OracleCfg,
    RunConfig,
    SampleCfg,
    VerifyCfg,
    echo,
    grid_for,
    load_config,
)
from .errors import (
    ConfinementMismatch,
    JastrowForgeError,
    NoConvergence,
    RejectionStarvation,
    StuckChain,
    UnboundModel,
    ValidationError,
)
from .hamiltonian import CATALOG, expected_eigenvalue
from .local_energy import verify_sweep
from .oracle_grid import run_oracle
from .sampler import SamplerConfig, multi_chain, run_chain

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(x) -> str:
    """Locale-free decimal with 17 significant digits."""
    return format(float(x), ".17g")


def _clean(obj):
    # JSON has no NaN/inf
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, np.integer)) else fmt(v) for v in row])


def append_manifest(out: Path, record: dict) -> None:
    path = out / "manifest.json"
    runs = []
    if path.exists():
        runs = json.loads(path.read_text())
    runs.append(_clean(record))
    path.write_text(json.dumps(runs, indent=2, sort_keys=True) + "\n")


# -- stages ------------------------------------------------------------------

def stage_verify(rc: RunConfig, out: Path, model, seed=None, threshold=None) -> dict:
    cfg = rc.verify
    seed = cfg.seed if seed is None else seed
    threshold = cfg.threshold if threshold is None else threshold
    t0 = time.perf_counter()
    sw = verify_sweep(model, cfg.n_configs, seed=seed, box_halfwidth=cfg.box_halfwidth)
    wall = time.perf_counter() - t0
    write_csv(
        out / "verify.csv",
        ["config_index", "e_loc", "expected", "rel_dev"],
        [(k, e, sw.expected, r) for k, (e, r) in enumerate(zip(sw.e_loc, sw.rel_dev))],
    )
    result = {
        "passed": bool(sw.max_rel_dev <= threshold),
        "n_configs": sw.n_configs,
        "max_rel_dev": sw.max_rel_dev,
        "mean_rel_dev": sw.mean_rel_dev,
        "expected": sw.expected,
        "threshold": threshold,
        "seed": seed,
        "worst_config": sw.worst_config.positions.tolist(),
        "wall_seconds": wall,
    }
    write_json(out / "sweep.json", result)
    return result


def stage_oracle(rc: RunConfig, out: Path, model) -> dict:
    cfg = rc.oracle
    t0 = time.perf_counter()
    res = run_oracle(model, grid_for(model, cfg), tol=cfg.tol)
    wall = time.perf_counter() - t0
    result = {
        "passed": bool(res.rel_energy_err <= cfg.energy_tol and res.overlap >= cfg.overlap_min),
        "ground_energy": res.ground_energy,
        "analytic_energy": res.analytic_energy,
        "rel_energy_err": res.rel_energy_err,
        "overlap": res.overlap,
        "iterations": res.iterations,
        "points": cfg.points,
        "halfwidth": cfg.halfwidth,
        "energy_tol": cfg.energy_tol,
        "overlap_min": cfg.overlap_min,
        "wall_seconds": wall,
    }
    write_json(out / "oracle.json", result)
    return result


def stage_sample(rc: RunConfig, out: Path, model, seed=None) -> dict:
    cfg = rc.sample
    seed = cfg.seed if seed is None else seed
    sc = SamplerConfig(
        n_steps=cfg.n_steps,
        n_burnin=cfg.n_burnin,
        step_size=cfg.step_size,
        seed=seed,
        thin=cfg.thin,
        bins=cfg.bins,
        halfwidth=cfg.halfwidth,
    )
    t0 = time.perf_counter()
    chain_means = None
    if cfg.chains > 1:
        mc = multi_chain(model, sc, cfg.chains)
        st = mc.merged
        chain_means = list(mc.chain_energy_means)
    else:
        st = run_chain(model, sc)
    wall = time.perf_counter() - t0
    expected = expected_eigenvalue(model)
    rel_mean = abs(st.energy_mean - expected) / max(abs(expected), 1.0)
    ok = rel_mean <= cfg.energy_tol and st.energy_variance <= cfg.variance_max
    pos_ok = None
    if cfg.position_variance is not None:
        pos_ok = abs(st.position_variance - cfg.position_variance) <= 3 * st.position_variance_stderr
        ok = ok and pos_ok
    write_csv(out / "density.csv", ["bin_center", "value"],
              zip(st.density.centers, st.density.values))
    write_csv(out / "pairdist.csv", ["bin_center", "value"],
              zip(st.pair_dist.centers, st.pair_dist.values))
    result = {
        "passed": bool(ok),
        "acceptance_rate": st.acceptance_rate,
        "energy_mean": st.energy_mean,
        "energy_variance": st.energy_variance,
        "expected": expected,
        "rel_energy_dev": rel_mean,
        "n_samples": st.n_samples,
        "n_energy_discarded": st.n_energy_discarded,
        "discarded_fraction": st.n_energy_discarded / st.n_samples if st.n_samples else 0.0,
        "density_out_of_range": st.out_of_range,
        "step_size": st.step_size,
        "position_mean": st.position_mean,
        "position_variance": st.position_variance,
        "position_variance_stderr": st.position_variance_stderr,
        "position_variance_ok": pos_ok,
        "chains": cfg.chains,
        "chain_energy_means": chain_means,
        "seed": seed,
        "backend": kernels.BACKEND,
        "wall_seconds": wall,
    }
    write_json(out / "stats.json", result)
    return result


STAGES = ("verify", "oracle", "sample")

# errors meaning "this run is misconfigured" rather than "a check failed"
USAGE_ERRORS = (ValidationError, UnboundModel, ConfinementMismatch, RejectionStarvation)
CHECK_ERRORS = (NoConvergence, StuckChain)


def _model_for(rc: RunConfig, args):
    model = rc.model
    terms = [t for t, on in (("v3", args.sabotage_v3), ("v2l", args.sabotage_v2l)) if on]
    return model.with_sabotage(*terms) if terms else model


def run_stage(name: str, rc: RunConfig, out: Path, args) -> tuple[int, dict]:
    """Run one stage and record it. Returns ``(exit_code, result)``."""
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    started = datetime.now(timezone.utc).isoformat()
    try:
        model = _model_for(rc, args)
        if name == "verify":
            res = stage_verify(rc, out, model, args.seed, args.threshold)
        elif name == "oracle":
            res = stage_oracle(rc, out, model)
        else:
            res = stage_sample(rc, out, model, args.seed)
        code = EXIT_PASS if res["passed"] else EXIT_FAIL
    except USAGE_ERRORS as exc:
        res, code = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}, EXIT_USAGE
    except CHECK_ERRORS as exc:
        res, code = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}, EXIT_FAIL
    append_manifest(out, {
        "command": name,
        "config": str(rc.path),
        "model": echo(rc.raw),
        "seed": res.get("seed"),
        "sabotage": sorted(_sabotage_terms(args)),
        "tool_version": __version__,
        "backend": kernels.BACKEND,
        "started_utc": started,
        "wall_seconds": time.perf_counter() - t0,
        "exit_code": code,
        "outcome": res,
    })
    return code, res


def _sabotage_terms(args):
    return {t for t, on in (("v3", args.sabotage_v3), ("v2l", args.sabotage_v2l)) if on}


# -- commands ----------------------------------------------------------------

def cmd_catalog(args) -> int:
    entries = CATALOG
    if args.family:
        entries = [e for e in CATALOG if args.family in (e["id"], e["family"])]
        if not entries:
            print(f"error: no catalog entry '{args.family}'", file=sys.stderr)
            return EXIT_USAGE
    for e in entries:
        print(f"{e['id']}  (family {e['family']}; parameters: {', '.join(e['params'])})")
        print(f"    pair function  f(x) = {e['pair_function']}")
        print(f"    free energy    {e['e0_free']}")
        print(f"    trapped energy {e['e0_trapped']}")
        print(f"    long range     {e['long_range']}")
        print(f"    notes          {e['notes']}")
    return EXIT_PASS


def _single(args, name: str) -> int:
    if not args.config:
        print(f"error: {name} needs --config PATH", file=sys.stderr)
        return EXIT_USAGE
    try:
        rc = load_config(args.config)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if name == "oracle" and rc.model.n != 2:
        print(f"error: grid oracle needs n_particles = 2, config has {rc.model.n}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(rc, name) is None:
        # the command names its stage explicitly, so run it with defaults
        defaults = {"verify": VerifyCfg, "oracle": OracleCfg, "sample": SampleCfg}
        rc = dataclasses.replace(rc, **{name: defaults[name]()})
    code, res = run_stage(name, rc, Path(args.out), args)
    _report(name, rc.name, code, res)
    return code


def _report(stage, cfg_name, code, res):
    status = {EXIT_PASS: "PASS", EXIT_FAIL: "FAIL", EXIT_USAGE: "ERROR"}[code]
    keys = {
        "verify": ("max_rel_dev", "expected"),
        "oracle": ("ground_energy", "analytic_energy", "rel_energy_err", "overlap"),
        "sample": ("energy_mean", "energy_variance", "acceptance_rate"),
    }[stage]
    detail = res.get("error") or "  ".join(f"{k}={res[k]:.6g}" for k in keys)
    print(f"{cfg_name:28s} {stage:7s} {status:5s} {detail}")


def cmd_all(args) -> int:
    root = Path(args.config or "models")
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    paths = sorted(root.glob("*.toml"))
    if not paths:
        print(f"error: no *.toml configs in {root}", file=sys.stderr)
        return EXIT_USAGE
    rows, worst = [], EXIT_PASS
    for path in paths:
        cells = {}
        try:
            rc = load_config(path)
        except (ConfigError, ValidationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            rows.append((path.stem, {"verify": "ERROR", "oracle": "ERROR", "sample": "ERROR"}))
            worst = max(worst, EXIT_USAGE)
            continue
        for name in STAGES:
            if getattr(rc, name) is None:
                cells[name] = "-"
                continue
            if name == "oracle" and rc.model.n != 2:
                cells[name] = "skip"
                continue
            code, res = run_stage(name, rc, Path(args.out) / rc.name, args)
            _report(name, rc.name, code, res)
            cells[name] = {EXIT_PASS: "PASS", EXIT_FAIL: "FAIL", EXIT_USAGE: "ERROR"}[code]
            worst = max(worst, code)
        rows.append((rc.name, cells))
    print()
    print(f"{'config':28s} {'verify':7s} {'oracle':7s} {'sample':7s} overall")
    for name, cells in rows:
        bad = any(v in ("FAIL", "ERROR") for v in cells.values())
        print(f"{name:28s} {cells['verify']:7s} {cells['oracle']:7s} {cells['sample']:7s} "
              f"{'FAIL' if bad else 'PASS'}")
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jastrow-forge",
        description="Check parent Hamiltonians of Jastrow ground states.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config (a directory of them for 'all')")
    common.add_argument("--out", default="runs", help="output directory (default: runs)")
    common.add_argument("--seed", type=_u64, default=None, help="override config seeds")
    common.add_argument("--threshold", type=float, default=None,
                        help="override the verify threshold (default 1e-9)")
    common.add_argument("--sabotage-v3", action="store_true", help=argparse.SUPPRESS)
    common.add_argument("--sabotage-v2l", action="store_true", help=argparse.SUPPRESS)
    cat = sub.add_parser("catalog", parents=[common], help="list the cataloged models")
    cat.add_argument("--family", help="show one entry, by id or family name")
    sub.add_parser("verify", parents=[common], help="local-energy sweep")
    sub.add_parser("oracle", parents=[common], help="two-particle grid diagonalization")
    sub.add_parser("sample", parents=[common], help="Metropolis sampling of |Psi|^2")
    sub.add_parser("all", parents=[common], help="run every stage for a directory of configs")
    return p


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            return cmd_catalog(args)
        if args.command == "all":
            return cmd_all(args)
        return _single(args, args.command)
    except JastrowForgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
