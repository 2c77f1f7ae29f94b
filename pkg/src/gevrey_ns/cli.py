"""
Command-line entry point: ``gevrey-ns {verify,solve,monitor,constants,replay}``.

Every run resolves its options (built-in defaults, then a ``--config`` JSON
file, then explicit flags), writes its artifacts into ``--output-dir`` and
finishes with ``manifest.json`` holding the resolved config, its hash,
library versions, seeds, wall time and the sha256 of every artifact.  Each
artifact carries the config hash.  ``replay`` re-executes a manifest and
compares artifact hashes.

Exit codes: 0 success, 1 numerical failure or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import tempfile
import time
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import artifacts
from .blowup import (GRONWALL_C, c_a_sigma, energy_residuals, envelope_constants, fit_profile,
                     horizon_consistency, horizon_series, infimum_B)
from .inequalities import SUITES, cdelta, cdelta_limit, m_bound, run_suite
from .mild import WindowPolicy, continue_until, picard_solve, timestep_integrate
from .norms import norm
from .params import GevreyParams
from .spectral import (NumericalFailure, make_grid, random_divergence_free_field, single_mode_shear,
                       taylor_green)

log = logging.getLogger("gevrey_ns")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid configuration; reported with exit status 2."""


DEFAULTS = {
    "verify": {"suite": "all", "trials": 200, "N": 8, "seed": 0},
    "solve": {"initial": "taylor-green", "amplitude": 1.0, "N": 16, "nu": 1.0, "a": 0.1,
              "sigma": 1.5, "s": 1.0, "T": 0.1, "nodes": 33, "tol": 1e-12, "max_iter": 60,
              "mode": "picard", "dt": 1e-3, "save_every": 1, "threshold": None,
              "max_window": 1.0, "save_field": None},
    "monitor": {"trajectory": None, "nu": None, "gronwall_c": GRONWALL_C, "fit": False,
                "energy_tol": None},
    "constants": {"a": 1.0, "sigma": 2.0, "nu": 1.0, "s": 1.0, "u0_l2": 1.0, "delta": 2.0},
}


# ---------------------------------------------------------------------------
# argument parsing and config resolution


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gevrey-ns", description=__doc__.split("\n\n")[1].strip())
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def command(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file of options; flags override it")
        p.add_argument("--output-dir", help="artifact directory (default ./runs/<timestamp>)")
        return p

    p = command("verify", "run randomized inequality suites")
    p.add_argument("--suite", help=f"'all' or one of: {', '.join(SUITES)}")
    p.add_argument("--trials", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--seed", type=int)

    p = command("solve", "solve on a window, by time stepping, or by certified continuation")
    p.add_argument("--initial", help="taylor-green | single-mode | random:SEED | file:PATH")
    p.add_argument("--amplitude", type=float, help="scale of the initial datum (L2 norm for random)")
    p.add_argument("--N", type=int)
    for flag in ("--nu", "--a", "--sigma", "--s", "--T", "--tol", "--dt", "--threshold", "--max-window"):
        p.add_argument(flag, type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--save-every", type=int)
    p.add_argument("--mode", choices=("picard", "timestep", "continue"))
    p.add_argument("--save-field", choices=("csv", "npz"), help="also write the final field")

    p = command("monitor", "energy, horizon and Gronwall diagnostics of a trajectory CSV")
    p.add_argument("--trajectory", help="trajectory CSV written by solve")
    p.add_argument("--nu", type=float, help="override the viscosity recorded in the CSV")
    p.add_argument("--gronwall-c", type=float)
    p.add_argument("--fit", action="store_const", const=True, help="add the envelope fit (diagnostic only)")
    p.add_argument("--energy-tol", type=float, help="fail when the relative energy residual exceeds this")

    p = command("constants", "explicit constants of the blow-up lower bound")
    for flag in ("--a", "--sigma", "--nu", "--s", "--u0-l2", "--delta"):
        p.add_argument(flag, type=float)

    p = sub.add_parser("replay", help="re-run a manifest and compare artifact hashes")
    p.add_argument("manifest")
    p.add_argument("--output-dir")
    return top


def _load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_config(subcommand: str, file_options: dict, flag_options: dict) -> dict:
    """Defaults, overridden by the config file, overridden by flags; then validated."""
    defaults = DEFAULTS[subcommand]
    unknown = set(file_options) - set(defaults) - {"subcommand"}
    if unknown:
        raise UsageError(f"unknown {subcommand} option(s) in config: {sorted(unknown)}")
    if file_options.get("subcommand", subcommand) != subcommand:
        raise UsageError(f"config is for {file_options['subcommand']!r}, not {subcommand!r}")
    config = dict(defaults)
    config.update({k: v for k, v in file_options.items() if k != "subcommand"})
    config.update(flag_options)
    config["subcommand"] = subcommand
    _validate(config)
    return config


def _params(config) -> GevreyParams:
    try:
        return GevreyParams(a=float(config["a"]), sigma=float(config["sigma"]),
                            s=float(config.get("s", 1.0)), nu=float(config["nu"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _require(cond, message):
    if not cond:
        raise UsageError(message)


def _validate(config: dict) -> None:
    cmd = config["subcommand"]
    if cmd in ("verify", "solve"):
        N = config["N"]
        _require(isinstance(N, int) and N >= 4 and N % 2 == 0, f"N must be an even integer >= 4, got {N}")
    if cmd == "verify":
        _require(config["suite"] == "all" or config["suite"] in SUITES,
                 f"unknown suite {config['suite']!r}; choose 'all' or one of {sorted(SUITES)}")
        _require(isinstance(config["trials"], int) and config["trials"] >= 1, "trials must be >= 1")
        _require(isinstance(config["seed"], int), "seed must be an integer")
    elif cmd == "solve":
        _params(config)
        _require(config["mode"] in ("picard", "timestep", "continue"), f"bad mode {config['mode']!r}")
        _require(config["T"] > 0, "T must be > 0")
        _require(config["nodes"] >= 2, "nodes must be >= 2")
        _require(config["dt"] > 0, "dt must be > 0")
        _require(config["save_every"] >= 1, "save-every must be >= 1")
        init = str(config["initial"])
        if init.startswith("random:"):
            try:
                int(init.split(":", 1)[1])
            except ValueError:
                raise UsageError(f"random initial data needs an integer seed, got {init!r}") from None
        elif init.startswith("file:"):
            path = Path(init.split(":", 1)[1]).resolve()
            _require(path.exists(), f"initial data file {path} does not exist")
            config["initial"] = f"file:{path}"
        else:
            _require(init in ("taylor-green", "single-mode"),
                     f"unknown initial datum {init!r}; use taylor-green, single-mode, random:SEED or file:PATH")
    elif cmd == "monitor":
        _require(config["trajectory"] is not None, "monitor needs --trajectory")
        path = Path(config["trajectory"]).resolve()
        _require(path.exists(), f"trajectory file {path} does not exist")
        config["trajectory"] = str(path)
        _require(config["gronwall_c"] >= 0, "gronwall-c must be >= 0")
    elif cmd == "constants":
        params = _params(config)
        _require(params.sigma > 1, f"constants need sigma > 1, got {params.sigma}")
        _require(config["u0_l2"] > 0, "u0-l2 must be > 0")
        _require(config["delta"] > 1.5, "delta must be > 3/2")


# ---------------------------------------------------------------------------
# subcommands; each returns (exit status, {artifact name: path}, seeds)


def _write_error(out_dir: Path, chash: str, message: str) -> dict:
    return {"error.json": artifacts.write_json(out_dir / "error.json",
                                               {"config_hash": chash, "error": message})}


def run_verify(config, out_dir: Path, chash: str):
    names = list(SUITES) if config["suite"] == "all" else [config["suite"]]
    summaries = [run_suite(n, config["N"], config["trials"], config["seed"]) for n in names]
    verdicts = [dict(s.as_dict(), config_hash=chash) for s in summaries]
    files = {"verdicts.json": artifacts.write_json(out_dir / "verdicts.json", verdicts)}
    lines = [f"# config_hash={chash}", "name,trials,max_ratio,pass"]
    lines += [f"{s.name},{s.trials},{s.max_ratio!r},{str(s.passed).lower()}" for s in summaries]
    path = out_dir / "summary.csv"
    path.write_text("\n".join(lines) + "\n")
    files["summary.csv"] = path
    for s in summaries:
        log.info("%-18s N=%d trials=%d max_ratio=%.6g %s", s.name, s.N, s.trials, s.max_ratio,
                 "pass" if s.passed else "FAIL")
    status = EXIT_OK if all(s.passed for s in summaries) else EXIT_FAIL
    return status, files, [config["seed"]]


def initial_field(config) -> np.ndarray:
    N, amp, init = config["N"], float(config["amplitude"]), str(config["initial"])
    grid = make_grid(N)
    if init == "taylor-green":
        return taylor_green(grid, amp)
    if init == "single-mode":
        return single_mode_shear(grid, amp)
    if init.startswith("random:"):
        w = random_divergence_free_field(grid, -2.0, (1.0, N / 3), int(init.split(":", 1)[1]))
        return amp * w / norm(w, "l2")
    u = artifacts.read_field(init.split(":", 1)[1])
    if u.shape != (3,) + grid.shape:
        raise UsageError(f"initial field has shape {u.shape}, expected {(3,) + grid.shape}")
    return u


def run_solve(config, out_dir: Path, chash: str):
    params = _params(config)
    u0 = initial_field(config)
    mode = config["mode"]
    result = {"config_hash": chash, "mode": mode, "params": params.as_dict()}
    if mode == "picard":
        traj, trace = picard_solve(u0, config["T"], params, nodes=config["nodes"], tol=config["tol"],
                                   max_iter=config["max_iter"])
        result["certificate"] = trace.certificate.as_dict()
        result["trace"] = trace.as_dict()
        ok = trace.converged
    elif mode == "timestep":
        traj = timestep_integrate(u0, config["T"], config["dt"], params, save_every=config["save_every"])
        ok = traj.status == "ok"
    else:
        policy = WindowPolicy(max_window=config["max_window"], nodes=config["nodes"], tol=config["tol"],
                              max_iter=config["max_iter"])
        traj = continue_until(u0, params, time_budget=config["T"], norm_threshold=config["threshold"],
                              policy=policy)
        result["windows"] = [{"t0": w["t0"], "T": float(w["trace"].certificate.T),
                              "certificate": w["trace"].certificate.as_dict(),
                              "iterations": w["trace"].iterations, "status": w["trace"].status}
                             for w in traj.windows]
        ok = traj.status in ("budget", "threshold")
    result.update(status=traj.status, failure_time=traj.failure_time, samples=len(traj),
                  final_time=float(traj.times[-1]))
    header = {"status": traj.status}
    if traj.failure_time is not None:
        header["failure_time"] = repr(float(traj.failure_time))
    files = {
        "trajectory.csv": artifacts.write_trajectory_csv(out_dir / "trajectory.csv", traj.times,
                                                         traj.norm_reports(), chash, params.as_dict(),
                                                         header),
        "result.json": artifacts.write_json(out_dir / "result.json", result),
    }
    if config["save_field"]:
        name = f"final_field.{config['save_field']}"
        files[name] = artifacts.write_field(out_dir / name, traj.final, config_hash=chash)
    if not ok:
        log.error("solve ended with status %s", traj.status)
    seeds = [int(config["initial"].split(":", 1)[1])] if config["initial"].startswith("random:") else []
    return (EXIT_OK if ok else EXIT_FAIL), files, seeds


def run_monitor(config, out_dir: Path, chash: str):
    cols, meta = artifacts.read_trajectory_csv(config["trajectory"])
    params_meta = meta.get("params", {})
    nu = config["nu"] if config["nu"] is not None else params_meta.get("nu")
    if nu is None:
        raise UsageError("viscosity missing from the trajectory header; pass --nu")
    failure = float(meta["failure_time"]) if "failure_time" in meta else None
    t = cols["t"]
    report = {"config_hash": chash, "source_config_hash": meta.get("config_hash"), "nu": nu,
              "samples": len(t)}
    checks = []
    if len(t) >= 2:
        ledger = energy_residuals(t, cols["l2"], cols["grad_l2"], nu)
        report["energy"] = ledger.as_dict()
        if config["energy_tol"] is not None:
            checks.append(ledger.max_relative <= config["energy_tol"])
    report["horizons"] = [h.as_dict() for h in
                          horizon_series(t, cols["fourier_l1_weighted"], cols["fourier_l1"], nu)]
    verdict = horizon_consistency(t, cols["fourier_l1_weighted"], cols["h1_gevrey_dot"], nu,
                                  l1_plain=cols["fourier_l1"], failure_time=failure,
                                  c=config["gronwall_c"])
    report["consistency"] = verdict
    checks.append(verdict["pass"])
    if config["fit"]:
        try:
            params = GevreyParams(**params_meta)
            params.require_strict_index()
            ep = envelope_constants(float(cols["l2"][0]), params)
            report["envelope_fit"] = fit_profile(t, cols["h1_gevrey"], ep, params).as_dict()
        except (TypeError, ValueError) as exc:
            report["envelope_fit"] = {"status": "no-fit", "note": f"diagnostic only: {exc}"}
    files = {"diagnostics.json": artifacts.write_json(out_dir / "diagnostics.json", report)}
    return (EXIT_OK if all(checks) else EXIT_FAIL), files, []


def run_constants(config, out_dir: Path, chash: str):
    params = _params(config)
    mb = m_bound(2.0)
    ep = envelope_constants(float(config["u0_l2"]), params, M2=mb["M"])
    ca = c_a_sigma(params.a, params.sigma)
    report = {
        "config_hash": chash,
        "inputs": {"a": params.a, "sigma": params.sigma, "nu": params.nu, "u0_l2": config["u0_l2"]},
        "C_delta": {"delta": config["delta"], "value": cdelta(config["delta"]), "limit": cdelta_limit()},
        "M2": mb,
        "c_a_sigma_squared": ca.as_dict(),
        "B": infimum_B(params.sigma0_twice),
        "envelope": ep.as_dict(),
    }
    files = {"constants.json": artifacts.write_json(out_dir / "constants.json", report)}
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK, files, []


RUNNERS = {"verify": run_verify, "solve": run_solve, "monitor": run_monitor,
           "constants": run_constants}


# ---------------------------------------------------------------------------
# execution, manifests and replay


def _versions() -> dict:
    try:
        own = metadata.version("gevrey-ns")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"gevrey_ns": own, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def _default_output_dir() -> Path:
    return Path("runs") / datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def execute(config: dict, out_dir: Path) -> tuple[int, dict]:
    """Run a resolved config into ``out_dir``; returns the exit status and the manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = artifacts.config_hash(config)
    start = time.perf_counter()
    try:
        status, files, seeds = RUNNERS[config["subcommand"]](config, out_dir, chash)
    except NumericalFailure as exc:
        log.error("numerical failure: %s", exc)
        status, files, seeds = EXIT_FAIL, _write_error(out_dir, chash, f"numerical failure: {exc}"), []
    manifest = {
        "config": config,
        "config_hash": chash,
        "versions": _versions(),
        "seeds": seeds,
        "wall_time_s": time.perf_counter() - start,
        "exit_status": status,
        "outputs": {name: artifacts.sha256_file(path) for name, path in sorted(files.items())},
    }
    artifacts.write_json(out_dir / "manifest.json", manifest)
    return status, manifest


def replay(manifest_path, out_dir: Path | None = None) -> tuple[int, dict]:
    path = Path(manifest_path)
    if not path.exists():
        raise UsageError(f"manifest {path} does not exist")
    try:
        manifest = json.loads(path.read_text())
        config = dict(manifest["config"])
        recorded = manifest["outputs"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a run manifest: {exc}") from None
    subcommand = config.get("subcommand")
    if subcommand not in RUNNERS:
        raise UsageError(f"manifest has unknown subcommand {subcommand!r}")
    config = resolve_config(subcommand, config, {})
    report = {"manifest": str(path.resolve()),
              "config_hash_matches": artifacts.config_hash(config) == manifest.get("config_hash")}
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(out_dir) if out_dir is not None else Path(tmp)
        _, new = execute(config, target)
    produced = new["outputs"]
    report["files"] = {name: {"recorded": recorded.get(name), "replayed": produced.get(name),
                              "identical": recorded.get(name) == produced.get(name)}
                       for name in sorted(set(recorded) | set(produced))}
    report["identical"] = report["config_hash_matches"] and all(
        f["identical"] for f in report["files"].values())
    return (EXIT_OK if report["identical"] else EXIT_FAIL), report


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.subcommand == "replay":
            status, report = replay(args.manifest, Path(args.output_dir) if args.output_dir else None)
            print(json.dumps(report, indent=2, sort_keys=True))
            return status
        flags = {k: v for k, v in vars(args).items()
                 if k not in ("subcommand", "config", "output_dir", "verbose")}
        file_options = _load_config_file(args.config) if getattr(args, "config", None) else {}
        config = resolve_config(args.subcommand, file_options, flags)
        out_dir = Path(args.output_dir) if getattr(args, "output_dir", None) else _default_output_dir()
        status, manifest = execute(config, out_dir)
        print(f"{args.subcommand}: exit {status}, artifacts in {out_dir}", file=sys.stderr)
        return status
    except UsageError as exc:
        print(f"gevrey-ns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
