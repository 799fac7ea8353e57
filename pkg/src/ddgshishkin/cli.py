"""Command line entry point: ``ddgshishkin {solve,convergence,admissibility,project}``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import fields, replace

import numpy as np

from .admissibility import admissibility_report, check_admissibility
from .ddg import SCHEDULES, SolverError
from .functions import SampledFunction
from .harness import ConfigError, RunConfig, emit_report, run_convergence_study, run_single, write_report
from .mesh import build_shishkin
from .norms import energy_norm, error_bundle
from .problem import PROBLEMS, ProblemError
from .projections import composite_interpolant, global_theta_project, gauss_radau_project, projection_residuals

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

log = logging.getLogger("ddgshishkin")

EXIT_OK, EXIT_FAILED_ROW, EXIT_CONFIG = 0, 1, 2


def load_config_file(path: str) -> dict:
    """Flat TOML file whose keys are RunConfig field names."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "N_list" in data:
        data["N_list"] = tuple(data["N_list"])
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    flags = {
        "problem": args.problem,
        "epsilon": args.epsilon,
        "k": args.k,
        "N_list": tuple(args.N) if args.N else None,
        "sigma": args.sigma,
        "theta": args.theta,
        "beta1": args.beta1,
        "schedule": args.schedule,
        "beta0": args.beta0,
        "seed": args.seed,
        "output": args.out,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig(**values).resolved()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[tuple], fmt: str) -> str:
    if fmt == "csv":
        return "".join(",".join(str(c) for c in r) + "\n" for r in rows)
    cells = [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n" for r in cells)


def cmd_solve(cfg: RunConfig, fmt: str) -> int:
    spec = PROBLEMS[cfg.problem](cfg.epsilon)
    N = cfg.N_list[0]
    params = cfg.flux_params()
    try:
        mesh, wh, gk, pi = run_single(spec, N, cfg.k, params, cfg.sigma)
    except SolverError as exc:
        log.error("solve failed: %s", exc)
        return EXIT_FAILED_ROW
    b = error_bundle(wh, SampledFunction(*spec.exact), spec, params)
    rows = [("quantity", "value")]
    rows += [(name, format(getattr(b, name), ".6e")) for name in ("l2", "linf", "h1_semi_broken", "energy", "jump_l2")]
    rows += [
        ("e_energy", format(energy_norm(gk - wh, spec, params), ".6e")),
        ("superclose_energy", format(energy_norm(pi - wh, spec, params), ".6e")),
        ("tau", format(mesh.tau, ".6e")),
    ]
    _emit(f"# N={N} k={cfg.k} epsilon={cfg.epsilon!r} schedule={cfg.schedule}\n" + _table(rows, fmt), cfg.output)
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, fmt: str) -> int:
    report = run_convergence_study(cfg)
    if cfg.output:
        write_report(report, cfg.output, fmt)
    else:
        sys.stdout.write(emit_report(report, fmt))
    return EXIT_FAILED_ROW if report.failed else EXIT_OK


def cmd_admissibility(cfg: RunConfig, fmt: str, trials: int) -> int:
    r = admissibility_report(cfg.k)
    rows = [
        ("k", "lambda_max", "beta0_bound", "beta0_integer", "mu1", "mu2"),
        (r.k, format(r.lambda_max, ".10g"), format(r.beta0_bound, ".10g"), r.beta0_integer, r.mu1, r.mu2),
    ]
    out = _table(rows, fmt)
    if trials > 0:
        rng = np.random.default_rng(cfg.seed)
        check_rows = [("N", "schedule", "admissible", "admissibility_slack", "coercive", "coercivity_slack")]
        for N in cfg.N_list:
            mesh = build_shishkin(N, cfg.epsilon, cfg.sigma, PROBLEMS[cfg.problem](cfg.epsilon).alpha)
            c = check_admissibility(mesh, cfg.k, cfg.flux_params(), trials, rng)
            check_rows.append((N, cfg.schedule, c.passed, f"{c.admissibility_slack:.4g}", c.coercive, f"{c.coercivity_slack:.4g}"))
        out += ("\n" if fmt == "text" else "") + _table(check_rows, fmt)
    _emit(out, cfg.output)
    return EXIT_OK


def cmd_project(cfg: RunConfig, fmt: str) -> int:
    spec = PROBLEMS[cfg.problem](cfg.epsilon)
    w = SampledFunction(*spec.exact)
    params = cfg.flux_params()
    rows = [("N", "moment", "flux", "endpoint", "theta1_radau", "jump_mid", "coarse_E", "fine_E")]
    for N in cfg.N_list:
        mesh = build_shishkin(N, cfg.epsilon, cfg.sigma, spec.alpha)
        res = projection_residuals(w, mesh, cfg.k, cfg.theta)
        radau = np.max(np.abs(global_theta_project(w, mesh, cfg.k, 1.0).coeffs - gauss_radau_project(w, mesh, cfg.k).coeffs))
        pi = composite_interpolant(w, mesh, cfg.k, cfg.theta)
        pm, pp = pi.traces(0)
        wv = w(np.array([mesh.nodes[N // 2]]))[0]
        jump = (wv - pp[N // 2]) - (wv - pm[N // 2])
        rows.append((
            N, f"{res['moment']:.3e}", f"{res['flux']:.3e}", f"{res['endpoint']:.3e}", f"{radau:.3e}", f"{jump:.3e}",
            f"{error_bundle(pi, w, spec, params, region='coarse').energy:.3e}",
            f"{error_bundle(pi, w, spec, params, region='fine').energy:.3e}",
        ))
    _emit(_table(rows, fmt), cfg.output)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", choices=sorted(PROBLEMS))
    common.add_argument("--epsilon", type=float)
    common.add_argument("--k", type=int)
    common.add_argument("--N", type=int, action="append", help="mesh size; repeat for a sweep")
    common.add_argument("--sigma", type=float)
    common.add_argument("--theta", type=float)
    common.add_argument("--beta1", type=float)
    common.add_argument("--beta0", type=float, help="penalty for the constant schedule")
    common.add_argument("--schedule", choices=SCHEDULES)
    common.add_argument("--format", choices=("csv", "text"), help="default: csv for convergence, text otherwise")
    common.add_argument("--out")
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="flat TOML file of RunConfig fields")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ddgshishkin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve once and print error norms")
    sub.add_parser("convergence", parents=[common], help="run a convergence sweep")
    adm = sub.add_parser("admissibility", parents=[common], help="flux admissibility constants")
    adm.add_argument("--trials", type=int, default=0, help="random trials per N for the randomized check")
    sub.add_parser("project", parents=[common], help="projection residual diagnostics")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    logging.captureWarnings(True)
    if args.format is None:
        args.format = "csv" if args.command == "convergence" else "text"
    try:
        cfg = build_config(args)
        if args.command == "solve":
            if args.N is None and "N_list" not in (load_config_file(args.config) if args.config else {}):
                cfg = replace(cfg, N_list=(64,))
            return cmd_solve(cfg, args.format)
        if args.command == "convergence":
            return cmd_convergence(cfg, args.format)
        if args.command == "admissibility":
            return cmd_admissibility(cfg, args.format, args.trials)
        return cmd_project(cfg, args.format)
    except (ConfigError, ProblemError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
