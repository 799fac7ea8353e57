"""Convergence studies for the DDG scheme and their CSV / text reports."""

from __future__ import annotations

import io
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .ddg import SCHEDULES, FluxParams, SolverError, assemble, solve
from .functions import SampledFunction
from .mesh import build_shishkin
from .norms import energy_norm
from .problem import PROBLEMS, ProblemSpec
from .projections import composite_interpolant, gauss_lobatto_interpolate

log = logging.getLogger(__name__)

CSV_COLUMNS = ("N", "e_energy", "superclose_energy", "rate")
# below this, errors are solver noise and rates carry no information
RATE_FLOOR = 1e-10


class ConfigError(ValueError):
    pass


def default_beta1(k: int, schedule: str) -> float:
    if schedule == "k1-experiment":
        return 0.0
    return 1.0 / (2 * k * k + 2 * k)


@dataclass(frozen=True)
class RunConfig:
    """One convergence sweep. ``sigma`` and ``beta1`` default to k+2 and
    1/(2k^2+2k) (0 for the k1-experiment schedule) when left as None."""

    problem: str = "outflow-layer"
    epsilon: float = 1e-8
    k: int = 1
    N_list: tuple = (8, 16, 32, 64, 128, 256)
    sigma: Optional[float] = None
    theta: float = 2.0 / 3.0
    beta1: Optional[float] = None
    schedule: str = "k1-experiment"
    beta0: float = 2.0
    seed: int = 0
    output: Optional[str] = None

    def resolved(self) -> "RunConfig":
        cfg = replace(
            self,
            sigma=float(self.k + 2 if self.sigma is None else self.sigma),
            beta1=float(default_beta1(self.k, self.schedule) if self.beta1 is None else self.beta1),
            N_list=tuple(int(n) for n in self.N_list),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; known: {sorted(PROBLEMS)}")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ConfigError(f"schedule must be one of {SCHEDULES}")
        if not 0.5 <= self.theta <= 1.0:
            raise ConfigError("theta must lie in [1/2, 1]")
        if self.sigma is not None and self.sigma < self.k + 1:
            raise ConfigError(f"sigma = {self.sigma} < k + 1 = {self.k + 1}")
        if not self.N_list:
            raise ConfigError("N_list is empty")
        for n in self.N_list:
            if n < 4 or n % 2:
                raise ConfigError(f"N must be an even integer >= 4, got {n}")
        if self.schedule in ("half-order", "full-order") and self.beta1 is not None and self.beta1 <= 0:
            raise ConfigError(f"{self.schedule} schedule needs beta1 > 0")

    def flux_params(self) -> FluxParams:
        beta1 = default_beta1(self.k, self.schedule) if self.beta1 is None else self.beta1
        return FluxParams(theta=self.theta, beta1=beta1, schedule=self.schedule, constant=self.beta0)


@dataclass
class ReportRow:
    N: int
    e_energy: float
    superclose_energy: float
    rate: Optional[float] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ConvergenceReport:
    config: RunConfig
    rows: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r.failed for r in self.rows)

    def errors(self) -> np.ndarray:
        return np.array([r.e_energy for r in self.rows])

    def superclose(self) -> np.ndarray:
        return np.array([r.superclose_energy for r in self.rows])


def compute_rate(e_N: float, e_2N: float, N: int, N_next: Optional[int] = None) -> Optional[float]:
    """(ln e_N - ln e_2N) / ln(2 ln N / ln 2N), the rate in powers of ln(N)/N.

    ``N_next`` generalizes the denominator to ln((ln N / N) / (ln N' / N')).
    Returns None for non-positive or non-finite errors, and at N = 2 where
    the denominator vanishes.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if not (np.isfinite(e_N) and np.isfinite(e_2N)) or e_N <= 0 or e_2N <= 0:
        return None
    M = 2 * N if N_next is None else N_next
    denom = math.log((math.log(N) / N) / (math.log(M) / M))
    if denom == 0.0:  # N = 2: ln N / N is the same at N and 2N
        return None
    return (math.log(e_N) - math.log(e_2N)) / denom


def _dedup(N_list) -> list[int]:
    uniq = sorted(set(N_list))
    if len(uniq) != len(N_list):
        warnings.warn(f"duplicate N values removed: {list(N_list)} -> {uniq}", stacklevel=3)
    return uniq


def run_single(spec: ProblemSpec, N: int, k: int, params: FluxParams, sigma: float):
    """Solve on one Shishkin mesh; returns (mesh, w_h, G_k w, pi w)."""
    mesh = build_shishkin(N, spec.epsilon, sigma, spec.alpha)
    wh = solve(assemble(spec, mesh, k, params))
    w = SampledFunction(*spec.exact)
    return mesh, wh, gauss_lobatto_interpolate(w, mesh, k), composite_interpolant(w, mesh, k, params.theta)


def run_convergence_study(config: RunConfig, spec: Optional[ProblemSpec] = None) -> ConvergenceReport:
    cfg = config.resolved()
    if spec is None:
        spec = PROBLEMS[cfg.problem](cfg.epsilon)
    if spec.exact is None:
        raise ConfigError("convergence studies need a problem with a known exact solution")
    params = cfg.flux_params()
    if cfg.schedule == "full-order" and cfg.sigma < cfg.k + 2:
        warnings.warn(f"full-order schedule expects sigma >= k + 2, got {cfg.sigma}", stacklevel=2)
    report = ConvergenceReport(config=cfg)
    for N in _dedup(cfg.N_list):
        if spec.epsilon * N > 1:
            warnings.warn(f"epsilon * N = {spec.epsilon * N:.3g} > 1; mesh is outside the layer-resolving regime", stacklevel=2)
        try:
            _, wh, gk, pi = run_single(spec, N, cfg.k, params, cfg.sigma)
            row = ReportRow(N, energy_norm(gk - wh, spec, params), energy_norm(pi - wh, spec, params))
        except (SolverError, ValueError, np.linalg.LinAlgError) as exc:
            log.warning("N=%d failed: %s", N, exc)
            row = ReportRow(N, math.nan, math.nan, error=str(exc))
        report.rows.append(row)
    _attach_rates(report.rows)
    return report


def _attach_rates(rows: list) -> None:
    for cur, nxt in zip(rows, rows[1:]):
        if min(cur.e_energy, nxt.e_energy) < RATE_FLOOR:
            cur.rate = None
            continue
        cur.rate = compute_rate(cur.e_energy, nxt.e_energy, cur.N, nxt.N)


def _metadata(cfg: RunConfig) -> list[tuple[str, str]]:
    return [
        ("problem", cfg.problem),
        ("epsilon", repr(cfg.epsilon)),
        ("k", str(cfg.k)),
        ("sigma", repr(cfg.sigma)),
        ("theta", repr(cfg.theta)),
        ("beta1", repr(cfg.beta1)),
        ("schedule", cfg.schedule if cfg.schedule != "constant" else f"constant({cfg.beta0!r})"),
        ("seed", str(cfg.seed)),
        ("version", f"ddgshishkin {__version__}"),
    ]


def _full(x: Optional[float]) -> str:
    if x is None or not np.isfinite(x):
        return ""
    return format(x, ".17g")


def _sci3(x: Optional[float]) -> str:
    if x is None or not np.isfinite(x):
        return "-"
    mant, exp = format(x, ".2e").split("e")
    return f"{mant}e{int(exp)}"


def emit_report(report: ConvergenceReport, fmt: str = "csv") -> str:
    out = io.StringIO()
    meta = _metadata(report.config)
    if fmt == "csv":
        for key, val in meta:
            out.write(f"# {key}: {val}\n")
        for row in report.rows:
            if row.failed:
                out.write(f"# failed N={row.N}: {row.error}\n")
        out.write(",".join(CSV_COLUMNS) + "\n")
        for row in report.rows:
            out.write(f"{row.N},{_full(row.e_energy)},{_full(row.superclose_energy)},{_full(row.rate)}\n")
    elif fmt == "text":
        out.write("  ".join(f"{k}={v}" for k, v in meta) + "\n")
        head = ("N", "e^N", "p_N", "|pi w - w_h|_E")
        widths = (6, 11, 8, 15)
        out.write("".join(h.rjust(w) for h, w in zip(head, widths)) + "\n")
        for row in report.rows:
            rate = "-" if row.rate is None else f"{row.rate:.2f}"
            cells = (str(row.N), _sci3(row.e_energy), rate, _sci3(row.superclose_energy))
            out.write("".join(c.rjust(w) for c, w in zip(cells, widths)) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return out.getvalue()


def parse_csv_report(text: str) -> tuple[dict, list[ReportRow]]:
    """Inverse of ``emit_report(..., 'csv')``: (metadata, rows)."""
    meta, rows = {}, []
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            meta[key] = val
        elif line.strip():
            body.append(line)
    if not body or tuple(body[0].split(",")) != CSV_COLUMNS:
        raise ValueError("missing CSV header")

    def num(s):
        return float(s) if s else math.nan

    for line in body[1:]:
        n, e, sc, r = line.split(",")
        rows.append(ReportRow(int(n), num(e), num(sc), float(r) if r else None))
    return meta, rows


def config_as_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["N_list"] = list(cfg.N_list)
    return d


def write_report(report: ConvergenceReport, path: str, fmt: str = "csv") -> None:
    """Write ``emit_report`` output to ``path``; OSError if it is not writable."""
    text = emit_report(report, fmt)
    with open(path, "w") as fh:
        fh.write(text)
