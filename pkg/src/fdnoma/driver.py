"""Monte Carlo rate-region sweeps, single-channel diagnostics and oracle checks."""

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fixedbf, model, optimizer, oracle, sinr
from .model import ConfigError, SystemParams
from .optimizer import Scheme

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig", "RateRegionRow", "TrialRecord", "RateRegionResult", "OracleReport",
    "config_from_mapping", "load_experiment_config", "run_trial", "aggregate",
    "run_rate_region", "format_csv", "write_csv", "read_csv", "run_single", "run_oracle_check",
    "CSV_COLUMNS", "DEFAULT_RBAR_GRID",
]

CSV_COLUMNS = ["rbar", "scheme", "mean_near_rate", "mean_far_rate", "feasible_frac", "n_feasible"]
DEFAULT_RBAR_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
ALL_SCHEMES = (Scheme.OPTIMUM_FD, Scheme.FIXED_FD, Scheme.HALF_DUPLEX)


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams = field(default_factory=SystemParams)
    schemes: tuple = ALL_SCHEMES
    rbar_grid: tuple = DEFAULT_RBAR_GRID
    n_trials: int = 200
    seed: int = 2024
    delta_ps_steps: int = optimizer.LINE_SEARCH_STEPS
    output_path: str = None
    hd_bs_phase2: bool = False
    line_search: str = "best"
    workers: int = 1

    def __post_init__(self):
        grid = tuple(float(r) for r in self.rbar_grid)
        if not grid:
            raise ConfigError("rbar_grid is empty")
        if any(r < 0 or not math.isfinite(r) for r in grid):
            raise ConfigError(f"rbar_grid entries must be finite and >= 0, got {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"rbar_grid must be strictly ascending, got {grid}")
        object.__setattr__(self, "rbar_grid", grid)
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.delta_ps_steps < 1:
            raise ConfigError(f"delta_ps_steps must be >= 1, got {self.delta_ps_steps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.line_search not in ("best", "first"):
            raise ConfigError(f"line_search must be 'best' or 'first', got {self.line_search!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")

    def replace(self, **changes):
        import dataclasses
        return dataclasses.replace(self, **changes)


def _parse_bool(key, value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean for {key}: {value!r}")


def _parse_grid(value):
    value = value.strip()
    try:
        if ":" in value:
            start, stop, step = (float(x) for x in value.split(":"))
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + k * step, 12) for k in range(n))
        return tuple(float(x) for x in value.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad rbar_grid: {value!r}") from exc


def config_from_mapping(mapping, base=None):
    """Build an :class:`ExperimentConfig` from ``key = value`` strings."""
    base = base or ExperimentConfig()
    params, rest = model.params_from_mapping(mapping, base.params)
    changes = {"params": params}
    for key, value in rest.items():
        try:
            if key == "schemes":
                changes[key] = tuple(Scheme(s.strip()) for s in value.split(",") if s.strip())
            elif key == "rbar_grid":
                changes[key] = _parse_grid(value)
            elif key in ("n_trials", "seed", "delta_ps_steps", "workers"):
                changes[key] = int(value)
            elif key == "output_path":
                changes[key] = value
            elif key == "hd_bs_phase2":
                changes[key] = _parse_bool(key, value)
            elif key == "line_search":
                changes[key] = value.strip()
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return base.replace(**changes)


def load_experiment_config(path):
    return config_from_mapping(model.load_config_file(path))


# ---------------------------------------------------------------------------
# per-trial evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial: int
    scheme: Scheme
    rbar: float
    feasible: bool
    near_rate: float
    far_rate: float
    numerical_failures: int = 0


def _solve_scheme(cfg, ch, scheme, rbar, fixed_bf):
    p = cfg.params
    if scheme is Scheme.OPTIMUM_FD:
        return optimizer.algorithm1(p, ch, rbar, steps=cfg.delta_ps_steps, stop=cfg.line_search)
    if scheme is Scheme.FIXED_FD:
        return fixedbf.fixed_power_allocation(p, ch, fixed_bf, rbar)
    if scheme is Scheme.HALF_DUPLEX:
        return fixedbf.hd_baseline(p, ch, rbar, bs_in_phase2=cfg.hd_bs_phase2)
    raise ValueError(f"scheme {scheme} is not part of a rate-region sweep")


def run_trial(cfg, trial):
    """All (scheme, rbar) results for one channel draw, in grid order.

    The joint problem's feasible set shrinks as the target grows, so once
    the optimum scheme finds no feasible point the larger targets are
    recorded as infeasible without another line search.
    """
    ch = model.sample_channels(cfg.params, model.trial_rng(cfg.seed, trial))
    fixed_bf = fixedbf.mrt_mrc(ch)
    out = []
    for scheme in cfg.schemes:
        dead = False
        for rbar in cfg.rbar_grid:
            if dead:
                out.append(TrialRecord(trial, scheme, rbar, False, math.nan, math.nan))
                continue
            sp = _solve_scheme(cfg, ch, scheme, rbar, fixed_bf)
            fails = int(sp.diag.get("numerical_failure", 0))
            if fails:
                log.warning("trial %d %s rbar=%g: %d SDP numerical failures",
                            trial, scheme.value, rbar, fails)
            out.append(TrialRecord(trial, scheme, rbar, bool(sp.feasible),
                                   float(sp.near_rate), float(sp.far_rate), fails))
            if scheme is Scheme.OPTIMUM_FD and not sp.feasible and fails == 0:
                dead = True
    return out


# ---------------------------------------------------------------------------
# aggregation and CSV
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateRegionRow:
    rbar: float
    scheme: str
    mean_near_rate: float
    mean_far_rate: float
    feasible_frac: float
    n_feasible: int

    def same_as(self, other):
        a = (self.mean_near_rate, self.mean_far_rate, self.feasible_frac)
        b = (other.mean_near_rate, other.mean_far_rate, other.feasible_frac)
        return (self.rbar == other.rbar and self.scheme == other.scheme
                and self.n_feasible == other.n_feasible
                and all((x == y) or (math.isnan(x) and math.isnan(y)) for x, y in zip(a, b)))


@dataclass
class RateRegionResult:
    rows: list
    records: list
    numerical_failures: int = 0
    csv_path: str = None

    def row(self, rbar, scheme):
        scheme = Scheme(scheme).value
        for r in self.rows:
            if r.rbar == rbar and r.scheme == scheme:
                return r
        raise KeyError((rbar, scheme))

    def per_trial(self, scheme, rbar):
        scheme = Scheme(scheme)
        return [r for r in self.records if r.scheme is scheme and r.rbar == rbar]


def aggregate(cfg, records):
    """Means over feasible trials, in trial order (fixed summation order)."""
    n = cfg.n_trials
    rows = []
    for rbar in cfg.rbar_grid:
        for scheme in cfg.schemes:
            sel = [r for r in records if r.scheme is scheme and r.rbar == rbar and r.feasible]
            k = len(sel)
            near = math.fsum(r.near_rate for r in sel) / k if k else math.nan
            far = math.fsum(r.far_rate for r in sel) / k if k else math.nan
            rows.append(RateRegionRow(rbar, scheme.value, near, far, k / n, k))
    return rows


def _write_rows(fh, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(r.rbar), r.scheme, repr(r.mean_near_rate), repr(r.mean_far_rate),
                    repr(r.feasible_frac), r.n_feasible])


def format_csv(rows):
    """The CSV text that :func:`write_csv` would write."""
    buf = io.StringIO()
    _write_rows(buf, rows)
    return buf.getvalue()


def write_csv(rows, path):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _write_rows(fh, rows)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write rate-region CSV {path!r}: {exc.strerror}") from exc


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        return [RateRegionRow(float(a), b, float(c), float(d), float(e), int(f))
                for a, b, c, d, e, f in rd]


def _trial_worker(args):
    cfg, trial = args
    return run_trial(cfg, trial)


def run_rate_region(cfg, write=True):
    """Sweep ``cfg.rbar_grid`` over ``cfg.n_trials`` channel draws.

    Trials run on ``cfg.workers`` processes; results are merged in trial
    order, so the output does not depend on the worker count.
    """
    jobs = [(cfg, t) for t in range(cfg.n_trials)]
    if cfg.workers > 1 and cfg.n_trials > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_trial = list(pool.map(_trial_worker, jobs, chunksize=1))
    else:
        per_trial = [_trial_worker(j) for j in jobs]
    records = [r for chunk in per_trial for r in chunk]
    rows = aggregate(cfg, records)
    fails = sum(r.numerical_failures for r in records)
    if fails:
        log.warning("%d SDP numerical failures across the sweep (treated as infeasible grid points)",
                    fails)
    result = RateRegionResult(rows, records, fails)
    if write and cfg.output_path:
        write_csv(rows, cfg.output_path)
        result.csv_path = os.fspath(cfg.output_path)
    return result


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return str(x)


def run_single(cfg, trial_index, rbar):
    """Plain-text diagnostic dump for one channel and one target."""
    p = cfg.params
    ch = model.sample_channels(p, model.trial_rng(cfg.seed, trial_index))
    r_t = float(sinr.r_tilde_of(rbar))
    lines = [f"trial {trial_index} seed {cfg.seed} rbar {_fmt(float(rbar))} r_tilde {_fmt(r_t)}"]
    pmax = sinr.ps_max(p, ch)
    try:
        qb = sinr.q_bounds(p, ch, pmax, r_t)
        lines.append(f"feasibility interval [v, ps_max] = [{_fmt(qb.v)}, {_fmt(qb.ps_max)}]")
        lines.append("q-bounds at ps_max: " + " ".join(
            f"{k}={_fmt(getattr(qb, k))}" for k in ("q1", "q2", "q3", "q4", "u")))
    except sinr.InfeasibleRate as exc:
        lines.append(f"q-bounds unavailable: {exc}")
    fixed_bf = fixedbf.mrt_mrc(ch)
    for scheme in cfg.schemes:
        if scheme is Scheme.OPTIMUM_FD:
            sp = optimizer.algorithm1(p, ch, rbar, steps=cfg.delta_ps_steps,
                                      stop=cfg.line_search, trace=True)
        else:
            sp = _solve_scheme(cfg, ch, scheme, rbar, fixed_bf)
        lines.append(f"[{scheme.value}] feasible={sp.feasible}")
        if sp.feasible:
            lines.append(f"  Ps={_fmt(sp.pa.Ps)} Pr={_fmt(sp.pa.Pr)} near_rate={_fmt(sp.near_rate)} "
                         f"far_rate={_fmt(sp.far_rate)}")
        else:
            lines.append(f"  reason: {sp.diag.get('reason')}")
        for key in ("rank_gap", "steps", "sdp_iterations", "infeasible", "numerical_failure",
                    "negative_bound", "rejected", "vtilde"):
            if key in sp.diag:
                lines.append(f"  {key}={_fmt(sp.diag[key])}")
        if "sinr" in sp.diag:
            lines.append("  " + " ".join(f"{k}={_fmt(v)}" for k, v in sp.diag["sinr"].items()))
        for ps, status, obj in sp.diag.get("trace", []):
            lines.append(f"  line-search Ps={_fmt(ps)} status={status} objective={_fmt(obj)}")
    return "\n".join(lines) + "\n"


@dataclass
class OracleReport:
    rows: list
    max_rel_gap: float
    agreement: float
    sandwich_ok: bool

    def format(self):
        out = ["channel rbar alg1_feasible oracle_feasible alg1_near oracle_near rel_gap"]
        for r in self.rows:
            out.append(" ".join(_fmt(x) for x in r))
        out.append(f"max relative gap {self.max_rel_gap:.6g}")
        out.append(f"feasibility agreement {self.agreement:.4f}")
        out.append(f"sandwich {'PASS' if self.sandwich_ok else 'FAIL'}")
        return "\n".join(out) + "\n"


def _cell_bound(p, ch, sp):
    # near-rate gain available from one more line-search step of BS power
    d = sp.diag.get("delta_ps", 0.0)
    if not d or not math.isfinite(d):
        return 0.0
    g1 = sinr.gamma_1(p, ch, sp.bf.wt, sp.pa)
    scale = (sp.pa.Ps + d) / sp.pa.Ps if sp.pa.Ps > 0 else 1.0
    return float(math.log2(1.0 + g1 * scale) - math.log2(1.0 + g1))


def run_oracle_check(cfg, n_channels, rbars=(0.5, 1.0, 1.5), rel_tol=0.02, grid=None):
    """Compare the line search against the brute-force grid on fresh channels."""
    if cfg.params.Nt != 2:
        raise ConfigError("oracle check needs Nt = 2")
    grid = grid or oracle.DEFAULT_GRID
    p = cfg.params
    rows, gaps, agree, total, ok = [], [], 0, 0, True
    for c in range(n_channels):
        ch = model.sample_channels(p, model.trial_rng(cfg.seed, c))
        for rbar in rbars:
            a = optimizer.algorithm1(p, ch, rbar, steps=cfg.delta_ps_steps, stop=cfg.line_search)
            o = oracle.grid_search(p, ch, rbar, **grid)
            total += 1
            agree += a.feasible == o.feasible
            gap = math.nan
            if a.feasible and o.feasible:
                gap = (o.near_rate - a.near_rate) / a.near_rate if a.near_rate > 0 else 0.0
                gaps.append(abs(gap))
                if o.near_rate < a.near_rate * (1 - rel_tol):
                    ok = False
                if o.near_rate > a.near_rate + _cell_bound(p, ch, a) + 1e-9:
                    ok = False
            rows.append((c, float(rbar), a.feasible, o.feasible, a.near_rate, o.near_rate, gap))
    return OracleReport(rows, max(gaps, default=0.0), agree / total if total else 1.0, ok)
