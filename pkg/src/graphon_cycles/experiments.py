"""Seeded sweep harness: empirical cycle-cover probabilities and rate fits.

Every trial owns an RNG stream derived from (master seed, graphon id, n,
trial index), so results never depend on how trials are sharded. For 0/1
graphons a sampled graph is exactly K_y, so a trial reduces to drawing the
community sizes y and deciding K_y; many lanes are drawn at once and each
distinct y is decided once.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cone import EdgeCone, Regime, classify_regime
from .cyclecover import complete_partite_cover, has_cycle_cover
from .graphon import SkeletonGraph, StepGraphon, concentration_vector, load_graphon, skeleton_graph
from .rng import LaneRng, RngStream, derive_seeds, derive_trial_seed
from .stochastic import PStarEstimate, graphon_label, lane_community_sizes, sample_graph

log = logging.getLogger(__name__)

DEFAULT_TRIALS = 20_000
LANE_CHUNK = 8192
DEFAULT_N_GRID = tuple(range(10, 201, 10))
ROOT_N_GRID = tuple(range(100, 1201, 100))


class Coordinates(str, enum.Enum):
    LOG_P_VS_N = "LogPvsN"
    LOG_1MP_VS_N = "Log1mPvsN"
    LOG_P_VS_LOG_N = "LogPvsLogN"
    LOG_ABS_DEV_VS_LOG_N = "LogAbsDevVsLogN"


COORDINATES_FOR_REGIME = {
    Regime.ITEM1: Coordinates.LOG_1MP_VS_N,
    Regime.ITEM2: Coordinates.LOG_P_VS_N,
    Regime.ITEM3: Coordinates.LOG_P_VS_LOG_N,
    Regime.ITEM4: Coordinates.LOG_ABS_DEV_VS_LOG_N,
}


@dataclass(frozen=True)
class SweepConfig:
    graphon: str
    n_list: tuple[int, ...]
    trials: int = DEFAULT_TRIALS
    master_seed: int = 42
    workers: int = 1
    out_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly increasing")
        if self.n_list[0] < 0:
            raise ValueError("n must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class TrialBatch:
    n: int
    trials: int
    successes: int

    def __post_init__(self) -> None:
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def saturated(self) -> bool:
        """p_hat in {0, 1}: the log transforms are undefined, so fits skip it."""
        return self.successes in (0, self.trials)


@dataclass(frozen=True)
class SweepResult:
    graphon: str
    batches: tuple[TrialBatch, ...]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    coordinates: Optional[Coordinates]
    points_used: int
    residual_rms: float
    points: tuple[tuple[float, float], ...] = field(repr=False, default=())


@dataclass(frozen=True)
class RateReport:
    graphon: str
    regime: Regime
    fit: FitResult
    predicted_slope_sign: int = -1
    theoretical_exponent: Optional[float] = None


# --- trials -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _edge_cone(s: SkeletonGraph) -> EdgeCone:
    return EdgeCone(s)


@lru_cache(maxsize=200_000)
def _ky_cover(s: SkeletonGraph, y: tuple[int, ...]) -> bool:
    return complete_partite_cover(s, y, _edge_cone(s))


def complete_partite_batch(s: SkeletonGraph, ys: np.ndarray) -> np.ndarray:
    """Vectorised K_y cycle-cover decision for many size vectors (rows of ``ys``).

    Same layering as ``decide_complete_partite``; rows left Unknown go to the
    exact matcher, once per distinct y.
    """
    ys = np.asarray(ys, dtype=np.int64)
    if len(ys) == 0:
        return np.zeros(0, dtype=bool)
    uniq, inverse = np.unique(ys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    cone = _edge_cone(s)
    adj = s.adjacency.astype(np.int64)
    loops = np.diag(adj).copy()
    off = adj - np.diag(loops)
    degree = uniq @ off.T + loops * (uniq - 1)
    nonempty = uniq > 0
    no = (uniq.sum(axis=1) <= 2) | (nonempty & (degree < 2)).any(axis=1)
    no |= ~cone.contains_many(uniq)
    yes = ~no & ((uniq >= 3) | ~nonempty).all(axis=1)
    result = yes.copy()
    for r in np.flatnonzero(~no & ~yes):
        result[r] = _ky_cover(s, tuple(int(v) for v in uniq[r]))
    return result[inverse]


def _count_successes(w: StepGraphon, n: int, master_seed: int, start: int, stop: int) -> int:
    gid = graphon_label(w)
    s = skeleton_graph(w)
    if w.is_zero_one:
        xstar = concentration_vector(w)
        total = 0
        for lo in range(start, stop, LANE_CHUNK):
            hi = min(stop, lo + LANE_CHUNK)
            lanes = LaneRng(derive_seeds(master_seed, [gid, n], np.arange(lo, hi)))
            ys = lane_community_sizes(xstar, n, lanes)
            total += int(complete_partite_batch(s, ys).sum())
        return total
    context = (s, _edge_cone(s))
    total = 0
    for t in range(start, stop):
        g = sample_graph(w, n, RngStream(derive_trial_seed(master_seed, [gid, n, t])))
        total += has_cycle_cover(g, context).exists
    return total


def trial_outcome(w: StepGraphon, n: int, master_seed: int, trial: int) -> bool:
    """One trial through the general path (sample G_n, then detect); the reference for the batch path."""
    s = skeleton_graph(w)
    g = sample_graph(w, n, RngStream(derive_trial_seed(master_seed, [graphon_label(w), n, trial])))
    return has_cycle_cover(g, (s, _edge_cone(s))).exists


def _shards(trials: int, workers: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]


def empirical_probability(w: StepGraphon, n: int, trials: int, master_seed: int = 42,
                          workers: int = 1, pool: ProcessPoolExecutor | None = None) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    shards = _shards(trials, workers)
    if pool is None or len(shards) == 1:
        successes = sum(_count_successes(w, n, master_seed, a, b) for a, b in shards)
    else:
        futures = [pool.submit(_count_successes, w, n, master_seed, a, b) for a, b in shards]
        successes = sum(f.result() for f in futures)
    return TrialBatch(n, trials, successes)


def run_sweep(config: SweepConfig, graphon: StepGraphon | None = None) -> SweepResult:
    w = graphon if graphon is not None else load_graphon(config.graphon)
    batches = []
    pool = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for n in config.n_list:
            batch = empirical_probability(w, n, config.trials, config.master_seed, config.workers, pool)
            log.info("graphon=%s n=%d successes=%d/%d", w.name, n, batch.successes, batch.trials)
            batches.append(batch)
    finally:
        if pool is not None:
            pool.shutdown()
    result = SweepResult(w.name, tuple(batches))
    if config.out_dir is not None:
        write_outputs([result], [], config.out_dir)
    return result


# --- fits -------------------------------------------------------------------


def linear_fit(points: Sequence[tuple[float, float]],
               coordinates: Optional[Coordinates] = None) -> FitResult:
    """Ordinary least squares y = slope * x + intercept."""
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 2:
        raise ValueError("a linear fit needs at least two points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x values coincide")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return FitResult(slope, intercept, coordinates, len(pts), rms, pts)


def fit_points(sweep: SweepResult, coordinates: Coordinates,
               pstar: Optional[float] = None) -> list[tuple[float, float]]:
    pts = []
    for b in sweep.batches:
        if b.saturated or b.n < 1:
            continue
        p = b.p_hat
        if coordinates is Coordinates.LOG_P_VS_N:
            pts.append((b.n, math.log(p)))
        elif coordinates is Coordinates.LOG_1MP_VS_N:
            pts.append((b.n, math.log(1 - p)))
        elif coordinates is Coordinates.LOG_P_VS_LOG_N:
            pts.append((math.log(b.n), math.log(p)))
        else:
            dev = abs(p - pstar)
            if dev > 0:
                pts.append((math.log(b.n), math.log(dev)))
    return pts


def rate_report(w: StepGraphon, sweep: SweepResult, pstar: PStarEstimate | float | None = None) -> RateReport:
    """Fit the sweep in the coordinates its regime calls for."""
    if not sweep.batches:
        raise ValueError("sweep has no batches")
    regime = classify_regime(w).regime
    coords = COORDINATES_FOR_REGIME[regime]
    p = None
    if regime is Regime.ITEM4:
        if pstar is None:
            raise ValueError("regime Item4 needs a p* estimate")
        p = pstar.mean if isinstance(pstar, PStarEstimate) else float(pstar)
    pts = fit_points(sweep, coords, p)
    if not pts:
        raise ValueError("every batch is saturated (p_hat in {0,1}); nothing to fit")
    fit = linear_fit(pts, coords)
    exponent = -0.5 if regime in (Regime.ITEM3, Regime.ITEM4) else None
    return RateReport(w.name, regime, fit, -1, exponent)


# --- files ------------------------------------------------------------------

CSV_HEADER = ("graphon", "n", "trials", "successes", "p_hat", "stderr")


def _g(v: float) -> str:
    return "%.10g" % v


def sweep_csv(sweeps: Sequence[SweepResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for sw in sweeps:
        for b in sw.batches:
            writer.writerow([sw.graphon, b.n, b.trials, b.successes, _g(b.p_hat), _g(b.stderr)])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepResult]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_HEADER:
        raise ValueError(f"sweep CSV must have header {','.join(CSV_HEADER)}")
    grouped: dict[str, list[TrialBatch]] = {}
    for row in reader:
        grouped.setdefault(row["graphon"], []).append(
            TrialBatch(int(row["n"]), int(row["trials"]), int(row["successes"])))
    return [SweepResult(name, tuple(bs)) for name, bs in grouped.items()]


def fit_record(graphon: str, fit: FitResult) -> dict:
    return {
        "graphon": graphon,
        "coordinates": fit.coordinates.value if fit.coordinates else None,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual_rms": fit.residual_rms,
        "points_used": fit.points_used,
    }


def plot_data(fit: FitResult) -> str:
    lines = [f"# fit: slope={_g(fit.slope)} intercept={_g(fit.intercept)}"]
    lines += [f"{_g(x)} {_g(y)}" for x, y in fit.points]
    return "\n".join(lines) + "\n"


def write_outputs(sweeps: Sequence[SweepResult], fits: Sequence[tuple[str, FitResult]],
                  directory: Path | str) -> list[Path]:
    """Write sweep.csv, fits.json and one fit_<graphon>_<coordinates>.dat per fit."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / "sweep.csv"
    path.write_text(sweep_csv(sweeps), encoding="utf-8")
    written.append(path)
    path = out / "fits.json"
    path.write_text(json.dumps([fit_record(g, f) for g, f in fits], indent=2) + "\n", encoding="utf-8")
    written.append(path)
    for graphon, fit in fits:
        tag = fit.coordinates.value if fit.coordinates else "fit"
        path = out / f"fit_{graphon}_{tag}.dat"
        path.write_text(plot_data(fit), encoding="utf-8")
        written.append(path)
    return written
