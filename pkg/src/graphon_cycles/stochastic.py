"""Samplers: community sizes, graphs, the Gaussian limit, and the p* estimator."""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cone import (FacetSet, Regime, active_facets, classify_regime, facet_hyperplanes,
                   incidence_matrix)
from .graphon import SampledGraph, StepGraphon, concentration_vector, skeleton_graph
from .rng import LaneRng, RngStream, cumulative_thresholds, derive_seeds, uniform_threshold

# Label mixed into per-lane seeds of the p* estimator.
PSTAR_LABEL = 0x505354  # "PST"
PSTAR_LANES = 1024
DEFAULT_PSTAR_SAMPLES = 1_000_000


def graphon_label(w: StepGraphon | str) -> int:
    """Stable integer id for seed derivation."""
    name = w if isinstance(w, str) else w.name
    return zlib.crc32(name.encode("utf-8"))


def sample_labels(xstar: Sequence[Fraction], n: int, rng: RngStream) -> list[int]:
    """n categorical draws (community of each node, in draw order)."""
    cuts = cumulative_thresholds(xstar)
    return [rng.categorical(cuts) for _ in range(n)]


def sample_community_sizes(xstar: Sequence[Fraction], n: int, rng: RngStream) -> tuple[int, ...]:
    """Multinomial(n, x*) counts built from n categorical draws."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    counts = [0] * len(xstar)
    for c in sample_labels(xstar, n, rng):
        counts[c] += 1
    return tuple(counts)


def lane_community_sizes(xstar: Sequence[Fraction], n: int, lanes: LaneRng) -> np.ndarray:
    """Community sizes for every lane at once; lane k matches ``sample_community_sizes`` on stream k."""
    cuts = cumulative_thresholds(xstar)
    q = len(xstar)
    counts = np.zeros((lanes.lanes, q), dtype=np.int64)
    rows = np.arange(lanes.lanes)
    for _ in range(n):
        counts[rows, lanes.categorical(cuts)] += 1
    return counts


def sample_graph(w: StepGraphon, n: int, rng: RngStream) -> SampledGraph:
    """Two-step sampler.

    Draws n community labels, orders nodes by community, then visits pairs
    (i, j), i < j, in lexicographic order; a uniform is consumed only for
    block values strictly between 0 and 1. For 0/1 graphons the result is
    exactly K_y.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    y = sample_community_sizes(concentration_vector(w), n, rng)
    lab = np.repeat(np.arange(w.q), y)
    ones = np.array([[v == 1 for v in row] for row in w.values], dtype=bool)
    partial = np.array([[0 < v < 1 for v in row] for row in w.values], dtype=bool)
    adj = np.triu(ones[np.ix_(lab, lab)], 1)
    if partial.any():
        thresholds = [[uniform_threshold(v) for v in row] for row in w.values]
        # row-major nonzero order is the lexicographic pair order
        rows, cols = np.nonzero(np.triu(partial[np.ix_(lab, lab)], 1))
        for i, j in zip(rows.tolist(), cols.tolist()):
            adj[i, j] = rng.bernoulli(thresholds[lab[i]][lab[j]])
    adj |= adj.T
    return SampledGraph(adj, lab.tolist())


@dataclass(frozen=True)
class GaussianModel:
    """N(x*, diag(x*) - x* x*^T) with a factor U (q x (q-1)), Sigma = U U^T."""

    xstar: np.ndarray
    sigma_matrix: np.ndarray
    factor: np.ndarray


def build_gaussian(xstar: Sequence) -> GaussianModel:
    x = np.array([float(v) for v in xstar])
    if x.ndim != 1 or (x <= 0).any() or abs(x.sum() - 1.0) > 1e-12:
        raise ValueError("x* must be a strictly positive probability vector")
    sigma = np.diag(x) - np.outer(x, x)
    evals, evecs = np.linalg.eigh(sigma)
    # eigh sorts ascending; the single null direction (along 1) comes first
    keep = evals[1:]
    factor = evecs[:, 1:] * np.sqrt(np.clip(keep, 0.0, None))
    return GaussianModel(x, sigma, factor)


def sample_omega_star(model: GaussianModel, rng: RngStream) -> np.ndarray:
    g = np.array(rng.normals(model.factor.shape[1]))
    return model.xstar + model.factor @ g


@dataclass(frozen=True)
class PStarEstimate:
    mean: float
    stderr: float
    samples: int
    note: str = ""


def _estimate(mean: float, samples: int, note: str = "") -> PStarEstimate:
    stderr = float(np.sqrt(mean * (1 - mean) / samples)) if samples else 0.0
    return PStarEstimate(mean, stderr, samples, note)


def _lane_counts(samples: int, lanes: int) -> np.ndarray:
    counts = np.full(lanes, samples // lanes, dtype=np.int64)
    counts[: samples % lanes] += 1
    return counts


def _omega_hits(xstar: tuple[float, ...], normals: tuple[tuple[int, ...], ...], master_seed: int,
                lane_ids: np.ndarray, per_lane: np.ndarray) -> int:
    """Count Omega* hits for a block of lanes; lane k draws ``per_lane[k]`` samples in order."""
    model = build_gaussian(xstar)
    v = np.array(normals, dtype=np.float64)
    rng = LaneRng(derive_seeds(master_seed, [PSTAR_LABEL], lane_ids))
    dim = model.factor.shape[1]
    hits = 0
    for step in range(int(per_lane.max(initial=0))):
        g = rng.normals(dim)
        omega = model.xstar + g @ model.factor.T
        ok = (omega @ v.T >= 0).all(axis=1) if len(normals) else np.ones(len(g), dtype=bool)
        hits += int(ok[per_lane > step].sum())
    return hits


def omega_star_frequency(xstar: Sequence, facets: FacetSet, num_samples: int, master_seed: int,
                         workers: int = 1) -> PStarEstimate:
    """Monte-Carlo frequency of omega* in Omega* for the active facets of ``facets``.

    Samples are spread over a fixed number of lanes (independent streams);
    lanes are split across workers, so the result does not depend on ``workers``.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    normals = facets.active_normals()
    xs = tuple(float(v) for v in xstar)
    lanes = min(PSTAR_LANES, num_samples)
    per_lane = _lane_counts(num_samples, lanes)
    lane_ids = np.arange(lanes)
    if workers <= 1:
        hits = _omega_hits(xs, normals, master_seed, lane_ids, per_lane)
    else:
        blocks = np.array_split(lane_ids, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_omega_hits, [xs] * len(blocks), [normals] * len(blocks),
                                [master_seed] * len(blocks), blocks,
                                [per_lane[b] for b in blocks]))
    return _estimate(hits / num_samples, num_samples)


def estimate_p_star(w: StepGraphon, num_samples: int = DEFAULT_PSTAR_SAMPLES, master_seed: int = 42,
                    workers: int = 1) -> PStarEstimate:
    """p* = P(omega* in Omega*).

    Item1 returns 1 and Item3 returns 0 analytically; Item2 has no Omega*.
    """
    report = classify_regime(w)
    if report.regime is Regime.ITEM2:
        raise ValueError("Omega* undefined: x* outside edge cone")
    if report.regime is Regime.ITEM1:
        return PStarEstimate(1.0, 0.0, 0, "x* interior: Omega* = L, p* = 1 without sampling")
    if report.regime is Regime.ITEM3:
        return PStarEstimate(0.0, 0.0, 0, "degenerate cone: Omega* is measure-zero in L, p* = 0")
    xstar = concentration_vector(w)
    facets = active_facets(facet_hyperplanes(incidence_matrix(skeleton_graph(w))), xstar)
    return omega_star_frequency(xstar, facets, num_samples, master_seed, workers)


def hoeffding_bound(q: int, n: int, delta: float) -> float:
    """Upper bound on P(||x(G_n) - x*||_2 > delta): 2q exp(-2 n delta^2 / q)."""
    return 2 * q * float(np.exp(-2 * n * delta ** 2 / q))


def tail_frequency(xstar: Sequence[Fraction], n: int, delta: float, batches: int,
                   master_seed: int) -> tuple[float, float]:
    """Empirical P(||x(G_n) - x*||_2 > delta) over independent multinomial batches, with stderr."""
    lanes = LaneRng(derive_seeds(master_seed, [n], np.arange(batches)))
    y = lane_community_sizes(xstar, n, lanes)
    dev = np.linalg.norm(y / n - np.array([float(v) for v in xstar]), axis=1)
    p = float((dev > delta).mean())
    return p, float(np.sqrt(p * (1 - p) / batches))


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


__all__ = [
    "GaussianModel", "PStarEstimate", "build_gaussian", "estimate_p_star", "graphon_label",
    "hoeffding_bound", "lane_community_sizes", "omega_star_frequency", "sample_community_sizes",
    "sample_graph", "sample_labels", "sample_omega_star", "tail_frequency", "default_workers",
]
