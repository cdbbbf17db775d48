"""Deterministic Monte Carlo harness over the random Laplacian models.

Reproducibility contract: trial i of an experiment draws from
default_rng(SeedSequence(master_seed, spawn_key=(*prefix, i))), where
prefix is () for plain experiments and (cell_index,) inside a phase
sweep.  Streams are derived per trial, never shared, so scheduling
cannot reorder draws; chunk aggregation folds in trial-index order.
Reports are therefore byte-identical for any worker count, and the
canonical JSON form keeps wall-clock timing out of the payload.

The hot path never materializes integer matrices: Laplacians are
sampled directly as residue arrays and ranked with the mod-p kernels.
"""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import CorankPmf, pmf_table
from .gflinalg import GfMatrix, RankTracker, rank_of_residue_array
from .graphs import ModelParams, laplacian, sample_bipartite_digraph, sample_er_digraph
from .snf import p_rank, sandpile_invariants

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "PhaseSweepCell",
    "PhaseSweepReport",
    "RankEvolutionBucket",
    "RankEvolutionReport",
    "SEED_RULE",
    "chi_square_vs_pmf",
    "run_corank_experiment",
    "run_full_rank_frequency",
    "run_phase_sweep",
    "run_rank_evolution",
    "run_snf_sample",
    "trial_rng",
    "tv_distance",
    "wilson_interval",
]

SEED_RULE = "seedseq-spawn-v1"

_MODELS = ("bipartite", "er", "iid_rect")
_STATISTICS = ("corank", "rank_evolution", "full_rank_at", "snf_sample")
_LAPLACIAN_MODELS = ("bipartite", "er")
_CHUNK = 512
_MIN_EXPECTED = 5.0


def trial_rng(master_seed: int, trial_index: int, prefix: tuple = ()) -> np.random.Generator:
    """The per-trial stream mandated by the seed rule."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(*prefix, trial_index))
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a model, a statistic, and the sampling budget.

    u is the extra-row count of the iid_rect model; row_count names the
    leading row block tested by full_rank_at; delta is the final-rows
    fraction observed by rank_evolution; comparison picks the limiting
    pmf a corank histogram is scored against.
    """

    model: str
    params: ModelParams
    trials: int
    master_seed: int
    statistic: str = "corank"
    u: Optional[int] = None
    row_count: Optional[int] = None
    delta: Optional[float] = None
    comparison: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {_MODELS}")
        if self.statistic not in _STATISTICS:
            raise ValueError(
                f"unknown statistic {self.statistic!r}; expected one of {_STATISTICS}"
            )
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.model == "iid_rect":
            if self.u is None or self.u < 0:
                raise ValueError("model iid_rect requires u >= 0")
        elif self.u is not None:
            raise ValueError(f"u applies only to iid_rect, not {self.model}")
        if self.statistic == "full_rank_at":
            rows = self.matrix_shape[0]
            if self.row_count is None or not 1 <= self.row_count <= rows:
                raise ValueError(
                    f"full_rank_at requires 1 <= row_count <= {rows}, got {self.row_count}"
                )
        elif self.row_count is not None:
            raise ValueError("row_count applies only to full_rank_at")
        if self.statistic == "rank_evolution":
            if self.delta is None or not 0 < self.delta < 1:
                raise ValueError(f"rank_evolution requires delta in (0, 1), got {self.delta}")
        elif self.delta is not None:
            raise ValueError("delta applies only to rank_evolution")
        if self.comparison is not None:
            if self.statistic != "corank":
                raise ValueError("comparison applies only to the corank statistic")
            if self.comparison == "theorem":
                if self.model not in _LAPLACIAN_MODELS:
                    raise ValueError("comparison 'theorem' expects a Laplacian model")
            elif self.comparison == "iid":
                if self.model != "iid_rect":
                    raise ValueError("comparison 'iid' expects the iid_rect model")
            else:
                raise ValueError(f"unknown comparison {self.comparison!r}")

    @property
    def matrix_shape(self) -> tuple[int, int]:
        n = self.params.n
        if self.model == "bipartite":
            order = n + self.params.m
            return (order, order)
        if self.model == "er":
            return (n, n)
        return (n + (self.u or 0), n)

    def echo(self) -> dict:
        """Config echo embedded in every report; m is spelled out."""
        return {
            "model": self.model,
            "n": self.params.n,
            "m": self.params.m if self.model == "bipartite" else None,
            "alpha": self.params.alpha,
            "q": self.params.q,
            "p": self.params.p,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "statistic": self.statistic,
            "u": self.u,
            "row_count": self.row_count,
            "delta": self.delta,
            "comparison": self.comparison,
        }


# ---------------------------------------------------------------------------
# statistics helpers
# ---------------------------------------------------------------------------

def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def tv_distance(a: CorankPmf, b: CorankPmf) -> float:
    """Half the l1 distance between the two masses over the union support."""
    keys = set(a.mass) | set(b.mass)
    return 0.5 * sum(abs(a.mass.get(k, 0.0) - b.mass.get(k, 0.0)) for k in keys)


def chi_square_vs_pmf(
    counts: dict[int, int], pmf: CorankPmf, trials: int
) -> tuple[float, int]:
    """Pearson statistic against a reference pmf, with the sparse tail merged.

    Buckets are the reference outcomes in increasing order; from the
    first outcome whose expected count drops below 5 everything above
    (plus any truncation remainder and out-of-support observations)
    is one open tail bucket, merged further down if still too thin.
    Returns (statistic, degrees of freedom); dof 0 means everything
    collapsed into a single bucket.
    """
    support = pmf.support()
    kept: list[int] = []
    for k in support:
        if pmf.mass[k] * trials < _MIN_EXPECTED:
            break
        kept.append(k)
    while kept:
        tail_expected = trials * (1.0 - sum(pmf.mass[k] for k in kept))
        if tail_expected >= _MIN_EXPECTED or len(kept) == len(support):
            break
        kept.pop()
    tail_expected = trials * (1.0 - sum(pmf.mass[k] for k in kept))
    tail_observed = trials - sum(counts.get(k, 0) for k in kept)
    stat = 0.0
    buckets = 0
    for k in kept:
        expected = pmf.mass[k] * trials
        diff = counts.get(k, 0) - expected
        stat += diff * diff / expected
        buckets += 1
    if tail_expected > 0.0:
        diff = tail_observed - tail_expected
        stat += diff * diff / tail_expected
        buckets += 1
    return (stat, max(buckets - 1, 0))


# ---------------------------------------------------------------------------
# per-trial kernels
# ---------------------------------------------------------------------------

def _sample_matrix(cfg: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    """Residue matrix of one trial; draw order matches the graphs module."""
    params = cfg.params
    n, q, p = params.n, params.q, params.p
    if cfg.model == "bipartite":
        m = params.m
        x12 = rng.random((n, m)) < q
        x21 = rng.random((m, n)) < q
        order = n + m
        lap = np.zeros((order, order), dtype=np.int64)
        lap[:n, n:] = x12
        lap[n:, :n] = x21
        degrees = np.concatenate([x12.sum(axis=1), x21.sum(axis=1)])
        lap[np.arange(order), np.arange(order)] = (-degrees) % p
        return lap
    if cfg.model == "er":
        adj = (rng.random((n, n)) < q).astype(np.int64)
        np.fill_diagonal(adj, 0)
        np.fill_diagonal(adj, (-adj.sum(axis=1)) % p)
        return adj
    rows = n + cfg.u
    return (rng.random((rows, n)) < q).astype(np.int64)


def _corank_outcome(cfg: ExperimentConfig, lap: np.ndarray) -> int:
    corank = lap.shape[1] - rank_of_residue_array(cfg.params.p, lap)
    if cfg.model in _LAPLACIAN_MODELS and corank < 1:
        raise RuntimeError(
            "Laplacian trial produced corank 0; the all-ones kernel vector "
            "guarantees corank >= 1, so this indicates a rank bug"
        )
    return corank


def _snf_outcome(cfg: ExperimentConfig, rng: np.random.Generator) -> int:
    params = cfg.params
    if cfg.model == "bipartite":
        graph = sample_bipartite_digraph(params, rng)
    else:
        graph = sample_er_digraph(params.n, params.q, rng)
    intlap = laplacian(graph)
    residues = np.array(intlap.tolists(), dtype=np.int64) % params.p
    corank = _corank_outcome(cfg, residues)
    factors = sandpile_invariants(intlap)
    via_snf = 1 + factors.free_rank + p_rank(factors, params.p)
    if corank != via_snf:
        raise RuntimeError(
            f"corank mod {params.p} is {corank} but invariant factors give "
            f"{via_snf}; the two paths must agree"
        )
    return corank


def _run_chunk(
    cfg: ExperimentConfig, start: int, stop: int, prefix: tuple
) -> dict:
    """Aggregate of trials [start, stop); merged by the caller in order."""
    if cfg.statistic == "rank_evolution":
        buckets: dict[int, list[int]] = {}
        p = cfg.params.p
        total_rows, width = cfg.matrix_shape
        observe_from = total_rows - math.floor(cfg.delta * total_rows)
        for i in range(start, stop):
            lap = _sample_matrix(cfg, trial_rng(cfg.master_seed, i, prefix))
            tracker = RankTracker(GfMatrix.zeros(p, 0, width))
            for r in range(total_rows):
                if r < observe_from:
                    tracker.add_row_array(lap[r])
                    continue
                codim = tracker.corank
                in_span, _ = tracker.add_row_array(lap[r])
                cell = buckets.setdefault(codim, [0, 0])
                cell[0] += 1
                cell[1] += int(in_span)
        return {"buckets": buckets}
    counts: Counter = Counter()
    for i in range(start, stop):
        rng = trial_rng(cfg.master_seed, i, prefix)
        if cfg.statistic == "snf_sample":
            outcome = _snf_outcome(cfg, rng)
        else:
            lap = _sample_matrix(cfg, rng)
            if cfg.statistic == "corank":
                outcome = _corank_outcome(cfg, lap)
            else:
                block = lap[: cfg.row_count]
                outcome = int(
                    rank_of_residue_array(cfg.params.p, block) == cfg.row_count
                )

        counts[outcome] += 1
    return {"counts": counts}


def _run_chunk_call(args):
    return _run_chunk(*args)


def _execute(cfg: ExperimentConfig, prefix: tuple = ()) -> dict:
    spans = [
        (s, min(s + _CHUNK, cfg.trials)) for s in range(0, cfg.trials, _CHUNK)
    ]
    if cfg.workers == 1:
        parts = [_run_chunk(cfg, s, e, prefix) for s, e in spans]
    else:
        jobs = [(cfg, s, e, prefix) for s, e in spans]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_chunk_call, jobs))
    if cfg.statistic == "rank_evolution":
        merged: dict[int, list[int]] = {}
        for part in parts:
            for codim, (exp, hit) in part["buckets"].items():
                cell = merged.setdefault(codim, [0, 0])
                cell[0] += exp
                cell[1] += hit
        return {"buckets": merged}
    counts: Counter = Counter()
    for part in parts:
        counts.update(part["counts"])
    return {"counts": counts}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _json_default(obj):
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


@dataclass(frozen=True)
class ExperimentReport:
    """Histogram-shaped result with intervals and reference comparisons."""

    config: dict
    counts: dict[int, int]
    pmf: dict[int, float]
    intervals: dict[int, tuple[float, float]]
    tv_distance: Optional[float]
    chi_square: Optional[tuple[float, int]]
    wall_time_ms: Optional[float]
    seed_rule: str = SEED_RULE

    def __post_init__(self):
        trials = self.config["trials"]
        if sum(self.counts.values()) != trials:
            raise ValueError("outcome counts must sum to the trial count")
        for lo, hi in self.intervals.values():
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"interval ({lo}, {hi}) escapes [0, 1]")

    def empirical_pmf(self) -> CorankPmf:
        return CorankPmf.from_counts(self.config["p"], self.counts)

    def to_json_dict(self, include_timing: bool = False) -> dict:
        return {
            "config": self.config,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "pmf": {str(k): v for k, v in sorted(self.pmf.items())},
            "intervals": {
                str(k): list(v) for k, v in sorted(self.intervals.items())
            },
            "tv_distance": self.tv_distance,
            "chi_square": list(self.chi_square) if self.chi_square else None,
            "wall_time_ms": self.wall_time_ms if include_timing else None,
            "seed_rule": self.seed_rule,
        }

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(
            self.to_json_dict(include_timing),
            sort_keys=True,
            indent=2,
            default=_json_default,
        ) + "\n"

    def to_csv(self) -> str:
        lines = ["outcome,count,frequency,wilson_lo,wilson_hi"]
        for k in sorted(self.counts):
            lo, hi = self.intervals[k]
            lines.append(f"{k},{self.counts[k]},{self.pmf[k]!r},{lo!r},{hi!r}")
        if self.tv_distance is not None:
            lines.append(f"# tv_distance={self.tv_distance!r}")
        if self.chi_square is not None:
            stat, dof = self.chi_square
            lines.append(f"# chi_square={stat!r} dof={dof}")
        return "\n".join(lines) + "\n"


def _comparison_pmf(cfg: ExperimentConfig, counts: dict[int, int]) -> Optional[CorankPmf]:
    if cfg.comparison is None:
        return None
    k_max = max(40, max(counts) + 5)
    if cfg.comparison == "theorem":
        return pmf_table(cfg.params.p, "theorem", k_max=k_max)
    return pmf_table(cfg.params.p, "iid", k_max=k_max, u=cfg.u)


def _histogram_report(cfg: ExperimentConfig, counts: Counter, elapsed_ms: float) -> ExperimentReport:
    reference = _comparison_pmf(cfg, counts)
    pmf = {k: counts[k] / cfg.trials for k in sorted(counts)}
    intervals = {k: wilson_interval(counts[k], cfg.trials) for k in sorted(counts)}
    tv = chi = None
    if reference is not None:
        empirical = CorankPmf.from_counts(cfg.params.p, dict(counts))
        tv = tv_distance(empirical, reference)
        chi = chi_square_vs_pmf(dict(counts), reference, cfg.trials)
    return ExperimentReport(
        config=cfg.echo(),
        counts=dict(sorted(counts.items())),
        pmf=pmf,
        intervals=intervals,
        tv_distance=tv,
        chi_square=chi,
        wall_time_ms=elapsed_ms,
    )


def run_corank_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Corank histogram over independent trials, scored against theory."""
    if cfg.statistic != "corank":
        raise ValueError(f"expected statistic 'corank', got {cfg.statistic!r}")
    t0 = time.perf_counter()
    counts = _execute(cfg)["counts"]
    return _histogram_report(cfg, counts, (time.perf_counter() - t0) * 1e3)


def run_full_rank_frequency(cfg: ExperimentConfig) -> ExperimentReport:
    """Frequency that the leading row_count rows have full row rank.

    Outcome 1 means full rank; outcome 0 means deficient.
    """
    if cfg.statistic != "full_rank_at":
        raise ValueError(f"expected statistic 'full_rank_at', got {cfg.statistic!r}")
    t0 = time.perf_counter()
    counts = _execute(cfg)["counts"]
    counts.setdefault(0, 0)
    counts.setdefault(1, 0)
    return _histogram_report(cfg, counts, (time.perf_counter() - t0) * 1e3)


def run_snf_sample(cfg: ExperimentConfig) -> ExperimentReport:
    """Corank histogram computed through integer invariant factors.

    Every trial cross-checks corank mod p against free rank plus the
    count of p-divisible invariant factors; disagreement aborts.
    """
    if cfg.statistic != "snf_sample":
        raise ValueError(f"expected statistic 'snf_sample', got {cfg.statistic!r}")
    if cfg.model not in _LAPLACIAN_MODELS:
        raise ValueError("snf_sample runs on Laplacian models")
    t0 = time.perf_counter()
    counts = _execute(cfg)["counts"]
    return _histogram_report(cfg, counts, (time.perf_counter() - t0) * 1e3)


@dataclass(frozen=True)
class RankEvolutionBucket:
    codimension: int
    exposures: int
    hits_in_span: int
    expected: float
    wilson: tuple[float, float]

    def __post_init__(self):
        if not 0 <= self.hits_in_span <= self.exposures:
            raise ValueError("hits must lie within exposures")


@dataclass(frozen=True)
class RankEvolutionReport:
    """Span-hit frequencies of late rows, bucketed by observed codimension."""

    config: dict
    buckets: tuple[RankEvolutionBucket, ...]
    wall_time_ms: Optional[float]
    seed_rule: str = SEED_RULE

    def bucket(self, codimension: int) -> Optional[RankEvolutionBucket]:
        for b in self.buckets:
            if b.codimension == codimension:
                return b
        return None

    def to_json_dict(self, include_timing: bool = False) -> dict:
        return {
            "config": self.config,
            "buckets": [
                {
                    "codimension": b.codimension,
                    "exposures": b.exposures,
                    "hits_in_span": b.hits_in_span,
                    "frequency": b.hits_in_span / b.exposures,
                    "expected": b.expected,
                    "wilson": list(b.wilson),
                }
                for b in self.buckets
            ],
            "wall_time_ms": self.wall_time_ms if include_timing else None,
            "seed_rule": self.seed_rule,
        }

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(
            self.to_json_dict(include_timing),
            sort_keys=True,
            indent=2,
            default=_json_default,
        ) + "\n"

    def to_csv(self) -> str:
        lines = ["codimension,exposures,hits_in_span,frequency,expected,wilson_lo,wilson_hi"]
        for b in self.buckets:
            freq = b.hits_in_span / b.exposures
            lines.append(
                f"{b.codimension},{b.exposures},{b.hits_in_span},{freq!r},"
                f"{b.expected!r},{b.wilson[0]!r},{b.wilson[1]!r}"
            )
        return "\n".join(lines) + "\n"


def run_rank_evolution(cfg: ExperimentConfig) -> RankEvolutionReport:
    """Expose all rows in order; on the final floor(delta * rows) additions
    record whether the incoming row already lay in the span, keyed by the
    codimension of the row space at that moment.

    For Laplacian models every row lies in the zero-coordinate-sum
    hyperplane, so a row space of codimension l is hit with limiting
    probability 1/p^(l-1); that value is tabulated as `expected`.
    """
    if cfg.statistic != "rank_evolution":
        raise ValueError(f"expected statistic 'rank_evolution', got {cfg.statistic!r}")
    t0 = time.perf_counter()
    raw = _execute(cfg)["buckets"]
    p = cfg.params.p
    buckets = tuple(
        RankEvolutionBucket(
            codimension=codim,
            exposures=exposures,
            hits_in_span=hits,
            expected=float(p) ** -(codim - 1),
            wilson=wilson_interval(hits, exposures),
        )
        for codim, (exposures, hits) in sorted(raw.items())
    )
    return RankEvolutionReport(
        config=cfg.echo(),
        buckets=buckets,
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )


@dataclass(frozen=True)
class PhaseSweepCell:
    alpha: float
    n: int
    m: int
    trials: int
    mean_corank: float
    stderr: Optional[float]


@dataclass(frozen=True)
class PhaseSweepReport:
    p: int
    q: float
    master_seed: int
    trials_per_cell: int
    cells: tuple[PhaseSweepCell, ...]
    wall_time_ms: Optional[float]
    seed_rule: str = SEED_RULE

    def cell(self, alpha: float, n: int) -> Optional[PhaseSweepCell]:
        for c in self.cells:
            if c.alpha == alpha and c.n == n:
                return c
        return None

    def to_json_dict(self, include_timing: bool = False) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "master_seed": self.master_seed,
            "trials_per_cell": self.trials_per_cell,
            "cells": [
                {
                    "alpha": c.alpha,
                    "n": c.n,
                    "m": c.m,
                    "trials": c.trials,
                    "mean_corank": c.mean_corank,
                    "stderr": c.stderr,
                }
                for c in self.cells
            ],
            "wall_time_ms": self.wall_time_ms if include_timing else None,
            "seed_rule": self.seed_rule,
        }

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(
            self.to_json_dict(include_timing),
            sort_keys=True,
            indent=2,
            default=_json_default,
        ) + "\n"

    def to_csv(self) -> str:
        lines = ["alpha,n,m,trials,mean_corank,stderr"]
        for c in self.cells:
            stderr = "" if c.stderr is None else repr(c.stderr)
            lines.append(f"{c.alpha!r},{c.n},{c.m},{c.trials},{c.mean_corank!r},{stderr}")
        return "\n".join(lines) + "\n"


def run_phase_sweep(
    alphas,
    ns,
    p: int,
    q: float,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> PhaseSweepReport:
    """Mean corank of the bipartite Laplacian over an (alpha, n) grid.

    Cell (i, j) in row-major order over alphas x ns derives its trial
    streams with prefix (cell_index,), so adding or reordering cells
    never changes another cell's samples.  stderr is the sample
    standard deviation over sqrt(trials), None when trials < 2.
    """
    t0 = time.perf_counter()
    cells = []
    cell_index = 0
    for alpha in alphas:
        for n in ns:
            params = ModelParams(n=n, alpha=alpha, q=q, p=p, seed=master_seed)
            cfg = ExperimentConfig(
                model="bipartite",
                params=params,
                trials=trials,
                master_seed=master_seed,
                statistic="corank",
                workers=workers,
            )
            counts = _execute(cfg, prefix=(cell_index,))["counts"]
            values = np.repeat(
                np.fromiter(counts.keys(), dtype=np.int64, count=len(counts)),
                np.fromiter(counts.values(), dtype=np.int64, count=len(counts)),
            )
            mean = float(values.mean())
            stderr = (
                float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else None
            )
            cells.append(
                PhaseSweepCell(
                    alpha=float(alpha),
                    n=int(n),
                    m=params.m,
                    trials=trials,
                    mean_corank=mean,
                    stderr=stderr,
                )
            )
            cell_index += 1
    return PhaseSweepReport(
        p=p,
        q=q,
        master_seed=master_seed,
        trials_per_cell=trials,
        cells=tuple(cells),
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
