"""Benchmark orchestration and statistical validation of the distance model.

Provides the standard synthetic benchmark driver (error rate, mean
L_checks/R, timing, early-stop rate per method), budget sweeps over the
evaluation cap, and a Monte-Carlo check of the chi-square / normal
asymptotics that the likelihood-directed search relies on.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .descriptor import GridDescriptor
from .metrics import KL, MetricConfig, kl_divergence_blocks
from .search import (
    SearchConfig,
    SearchIndex,
    build_index,
    search,
)
from .synth import SynthSpec

BENCH_CSV_COLUMNS = (
    "method",
    "metric",
    "delta",
    "e_max",
    "error_rate",
    "mean_l_checks_ratio",
    "mean_elapsed_ms",
    "early_stop_rate",
)

SWEEP_CSV_COLUMNS = (
    "fraction",
    "e_max",
    "error_rate",
    "mean_l_checks_ratio",
    "early_stop_rate",
)


@dataclass(frozen=True)
class BenchRow:
    """Aggregated outcome of one method over all queries."""

    method: str
    e_max: int
    error_rate: float
    mean_l_checks_ratio: float
    mean_elapsed: float
    early_stop_rate: float


@dataclass(frozen=True)
class BenchReport:
    """Per-method benchmark rows plus dataset context."""

    metric_kind: str
    delta: int
    num_models: int
    num_queries: int
    rows: tuple[BenchRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(BENCH_CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                [
                    row.method,
                    self.metric_kind,
                    self.delta,
                    row.e_max,
                    f"{row.error_rate:.6f}",
                    f"{row.mean_l_checks_ratio:.6f}",
                    f"{row.mean_elapsed * 1e3:.3f}",
                    f"{row.early_stop_rate:.6f}",
                ]
            )
        return buf.getvalue()


def run_benchmark(
    models: Sequence[GridDescriptor],
    queries: Sequence[GridDescriptor],
    metric: MetricConfig,
    configs: Sequence[SearchConfig],
    beta: float = 0.01,
    index: Optional[SearchIndex] = None,
    cancellation: bool = True,
) -> BenchReport:
    """Run every configured method over every query against one index.

    The index is built once per call (or supplied). Queries are processed
    one at a time on the calling thread; per-query timing uses a monotonic
    clock and each method gets one untimed warm-up query first.

    Returns a report with error rate (predicted label != true label),
    mean L_checks/R, mean elapsed seconds and early-stop rate per method.
    """
    if not models or not queries:
        raise ValueError("models and queries must be non-empty")
    if index is None:
        index = build_index(models, metric, beta=beta)
    r = index.num_models
    rows = []
    for cfg in configs:
        e_max = min(cfg.e_max if cfg.e_max is not None else r, r)
        search(index, queries[0], cfg, cancellation=cancellation)  # warm-up
        errors = 0
        checks = 0
        early = 0
        elapsed = 0.0
        for query in queries:
            t0 = time.perf_counter()
            res = search(index, query, cfg, cancellation=cancellation)
            elapsed += time.perf_counter() - t0
            errors += int(res.predicted_label != query.label)
            checks += res.l_checks
            early += int(res.terminated_early)
        nq = len(queries)
        rows.append(
            BenchRow(
                method=cfg.method,
                e_max=e_max,
                error_rate=errors / nq,
                mean_l_checks_ratio=checks / (nq * r),
                mean_elapsed=elapsed / nq,
                early_stop_rate=early / nq,
            )
        )
    return BenchReport(
        metric_kind=metric.kind,
        delta=metric.delta,
        num_models=r,
        num_queries=len(queries),
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class SweepPoint:
    fraction: float
    e_max: int
    error_rate: float
    mean_l_checks_ratio: float
    early_stop_rate: float


def sweep_emax(
    models: Sequence[GridDescriptor],
    queries: Sequence[GridDescriptor],
    metric: MetricConfig,
    method: str,
    fractions: Sequence[float],
    beta: float = 0.01,
    base_cfg: Optional[SearchConfig] = None,
    index: Optional[SearchIndex] = None,
) -> list[SweepPoint]:
    """Error rate and mean L_checks/R as the evaluation budget grows.

    For each fraction f the method runs with e_max = ceil(f * R). The same
    index is reused across fractions.
    """
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    if index is None:
        index = build_index(models, metric, beta=beta)
    r = index.num_models
    cfg = base_cfg if base_cfg is not None else SearchConfig(method=method)
    cfg = replace(cfg, method=method)
    points = []
    for f in fractions:
        e_max = max(1, math.ceil(f * r))
        report = run_benchmark(
            models, queries, metric, [replace(cfg, e_max=e_max)], beta=beta, index=index
        )
        row = report.rows[0]
        points.append(
            SweepPoint(
                fraction=f,
                e_max=e_max,
                error_rate=row.error_rate,
                mean_l_checks_ratio=row.mean_l_checks_ratio,
                early_stop_rate=row.early_stop_rate,
            )
        )
    return points


def sweep_to_csv(points: Sequence[SweepPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SWEEP_CSV_COLUMNS)
    for pt in points:
        writer.writerow(
            [
                f"{pt.fraction:.6f}",
                pt.e_max,
                f"{pt.error_rate:.6f}",
                f"{pt.mean_l_checks_ratio:.6f}",
                f"{pt.early_stop_rate:.6f}",
            ]
        )
    return buf.getvalue()


@dataclass(frozen=True)
class AsymptoticsReport:
    """Empirical moments of the scaled same-class distance vs chi-square references.

    The statistic is 2*n*K*rho(query, model) with n the per-block sample
    count; for a query of the model's own class it should concentrate
    around K*p with variance 2*K*p (p = bins - 1). The different-class
    check compares the mean distance to a foreign model against the
    predicted normal mean rho_model + p/(2n).
    """

    trials: int
    samples_per_block: int
    num_blocks: int
    p: int
    same_class_mean: float
    same_class_var: float
    ref_mean: float
    ref_var: float
    mean_ok: bool
    var_ok: bool
    diff_class_offset: float
    ref_offset: float
    offset_ok: bool

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.var_ok and self.offset_ok

    def summary(self) -> str:
        def flag(ok: bool) -> str:
            return "PASS" if ok else "FAIL"

        return "\n".join(
            [
                f"trials={self.trials} n={self.samples_per_block} K={self.num_blocks} p={self.p}",
                f"[{flag(self.mean_ok)}] same-class mean of 2nK*rho: "
                f"{self.same_class_mean:.4f} vs K*p = {self.ref_mean:.1f}",
                f"[{flag(self.var_ok)}] same-class variance: "
                f"{self.same_class_var:.4f} vs 2*K*p = {self.ref_var:.1f}",
                f"[{flag(self.offset_ok)}] different-class mean offset: "
                f"{self.diff_class_offset:.6f} vs p/(2n) = {self.ref_offset:.6f}",
            ]
        )


def validate_asymptotics(
    spec: SynthSpec,
    trials: int = 5000,
    tol_mean: float = 0.15,
    tol_variance: float = 0.30,
    tol_offset: float = 0.30,
) -> AsymptoticsReport:
    """Monte-Carlo check of the distance asymptotics on the generator's model.

    Per trial, fresh per-block base distributions are drawn and a query is
    sampled from them; the reference descriptor holds the exact bases, so
    the scaled same-class distance 2nK*rho is (asymptotically) a central
    chi-square with K*p degrees of freedom. A second, independent base set
    provides the different-class mean check.

    Uses the zero-shift Kullback-Leibler grid distance throughout.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(spec.seed)
    k = spec.num_blocks
    n = spec.samples_per_block
    p = spec.bins - 1
    eps = MetricConfig(kind=KL).epsilon
    alpha = np.full(spec.bins, spec.dirichlet_alpha)

    bases = rng.dirichlet(alpha, size=(trials, k))
    counts = rng.multinomial(n, bases)
    q = counts / n

    rho_same = kl_divergence_blocks(q, bases, eps).mean(axis=1)
    stat = 2.0 * n * k * rho_same
    same_mean = float(stat.mean())
    same_var = float(stat.var(ddof=1))
    ref_mean = float(k * p)
    ref_var = float(2 * k * p)

    other = rng.dirichlet(alpha, size=(trials, k))
    rho_models = kl_divergence_blocks(bases, other, eps).mean(axis=1)
    rho_query_other = kl_divergence_blocks(q, other, eps).mean(axis=1)
    offset = float((rho_query_other - rho_models).mean())
    ref_offset = p / (2.0 * n)

    return AsymptoticsReport(
        trials=trials,
        samples_per_block=n,
        num_blocks=k,
        p=p,
        same_class_mean=same_mean,
        same_class_var=same_var,
        ref_mean=ref_mean,
        ref_var=ref_var,
        mean_ok=abs(same_mean - ref_mean) <= tol_mean * ref_mean,
        var_ok=abs(same_var - ref_var) <= tol_variance * ref_var,
        diff_class_offset=offset,
        ref_offset=ref_offset,
        offset_ok=abs(offset - ref_offset) <= tol_offset * ref_offset,
    )
