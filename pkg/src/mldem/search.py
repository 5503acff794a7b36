"""Model-database indexing and nearest-neighbor search strategies.

An index precomputes the model-to-model distance matrix, the early-
termination threshold rho0 (a beta-quantile of inter-model distances) and
the best first model to probe. Four strategies share that index:

* brute:    exhaustive scan over all models.
* dem:      directed enumeration; candidates minimize the deviation of
            their precomputed distance to the last pulled model from the
            observed query distance.
* mldem:    maximum-likelihood directed enumeration; every unchecked model
            keeps a running penalty sum derived from the asymptotic normal
            distribution of distances, and the next probe is its argmin.
* permsort: permutation-ordering baseline over pivot distances.

Index files are text: a header line `MLDEM1 <R> <beta> <rho0> <r1>
<metric-kind> <delta> <nK>`, R lines of R matrix entries, then the model
descriptors in the descriptor file format.
"""

from __future__ import annotations

import heapq
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.special import log_ndtr, logsumexp

from .descriptor import GridDescriptor, parse_descriptor_block, write_descriptors
from .metrics import KL, GridDistanceEvaluator, MetricConfig

BRUTE = "brute"
DEM = "dem"
MLDEM = "mldem"
PERMSORT = "permsort"
METHODS = (BRUTE, DEM, MLDEM, PERMSORT)

SIMPLIFIED = "simplified"
FULL = "full"

_INDEX_MAGIC = "MLDEM1"


@dataclass(frozen=True)
class SearchConfig:
    """Per-query search parameters.

    Attributes:
        method: one of "brute", "dem", "mldem", "permsort".
        e_max: cap on distance evaluations (per partition when t > 1);
            None means the number of models.
        m: candidate-set size of the dem strategy.
        t: number of parallel partitions.
        phi_variant: "simplified" or "full" likelihood penalty.
        p: parameter dimension of the full penalty; None means bins - 1.
        permsort_pivots: number of pivot models for permsort.
        permsort_fraction: fraction of models whose true distance permsort
            evaluates after ranking.
    """

    method: str = MLDEM
    e_max: Optional[int] = None
    m: int = 64
    t: int = 1
    phi_variant: str = SIMPLIFIED
    p: Optional[int] = None
    permsort_pivots: int = 16
    permsort_fraction: float = 1.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.e_max is not None and self.e_max < 1:
            raise ValueError("e_max must be positive")
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.t < 1:
            raise ValueError("t must be positive")
        if self.phi_variant not in (SIMPLIFIED, FULL):
            raise ValueError(f"unknown phi variant {self.phi_variant!r}")
        if self.p is not None and self.p < 1:
            raise ValueError("p must be positive")
        if self.permsort_pivots < 1:
            raise ValueError("permsort_pivots must be positive")
        if not 0.0 < self.permsort_fraction <= 1.0:
            raise ValueError("permsort_fraction must be in (0, 1]")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one query.

    `evaluated` lists the model indices in evaluation order (concatenated
    per partition when t > 1). `degenerate_phi` counts zero model-to-model
    distances that required the regularized penalty denominator.
    """

    predicted_label: int
    model_index: int
    distance: float
    l_checks: int
    elapsed: float
    terminated_early: bool
    evaluated: tuple[int, ...] = ()
    degenerate_phi: int = 0


@dataclass(frozen=True, eq=False)
class PermSortTable:
    """Pivot table for the permsort baseline: pivot ids and per-model ranks."""

    pivot_indices: np.ndarray  # (P,)
    ranks: np.ndarray  # (R, P): rank of each pivot in the model's ordering
    seed: int


@dataclass(frozen=True, eq=False)
class SearchIndex:
    """Immutable search index over a fixed model set.

    Attributes:
        models: the model descriptors.
        matrix: (R, R) model-to-model distances, row index in the query
            role; the diagonal is zero and the matrix may be asymmetric.
        rho0: early-termination threshold (beta-quantile of off-diagonal
            entries; 0 for a single-model index).
        beta: false-accept rate used for rho0.
        r1: precomputed first model to probe.
        metric: distance configuration shared with queries.
        nk: product of the per-block sample count and the block count
            (the mean total_count over models), used by the likelihood
            scaling.
    """

    models: tuple[GridDescriptor, ...]
    matrix: np.ndarray
    rho0: float
    beta: float
    r1: int
    metric: MetricConfig
    nk: float
    permsort_aux: Optional[PermSortTable] = None
    _cache_lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False
    )
    _evaluator: Optional[GridDistanceEvaluator] = field(default=None, init=False, repr=False)
    _partitions: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise ValueError("index requires at least one model")
        mat = np.array(self.matrix, dtype=np.float64)
        r = len(models)
        if mat.shape != (r, r):
            raise ValueError(f"matrix must be ({r}, {r}), got {mat.shape}")
        if np.any(mat < 0):
            raise ValueError("distance matrix entries must be non-negative")
        if np.any(np.diagonal(mat) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if not 0 <= self.r1 < r:
            raise ValueError(f"r1 must be in [0, {r})")
        if self.rho0 < 0:
            raise ValueError("rho0 must be non-negative")
        if self.nk <= 0:
            raise ValueError("nk must be positive")
        mat.setflags(write=False)
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "matrix", mat)

    @property
    def num_models(self) -> int:
        return len(self.models)

    def evaluator(self) -> GridDistanceEvaluator:
        with self._cache_lock:
            if self._evaluator is None:
                object.__setattr__(
                    self, "_evaluator", GridDistanceEvaluator(self.models, self.metric)
                )
            return self._evaluator

    def partitions(self, t: int) -> list["Partition"]:
        with self._cache_lock:
            if t not in self._partitions:
                self._partitions[t] = make_partitions(self, t)
            return self._partitions[t]


@dataclass(frozen=True, eq=False)
class Partition:
    """One of the t disjoint parts of a parallel search."""

    members: np.ndarray  # global model indices
    index: SearchIndex


def build_distance_matrix(models: Sequence[GridDescriptor], metric: MetricConfig) -> np.ndarray:
    """All-pairs model distances; entry [i, j] has model i in the query role."""
    evaluator = GridDistanceEvaluator(models, metric)
    r = len(models)
    out = np.zeros((r, r), dtype=np.float64)
    for i, m in enumerate(models):
        qd = evaluator.bind(m)
        for j in range(r):
            if j != i:
                out[i, j] = qd.to_model(j)
    return out


def compute_threshold(matrix: np.ndarray, beta: float) -> float:
    """beta-quantile of the off-diagonal entries of a distance matrix.

    The R*(R-1) off-diagonal entries are sorted ascending and the entry at
    1-based rank max(1, ceil(beta * R * (R-1))) is returned.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    r = matrix.shape[0]
    if r < 2:
        raise ValueError("threshold undefined for fewer than two models")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    off = matrix[~np.eye(r, dtype=bool)]
    order = np.sort(off)
    rank = max(1, math.ceil(beta * off.size))
    return float(order[rank - 1])


def normal_cdf(x: float) -> float:
    """Standard normal cumulative distribution function."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def select_first_model(matrix: np.ndarray, nk: float) -> int:
    """Choose the model whose probe is most likely to settle the search.

    Maximizes, over candidate mu, the sum over v of the product over r of
    the standard normal CDF of (sqrt(nk)/2) * |sqrt(rho[r, mu]) -
    sqrt(rho[v, mu])|. Computed in the log domain for stability; ties are
    broken by the lowest index.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    r = matrix.shape[0]
    if r == 1:
        return 0
    if nk <= 0:
        raise ValueError("nk must be positive")
    a = 0.5 * math.sqrt(nk)
    sq = np.sqrt(matrix)
    scores = np.empty(r)
    for mu in range(r):
        c = sq[:, mu]
        log_factors = log_ndtr(a * np.abs(c[:, None] - c[None, :]))
        scores[mu] = logsumexp(log_factors.sum(axis=0))
    return int(np.argmax(scores))


def _phi_array(
    rho_query: float,
    rho_models: np.ndarray,
    variant: str,
    p: Optional[int],
    n: float,
    k: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized likelihood penalty; returns (values, degenerate mask)."""
    rho_models = np.asarray(rho_models, dtype=np.float64)
    if variant == SIMPLIFIED:
        degenerate = rho_models == 0.0
        den = 4.0 * rho_models
        if degenerate.any():
            if p is None:
                raise ValueError("p is required to regularize a zero model distance")
            den = np.where(degenerate, p / n, den)
        return (rho_query - rho_models) ** 2 / den, degenerate
    if p is None:
        raise ValueError("p is required for the full phi variant")
    reg = 4.0 * rho_models + p / n
    vals = (rho_query - rho_models - p / (2.0 * n)) ** 2 / reg + np.log(reg) / (4.0 * n * k)
    return vals, np.zeros(rho_models.shape, dtype=bool)


def phi(rho_query: float, rho_model: float, cfg: SearchConfig, n: float, k: int) -> float:
    """Likelihood penalty of one checked model for one candidate class.

    In the simplified variant this is (rho_query - rho_model)^2 /
    (4 rho_model); the full variant adds the sample-size offset p/(2n),
    the regularizer p/n and a log-variance term. A zero rho_model in
    simplified mode falls back to the full form's regularized denominator.
    """
    p = cfg.p
    vals, _ = _phi_array(rho_query, np.array([rho_model]), cfg.phi_variant, p, n, k)
    return float(vals[0])


def build_index(
    models: Sequence[GridDescriptor],
    metric: MetricConfig,
    beta: float = 0.01,
    nk: Optional[float] = None,
) -> SearchIndex:
    """Precompute the distance matrix, threshold and first probe for a model set.

    nk defaults to the mean total sample count over the models; rho0 is 0
    (never reached) when only one model is given.
    """
    models = tuple(models)
    matrix = build_distance_matrix(models, metric)
    if nk is None:
        mean_total = float(np.mean([m.total_count for m in models]))
        nk = mean_total if mean_total > 0 else 1.0
    rho0 = compute_threshold(matrix, beta) if len(models) >= 2 else 0.0
    r1 = select_first_model(matrix, nk)
    return SearchIndex(
        models=models,
        matrix=matrix,
        rho0=rho0,
        beta=beta,
        r1=r1,
        metric=metric,
        nk=float(nk),
    )


class _Tracker:
    """Bookkeeping shared by the enumeration strategies."""

    __slots__ = ("qd", "rho0", "checked", "order", "best_d", "best_r", "early")

    def __init__(self, qd, rho0: float, r: int):
        self.qd = qd
        self.rho0 = rho0
        self.checked = np.zeros(r, dtype=bool)
        self.order: list[int] = []
        self.best_d = math.inf
        self.best_r = -1
        self.early = False

    def evaluate(self, r: int) -> float:
        d = self.qd.to_model(r)
        self.checked[r] = True
        self.order.append(r)
        if d < self.best_d:
            self.best_d, self.best_r = d, r
        if d < self.rho0:
            self.early = True
        return d

    @property
    def l_checks(self) -> int:
        return len(self.order)


def _result(index: SearchIndex, tr: _Tracker, elapsed: float, degenerate: int = 0) -> SearchResult:
    return SearchResult(
        predicted_label=index.models[tr.best_r].label,
        model_index=tr.best_r,
        distance=tr.best_d,
        l_checks=tr.l_checks,
        elapsed=elapsed,
        terminated_early=tr.early,
        evaluated=tuple(tr.order),
        degenerate_phi=degenerate,
    )


def brute_force_search(
    index: SearchIndex, query: GridDescriptor, evaluator=None
) -> SearchResult:
    """Evaluate every model and return the argmin (lowest index on ties)."""
    start = time.perf_counter()
    qd = (evaluator or index.evaluator()).bind(query)
    tr = _Tracker(qd, -math.inf, index.num_models)  # brute force never stops early
    for r in range(index.num_models):
        tr.evaluate(r)
    tr.early = False
    return _result(index, tr, time.perf_counter() - start)


def dem_search(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    evaluator=None,
    cancel: Optional[threading.Event] = None,
) -> SearchResult:
    """Directed enumeration steered by deviations from the distance matrix.

    Starting from the precomputed first model, the closest checked model i
    is pulled from a priority queue and the m unchecked models j with the
    smallest |matrix[i, j] - rho(query, model_i)| are evaluated next. The
    search stops as soon as a distance falls below rho0 or after e_max
    evaluations; the best checked model is returned either way.
    """
    start = time.perf_counter()
    r_total = index.num_models
    e_max = min(cfg.e_max if cfg.e_max is not None else r_total, r_total)
    qd = (evaluator or index.evaluator()).bind(query)
    tr = _Tracker(qd, index.rho0, r_total)

    d1 = tr.evaluate(index.r1)
    heap: list[tuple[float, int]] = [(d1, index.r1)]
    while not tr.early and tr.l_checks < e_max and tr.l_checks < r_total:
        if cancel is not None and cancel.is_set():
            break
        if heap:
            d_i, i = heapq.heappop(heap)
            deviation = np.abs(index.matrix[i] - d_i)
            deviation = np.where(tr.checked, np.inf, deviation)
            candidates = np.argsort(deviation, kind="stable")[: cfg.m]
        else:
            # all expanded but budget remains: restart from the lowest unchecked
            candidates = np.flatnonzero(~tr.checked)[:1]
            deviation = np.zeros(r_total)
        for j in candidates:
            j = int(j)
            if tr.checked[j] or not np.isfinite(deviation[j]):
                continue
            d_j = tr.evaluate(j)
            heapq.heappush(heap, (d_j, j))
            if tr.early or tr.l_checks >= e_max:
                break
            if cancel is not None and cancel.is_set():
                break
    if tr.early and cancel is not None:
        cancel.set()
    return _result(index, tr, time.perf_counter() - start)


def mldem_search(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    evaluator=None,
    cancel: Optional[threading.Event] = None,
) -> SearchResult:
    """Maximum-likelihood directed enumeration.

    After each evaluation of model r_i at distance d_i, every unchecked
    candidate mu accumulates phi(d_i, matrix[mu, r_i]); the next model to
    evaluate is the argmin of the accumulated penalties (lowest index on
    ties). Terminates below rho0 or at e_max evaluations.
    """
    start = time.perf_counter()
    r_total = index.num_models
    e_max = min(cfg.e_max if cfg.e_max is not None else r_total, r_total)
    p = cfg.p if cfg.p is not None else max(index.models[0].bins - 1, 1)
    k = index.models[0].num_blocks
    n = index.nk / k
    qd = (evaluator or index.evaluator()).bind(query)
    tr = _Tracker(qd, index.rho0, r_total)

    scores = np.zeros(r_total)
    degenerate = 0
    last = index.r1
    last_d = tr.evaluate(last)
    while not tr.early and tr.l_checks < e_max and tr.l_checks < r_total:
        if cancel is not None and cancel.is_set():
            break
        contrib, degraded = _phi_array(
            last_d, index.matrix[:, last], cfg.phi_variant, p, n, k
        )
        degenerate += int(np.count_nonzero(degraded & ~tr.checked))
        scores += contrib
        masked = np.where(tr.checked, np.inf, scores)
        last = int(np.argmin(masked))
        last_d = tr.evaluate(last)
    if tr.early and cancel is not None:
        cancel.set()
    return _result(index, tr, time.perf_counter() - start, degenerate)


def permsort_build(index: SearchIndex, pivots: int, seed: int = 0) -> PermSortTable:
    """Sample pivot models and store each model's pivot-distance ordering.

    The table is attached to the index (permsort_aux) and returned. Pivot
    choice is a seeded uniform sample without replacement.
    """
    r = index.num_models
    if pivots < 1:
        raise ValueError("pivots must be positive")
    if pivots > r:
        raise ValueError(f"pivots ({pivots}) cannot exceed the number of models ({r})")
    rng = np.random.default_rng(seed)
    pivot_indices = np.sort(rng.choice(r, size=pivots, replace=False)).astype(np.int64)
    dists = index.matrix[:, pivot_indices]  # model in the query role
    order = np.argsort(dists, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(r)[:, None]
    ranks[rows, order] = np.arange(pivots)[None, :]
    table = PermSortTable(pivot_indices=pivot_indices, ranks=ranks, seed=seed)
    object.__setattr__(index, "permsort_aux", table)
    return table


def permsort_search(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    evaluator=None,
    cancel: Optional[threading.Event] = None,
) -> SearchResult:
    """Permutation-ordering baseline.

    The query's pivot-distance permutation is compared with every model's
    by the Spearman footrule; the top fraction of models is evaluated and
    the best evaluated model returned. l_checks counts pivot evaluations
    plus candidate evaluations (cached pivots are not recounted).
    """
    start = time.perf_counter()
    r_total = index.num_models
    table = index.permsort_aux
    if table is None:
        table = permsort_build(index, min(cfg.permsort_pivots, r_total), seed=0)
    qd = (evaluator or index.evaluator()).bind(query)
    tr = _Tracker(qd, -math.inf, r_total)  # threshold not used by this baseline

    qdist = np.array([tr.evaluate(int(pv)) for pv in table.pivot_indices])
    qorder = np.argsort(qdist, kind="stable")
    qranks = np.empty_like(qorder)
    qranks[qorder] = np.arange(qorder.size)
    footrule = np.abs(table.ranks - qranks[None, :]).sum(axis=1)
    n_cand = math.ceil(cfg.permsort_fraction * r_total)
    candidates = np.argsort(footrule, kind="stable")[:n_cand]
    for j in candidates:
        j = int(j)
        if not tr.checked[j]:
            tr.evaluate(j)
        if cancel is not None and cancel.is_set():
            break
    tr.early = False
    return _result(index, tr, time.perf_counter() - start)


def make_partitions(index: SearchIndex, t: int) -> list[Partition]:
    """Split the index round-robin into t disjoint sub-indexes.

    Each part gets its own sub-matrix, its own threshold (recomputed on
    the sub-matrix at the same beta) and its own first probe.
    """
    r = index.num_models
    if not 1 <= t <= r:
        raise ValueError(f"t must be in [1, {r}], got {t}")
    parts = []
    for offset in range(t):
        members = np.arange(offset, r, t)
        sub_models = tuple(index.models[int(i)] for i in members)
        sub_matrix = index.matrix[np.ix_(members, members)]
        rho0 = compute_threshold(sub_matrix, index.beta) if members.size >= 2 else 0.0
        r1 = select_first_model(sub_matrix, index.nk)
        sub_index = SearchIndex(
            models=sub_models,
            matrix=sub_matrix,
            rho0=rho0,
            beta=index.beta,
            r1=r1,
            metric=index.metric,
            nk=index.nk,
        )
        sub_index.evaluator()  # materialize before sharing across threads
        parts.append(Partition(members=members, index=sub_index))
    return parts


_SEQUENTIAL = {
    BRUTE: brute_force_search,
    DEM: dem_search,
    MLDEM: mldem_search,
    PERMSORT: permsort_search,
}


def _run_single(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    cancel: Optional[threading.Event] = None,
) -> SearchResult:
    if cfg.method == BRUTE:
        return brute_force_search(index, query)
    return _SEQUENTIAL[cfg.method](index, query, cfg, cancel=cancel)


def parallel_search(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    cancellation: bool = True,
) -> SearchResult:
    """Run the configured method over t disjoint partitions concurrently.

    The first part to hit its threshold signals the others to stop early
    (unless `cancellation` is False, the deterministic test mode). The
    result is the minimum-distance model over all parts' best candidates;
    l_checks is the total across parts. e_max applies per part, capped at
    ceil(R / t) to match a per-task budget.

    Brute-force parts always scan their whole partition, so the merged
    result is independent of t.
    """
    start = time.perf_counter()
    r = index.num_models
    t = cfg.t
    if t > r:
        raise ValueError(f"t ({t}) cannot exceed the number of models ({r})")
    if t == 1:
        return _run_single(index, query, cfg)
    parts = index.partitions(t)
    base_e_max = cfg.e_max if cfg.e_max is not None else r
    part_e_max = min(base_e_max, math.ceil(r / t))
    sub_cfg = replace(cfg, t=1, e_max=part_e_max)
    event = threading.Event() if (cancellation and cfg.method != BRUTE) else None

    def run_part(part: Partition) -> SearchResult:
        return _run_single(part.index, query, sub_cfg, cancel=event)

    with ThreadPoolExecutor(max_workers=t) as pool:
        results = list(pool.map(run_part, parts))

    best_d, best_global, best_label = math.inf, -1, 0
    l_checks = 0
    early = False
    degenerate = 0
    evaluated: list[int] = []
    for part, res in zip(parts, results):
        global_idx = int(part.members[res.model_index])
        if res.distance < best_d or (res.distance == best_d and global_idx < best_global):
            best_d, best_global, best_label = res.distance, global_idx, res.predicted_label
        l_checks += res.l_checks
        early = early or res.terminated_early
        degenerate += res.degenerate_phi
        evaluated.extend(int(part.members[i]) for i in res.evaluated)
    return SearchResult(
        predicted_label=best_label,
        model_index=best_global,
        distance=best_d,
        l_checks=l_checks,
        elapsed=time.perf_counter() - start,
        terminated_early=early,
        evaluated=tuple(evaluated),
        degenerate_phi=degenerate,
    )


def search(
    index: SearchIndex,
    query: GridDescriptor,
    cfg: SearchConfig,
    cancellation: bool = True,
) -> SearchResult:
    """Dispatch a query to the configured method, parallel when t > 1."""
    if cfg.t > 1:
        return parallel_search(index, query, cfg, cancellation=cancellation)
    return _run_single(index, query, cfg)


def save_index(path, index: SearchIndex) -> None:
    """Write an index (header, matrix, embedded descriptors) to a text file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"{_INDEX_MAGIC} {index.num_models} {index.beta!r} {index.rho0!r} "
            f"{index.r1} {index.metric.kind} {index.metric.delta} {index.nk!r}\n"
        )
        for row in index.matrix:
            fh.write(" ".join(repr(v) for v in row) + "\n")
        write_descriptors(fh, index.models)


def load_index(path) -> SearchIndex:
    """Load an index written by `save_index`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty index file")
    header = lines[0].split()
    if len(header) != 8 or header[0] != _INDEX_MAGIC:
        raise ValueError(f"{path}: malformed index header")
    try:
        r = int(header[1])
        beta = float(header[2])
        rho0 = float(header[3])
        r1 = int(header[4])
        kind = header[5]
        delta = int(header[6])
        nk = float(header[7])
    except ValueError:
        raise ValueError(f"{path}: malformed index header field") from None
    if len(lines) < 1 + r:
        raise ValueError(f"{path}: truncated distance matrix")
    matrix = np.empty((r, r), dtype=np.float64)
    for i in range(r):
        fields = lines[1 + i].split()
        if len(fields) != r:
            raise ValueError(f"{path}: matrix row {i} has {len(fields)} entries, expected {r}")
        matrix[i] = [float(v) for v in fields]
    models, _ = parse_descriptor_block(lines, 1 + r)
    if len(models) != r:
        raise ValueError(f"{path}: index holds {r} models but file has {len(models)} descriptors")
    return SearchIndex(
        models=tuple(models),
        matrix=matrix,
        rho0=rho0,
        beta=beta,
        r1=r1,
        metric=MetricConfig(kind=kind, delta=delta),
        nk=nk,
    )
