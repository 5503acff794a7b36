"""Distances between histograms and grid descriptors.

Two per-block distances are provided: the (asymmetric) Kullback-Leibler
discrimination and the symmetric homogeneity-testing divergence against the
mixture (h+g)/2 (HT-PNN). The grid distance averages per-block distances
over the grid, optionally minimizing each block over shifted neighbor
blocks within an alignment radius delta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from .descriptor import GridDescriptor

KL = "kl"
HTPNN = "htpnn"
_KINDS = (KL, HTPNN)


@dataclass(frozen=True)
class MetricConfig:
    """Distance configuration shared by an index and its queries.

    Attributes:
        kind: per-block distance, "kl" or "htpnn".
        delta: block-alignment radius; each query block is matched against
            model blocks shifted by at most delta rows/columns (clipped at
            the grid border). 0 and 1 are the supported settings.
        epsilon: floor applied to log arguments as a guard for histograms
            that were not kernel-smoothed.
    """

    kind: str = KL
    delta: int = 0
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}, expected one of {_KINDS}")
        if self.delta < 0 or int(self.delta) != self.delta:
            raise ValueError("delta must be a non-negative integer")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta > 1:
            warnings.warn(
                f"alignment radius delta={self.delta} is outside the supported "
                "range {0, 1}; results will be flagged in reports",
                stacklevel=2,
            )


def kl_divergence_blocks(h: np.ndarray, g: np.ndarray, epsilon: float = 1e-12) -> np.ndarray:
    """Kullback-Leibler discrimination over the last axis, with 0*ln 0 := 0.

    `h` and `g` broadcast against each other; `g` is floored at `epsilon`
    inside the logarithm. Results are clamped at 0 to absorb rounding.
    """
    d = np.sum(xlogy(h, h), axis=-1) - np.sum(h * np.log(np.maximum(g, epsilon)), axis=-1)
    return np.maximum(d, 0.0)


def htpnn_blocks(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Homogeneity-testing divergence over the last axis, with 0*ln 0 := 0.

    Computed as sum of h ln h + g ln g - (h+g) ln((h+g)/2), which equals the
    sum of h ln(2h/(h+g)) + g ln(2g/(h+g)) and is exactly symmetric in
    (h, g) as evaluated.
    """
    s = h + g
    d = np.sum(xlogy(h, h) + xlogy(g, g) - xlogy(s, 0.5 * s), axis=-1)
    return np.maximum(d, 0.0)


def kl_divergence(h, g, epsilon: float = 1e-12) -> float:
    """KL discrimination sum_i h[i] ln(h[i]/g[i]) between two histograms.

    Non-negative, zero iff h equals g; asymmetric in its arguments. The
    second argument is floored at `epsilon` inside the logarithm.
    """
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if h.shape != g.shape or h.ndim != 1:
        raise ValueError(f"histogram shape mismatch: {h.shape} vs {g.shape}")
    return float(kl_divergence_blocks(h, g, epsilon))


def htpnn_distance(h, g) -> float:
    """Symmetric homogeneity-testing distance between two histograms."""
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if h.shape != g.shape or h.ndim != 1:
        raise ValueError(f"histogram shape mismatch: {h.shape} vs {g.shape}")
    return float(htpnn_blocks(h, g))


class _QueryState:
    """Per-query precomputation shared across block-distance evaluations."""

    __slots__ = ("hists", "aux")

    def __init__(self, hists: np.ndarray, kind: str):
        self.hists = hists  # (K, N)
        # KL: sum_n h ln h per block; HT-PNN: elementwise h ln h
        if kind == KL:
            self.aux = np.sum(xlogy(hists, hists), axis=-1)
        else:
            self.aux = xlogy(hists, hists)


def _blocks_kl(q: _QueryState, model_logs: np.ndarray) -> np.ndarray:
    # q.aux holds sum_n h ln h; model_logs holds ln(max(g, eps))
    return np.maximum(q.aux - np.sum(q.hists * model_logs, axis=-1), 0.0)


def _blocks_htpnn(q: _QueryState, model_hists: np.ndarray, model_xlx: np.ndarray) -> np.ndarray:
    s = q.hists + model_hists
    d = np.sum(q.aux + model_xlx - xlogy(s, 0.5 * s), axis=-1)
    return np.maximum(d, 0.0)


class QueryDistances:
    """Distances from one bound query to every model of an evaluator.

    `to_model` is the single evaluation primitive used by every search
    strategy, so distances are bit-identical across strategies.
    """

    def __init__(self, evaluator: "GridDistanceEvaluator", query: GridDescriptor):
        ev = evaluator
        if (query.rows, query.cols, query.bins) != (ev.rows, ev.cols, ev.bins):
            raise ValueError(
                f"query grid {query.rows}x{query.cols}x{query.bins} does not match "
                f"models {ev.rows}x{ev.cols}x{ev.bins}"
            )
        self._ev = ev
        self._state = _QueryState(query.histograms, ev.cfg.kind)

    def to_model(self, r: int) -> float:
        ev = self._ev
        q = self._state
        if ev.cfg.delta == 0:
            if ev.cfg.kind == KL:
                blocks = _blocks_kl(q, ev.model_logs[r])
            else:
                blocks = _blocks_htpnn(q, ev.model_hists[r], ev.model_xlx[r])
            return float(blocks.mean())
        return self._aligned_distance(r)

    def to_all(self) -> np.ndarray:
        return np.array([self.to_model(r) for r in range(self._ev.num_models)])

    def _aligned_distance(self, r: int) -> float:
        ev = self._ev
        q = self._state
        s1, s2, n = ev.rows, ev.cols, ev.bins
        delta = ev.cfg.delta
        qh = q.hists.reshape(s1, s2, n)
        if ev.cfg.kind == KL:
            qaux = q.aux.reshape(s1, s2)
            glog = ev.model_logs[r].reshape(s1, s2, n)
        else:
            qaux = q.aux.reshape(s1, s2, n)
            gh = ev.model_hists[r].reshape(s1, s2, n)
            gxlx = ev.model_xlx[r].reshape(s1, s2, n)
        acc = np.full((s1, s2), np.inf)
        for d1 in range(-delta, delta + 1):
            a0, a1 = max(0, -d1), min(s1, s1 - d1)
            if a0 >= a1:
                continue
            for d2 in range(-delta, delta + 1):
                b0, b1 = max(0, -d2), min(s2, s2 - d2)
                if b0 >= b1:
                    continue
                qs = qh[a0:a1, b0:b1]
                if ev.cfg.kind == KL:
                    blocks = np.maximum(
                        qaux[a0:a1, b0:b1]
                        - np.sum(qs * glog[a0 + d1 : a1 + d1, b0 + d2 : b1 + d2], axis=-1),
                        0.0,
                    )
                else:
                    gs = gh[a0 + d1 : a1 + d1, b0 + d2 : b1 + d2]
                    ssum = qs + gs
                    blocks = np.maximum(
                        np.sum(
                            qaux[a0:a1, b0:b1]
                            + gxlx[a0 + d1 : a1 + d1, b0 + d2 : b1 + d2]
                            - xlogy(ssum, 0.5 * ssum),
                            axis=-1,
                        ),
                        0.0,
                    )
                region = acc[a0:a1, b0:b1]
                np.minimum(region, blocks, out=region)
        return float(acc.mean())


class GridDistanceEvaluator:
    """Precomputed model-side arrays for repeated distance evaluation.

    Building one evaluator per model set amortizes the logarithms of the
    model histograms across every query and every search strategy. The
    evaluator is immutable after construction and safe to share across
    threads.
    """

    def __init__(self, models: Sequence[GridDescriptor], cfg: MetricConfig):
        if not models:
            raise ValueError("at least one model is required")
        first = models[0]
        self.rows, self.cols, self.bins = first.rows, first.cols, first.bins
        for i, m in enumerate(models):
            if (m.rows, m.cols, m.bins) != (self.rows, self.cols, self.bins):
                raise ValueError(
                    f"model {i} grid {m.rows}x{m.cols}x{m.bins} does not match "
                    f"model 0 {self.rows}x{self.cols}x{self.bins}"
                )
        self.cfg = cfg
        self.num_models = len(models)
        self.model_hists = np.stack([m.histograms for m in models])  # (R, K, N)
        if cfg.kind == KL:
            self.model_logs = np.log(np.maximum(self.model_hists, cfg.epsilon))
            self.model_xlx = None
        else:
            self.model_logs = None
            self.model_xlx = xlogy(self.model_hists, self.model_hists)

    def bind(self, query: GridDescriptor) -> QueryDistances:
        return QueryDistances(self, query)


def grid_distance(x: GridDescriptor, m: GridDescriptor, cfg: MetricConfig) -> float:
    """Average per-block distance between two descriptors with alignment.

    Each block of `x` is matched against the same block of `m` and, when
    cfg.delta > 0, against model blocks shifted by up to delta rows and
    columns (shifts leaving the grid are excluded); the block contributes
    the minimum over those candidates. The result is the mean over all
    rows*cols blocks.
    """
    return GridDistanceEvaluator([m], cfg).bind(x).to_model(0)
