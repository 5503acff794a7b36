"""Scikit-learn compatible wrappers around the descriptor and search cores.

`GridHistogramExtractor` turns grayscale images into grid descriptors and
`DirectedEnumerationClassifier` performs nearest-model classification over
them, so both compose with sklearn pipelines, `get_params`/`set_params`
and model selection utilities.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .descriptor import GridDescriptor, build_smoothing_kernel, extract_descriptor
from .image import GrayImage
from .metrics import MetricConfig
from .search import SearchConfig, build_index, search


class GridHistogramExtractor(TransformerMixin, BaseEstimator):
    """Transform grayscale images into grid-of-histogram descriptors.

    Parameters
    ----------
    rows, cols : int, default 10
        Grid dimensions.
    bins : int, default 8
        Orientation bins per block.
    sigma : float, default 1.0
        Bandwidth of the circular Gaussian smoothing kernel mixed into
        every block histogram; 0 disables smoothing.
    magnitude_weighted : bool, default True
        Weight orientation votes by gradient magnitude.
    median : bool, default False
        Apply a 3x3 median filter before gradient extraction.
    """

    def __init__(
        self,
        rows: int = 10,
        cols: int = 10,
        bins: int = 8,
        sigma: float = 1.0,
        magnitude_weighted: bool = True,
        median: bool = False,
    ):
        self.rows = rows
        self.cols = cols
        self.bins = bins
        self.sigma = sigma
        self.magnitude_weighted = magnitude_weighted
        self.median = median

    def fit(self, X, y=None):
        """Stateless apart from the kernel; validates parameters."""
        self.kernel_ = build_smoothing_kernel(self.bins, self.sigma)
        return self

    def transform(self, X) -> list[GridDescriptor]:
        """Extract one descriptor per image.

        X is an iterable of 2-D uint8/float arrays or GrayImage objects;
        descriptors are labeled by position (a downstream classifier's `y`
        takes precedence).
        """
        from .image import median_filter

        if not hasattr(self, "kernel_"):
            self.fit(X)
        out = []
        for i, item in enumerate(X):
            img = item if isinstance(item, GrayImage) else GrayImage(np.asarray(item))
            if self.median:
                img = median_filter(img)
            out.append(
                extract_descriptor(
                    img,
                    rows=self.rows,
                    cols=self.cols,
                    bins=self.bins,
                    weighted=self.magnitude_weighted,
                    kernel=self.kernel_,
                    label=i,
                )
            )
        return out


def _as_descriptors(
    X, y=None, rows: int = 10, cols: int = 10, bins: int = 8, samples_per_block: int = 200
) -> list[GridDescriptor]:
    """Coerce descriptor sequences or flat (n, rows*cols*bins) arrays."""
    if len(X) > 0 and isinstance(X[0], GridDescriptor):
        descs = list(X)
        if y is not None:
            descs = [
                GridDescriptor(
                    label=int(label),
                    rows=d.rows,
                    cols=d.cols,
                    bins=d.bins,
                    histograms=d.histograms,
                    block_counts=d.block_counts,
                    total_count=d.total_count,
                )
                for d, label in zip(descs, y)
            ]
        return descs
    arr = np.asarray(X, dtype=np.float64)
    k = rows * cols
    if arr.ndim != 2 or arr.shape[1] != k * bins:
        raise ValueError(
            f"expected descriptors or a (n, {k * bins}) array of concatenated "
            f"block histograms, got shape {arr.shape}"
        )
    labels = y if y is not None else range(arr.shape[0])
    out = []
    counts = np.full(k, samples_per_block, dtype=np.int64)
    for row, label in zip(arr, labels):
        hists = row.reshape(k, bins)
        sums = hists.sum(axis=1, keepdims=True)
        uniform = np.full(bins, 1.0 / bins)
        hists = np.where(sums > 0, hists / np.where(sums > 0, sums, 1.0), uniform)
        out.append(
            GridDescriptor(
                label=int(label),
                rows=rows,
                cols=cols,
                bins=bins,
                histograms=hists,
                block_counts=counts,
                total_count=int(counts.sum()),
            )
        )
    return out


class DirectedEnumerationClassifier(ClassifierMixin, BaseEstimator):
    """Nearest-model classifier with likelihood-directed approximate search.

    `fit` builds the model-distance index (the expensive, one-off part);
    `predict` classifies queries with the configured strategy.

    Parameters
    ----------
    method : {"brute", "dem", "mldem", "permsort"}, default "mldem"
    metric : {"kl", "htpnn"}, default "kl"
        Per-block histogram distance.
    delta : int, default 0
        Block-alignment radius of the grid distance.
    beta : float, default 0.01
        False-accept rate defining the early-termination threshold.
    e_max : int or None, default None
        Cap on distance evaluations per query (None: number of models).
    m : int, default 64
        Candidate-set size of the dem strategy.
    t : int, default 1
        Parallel partitions per query.
    phi_variant : {"simplified", "full"}, default "simplified"
    permsort_pivots : int, default 16
    permsort_fraction : float, default 1.0
    rows, cols, bins : int
        Grid layout, used only when X is a flat array instead of
        descriptors.
    samples_per_block : int, default 200
        Assumed per-block sample count when X is a flat array.
    """

    def __init__(
        self,
        method: str = "mldem",
        metric: str = "kl",
        delta: int = 0,
        beta: float = 0.01,
        e_max: Optional[int] = None,
        m: int = 64,
        t: int = 1,
        phi_variant: str = "simplified",
        permsort_pivots: int = 16,
        permsort_fraction: float = 1.0,
        rows: int = 10,
        cols: int = 10,
        bins: int = 8,
        samples_per_block: int = 200,
    ):
        self.method = method
        self.metric = metric
        self.delta = delta
        self.beta = beta
        self.e_max = e_max
        self.m = m
        self.t = t
        self.phi_variant = phi_variant
        self.permsort_pivots = permsort_pivots
        self.permsort_fraction = permsort_fraction
        self.rows = rows
        self.cols = cols
        self.bins = bins
        self.samples_per_block = samples_per_block

    def _search_config(self) -> SearchConfig:
        return SearchConfig(
            method=self.method,
            e_max=self.e_max,
            m=self.m,
            t=self.t,
            phi_variant=self.phi_variant,
            permsort_pivots=self.permsort_pivots,
            permsort_fraction=self.permsort_fraction,
        )

    def fit(self, X, y=None):
        """Build the search index from model descriptors (or a flat array)."""
        models = _as_descriptors(
            X, y, rows=self.rows, cols=self.cols, bins=self.bins,
            samples_per_block=self.samples_per_block,
        )
        self._search_config()  # validate search parameters early
        metric = MetricConfig(kind=self.metric, delta=self.delta)
        self.index_ = build_index(models, metric, beta=self.beta)
        self.classes_ = np.unique([m.label for m in models])
        return self

    def _queries(self, X) -> list[GridDescriptor]:
        return _as_descriptors(
            X, None, rows=self.rows, cols=self.cols, bins=self.bins,
            samples_per_block=self.samples_per_block,
        )

    def search(self, X):
        """Full per-query search results (distance, checks, timing)."""
        if not hasattr(self, "index_"):
            raise RuntimeError("classifier is not fitted; call fit first")
        cfg = self._search_config()
        return [search(self.index_, q, cfg) for q in self._queries(X)]

    def predict(self, X) -> np.ndarray:
        """Predicted class label per query."""
        return np.array([res.predicted_label for res in self.search(X)])
