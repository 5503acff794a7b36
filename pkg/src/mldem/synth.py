"""Seeded Dirichlet-multinomial generator of synthetic descriptor datasets.

Each class gets one base distribution per block, drawn from a symmetric
Dirichlet. The class model is the normalized count vector of
samples_per_block multinomial draws from each base; queries are
independent multinomial samples from the same bases. Everything is fully
determined by the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptor import GridDescriptor


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic dataset."""

    classes: int
    rows: int = 10
    cols: int = 10
    bins: int = 8
    samples_per_block: int = 200
    queries_per_class: int = 2
    dirichlet_alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("classes", "rows", "cols", "bins", "samples_per_block", "queries_per_class"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.dirichlet_alpha <= 0:
            raise ValueError("dirichlet_alpha must be positive")

    @property
    def num_blocks(self) -> int:
        return self.rows * self.cols


def _descriptors_from_counts(counts: np.ndarray, labels, spec: SynthSpec) -> list[GridDescriptor]:
    n_b = spec.samples_per_block
    k = spec.num_blocks
    block_counts = np.full(k, n_b, dtype=np.int64)
    out = []
    for i, label in enumerate(labels):
        out.append(
            GridDescriptor(
                label=int(label),
                rows=spec.rows,
                cols=spec.cols,
                bins=spec.bins,
                histograms=counts[i] / n_b,
                block_counts=block_counts,
                total_count=int(k * n_b),
            )
        )
    return out


def generate_synthetic(spec: SynthSpec) -> tuple[list[GridDescriptor], list[GridDescriptor]]:
    """Generate (models, queries) for a synthetic classification benchmark.

    Returns one model descriptor per class (label = class id) and
    queries_per_class query descriptors per class, grouped by class.
    """
    rng = np.random.default_rng(spec.seed)
    alpha = np.full(spec.bins, spec.dirichlet_alpha)
    bases = rng.dirichlet(alpha, size=(spec.classes, spec.num_blocks))

    model_counts = rng.multinomial(spec.samples_per_block, bases)
    models = _descriptors_from_counts(model_counts, range(spec.classes), spec)

    q = spec.queries_per_class
    query_bases = np.repeat(bases, q, axis=0)
    query_counts = rng.multinomial(spec.samples_per_block, query_bases)
    query_labels = np.repeat(np.arange(spec.classes), q)
    queries = _descriptors_from_counts(query_counts, query_labels, spec)
    return models, queries
