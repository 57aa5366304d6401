"""Coclustering models and the exact evaluation criterion.

A model is a pair of partitions (source and target vertices) together with
all the edge counts it induces on the sample.  The criterion is the exact
negative log posterior of the model under the hierarchical uniform prior;
lower is better, values are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._engine import Engine
from .graph import MultigraphSample

__all__ = [
    "ModelError",
    "CriterionBreakdown",
    "Coclustering",
    "NEW_CLUSTER",
    "from_partitions",
    "criterion",
    "merge",
    "move",
    "null_model",
    "maximal_model",
]

NEW_CLUSTER = "new"

_TERM_NAMES = (
    "cluster_number_prior",
    "partition_prior",
    "cocluster_prior",
    "source_margin_prior",
    "target_margin_prior",
    "cocluster_likelihood",
    "source_degree_likelihood",
    "target_degree_likelihood",
)


class ModelError(ValueError):
    """Invalid partition or model/sample mismatch."""


@dataclass(frozen=True)
class CriterionBreakdown:
    """The eight additive criterion terms and their sum, in nats."""

    cluster_number_prior: float
    partition_prior: float
    cocluster_prior: float
    source_margin_prior: float
    target_margin_prior: float
    cocluster_likelihood: float
    source_degree_likelihood: float
    target_degree_likelihood: float
    total: float

    @classmethod
    def from_terms(cls, terms) -> "CriterionBreakdown":
        terms = tuple(float(t) for t in terms)
        return cls(*terms, total=float(sum(terms)))

    @property
    def likelihood_total(self) -> float:
        """Sum of the three likelihood terms (no prior terms)."""
        return (
            self.cocluster_likelihood
            + self.source_degree_likelihood
            + self.target_degree_likelihood
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _TERM_NAMES + ("total",)}


def _normalize_partition(partition, labels, n, what) -> np.ndarray:
    """Accept an assignment array or an iterable of clusters (labels/indices)."""
    label_index = {lab: i for i, lab in enumerate(labels)}
    part = list(partition)
    if part and not np.isscalar(part[0]) and isinstance(part[0], (list, tuple, set, frozenset)):
        assign = -np.ones(n, dtype=np.int64)
        for cid, cluster in enumerate(part):
            for v in cluster:
                idx = label_index[v] if isinstance(v, str) else int(v)
                if not 0 <= idx < n:
                    raise ModelError(f"{what} vertex {v!r} out of range")
                if assign[idx] != -1:
                    raise ModelError(f"{what} vertex {v!r} assigned twice")
                assign[idx] = cid
    else:
        assign = np.asarray(part, dtype=np.int64)
        if assign.shape != (n,):
            raise ModelError(f"{what} assignment must cover all {n} vertices")
    if np.any(assign < 0):
        raise ModelError(f"{what} partition does not cover every vertex")
    k = int(assign.max()) + 1
    sizes = np.bincount(assign, minlength=k)
    if np.any(sizes == 0):
        raise ModelError(f"{what} partition has an empty cluster")
    return assign


class Coclustering:
    """A source/target partition pair with cached counts over a sample."""

    def __init__(self, sample: MultigraphSample, source_assignment, target_assignment):
        self.sample = sample
        self.source_assignment = _normalize_partition(
            source_assignment, sample.source_labels, sample.n_source, "source"
        )
        self.target_assignment = _normalize_partition(
            target_assignment, sample.target_labels, sample.n_target, "target"
        )
        self.k_source = int(self.source_assignment.max()) + 1
        self.k_target = int(self.target_assignment.max()) + 1
        self.source_cluster_sizes = np.bincount(self.source_assignment, minlength=self.k_source)
        self.target_cluster_sizes = np.bincount(self.target_assignment, minlength=self.k_target)

        flat = (
            self.source_assignment[sample.src_idx] * self.k_target
            + self.target_assignment[sample.tgt_idx]
        )
        grid = np.bincount(flat, weights=sample.counts, minlength=self.k_source * self.k_target)
        grid = grid.astype(np.int64).reshape(self.k_source, self.k_target)
        self.cocluster_grid = grid
        self.cocluster_counts = {
            (int(i), int(j)): int(grid[i, j]) for i, j in zip(*np.nonzero(grid))
        }
        self.source_cluster_margins = grid.sum(axis=1)
        self.target_cluster_margins = grid.sum(axis=0)
        self._criterion: CriterionBreakdown | None = None

    # -- evaluation --------------------------------------------------------

    def _engine(self) -> Engine:
        return Engine(self.sample, self.source_assignment, self.target_assignment)

    def criterion(self) -> CriterionBreakdown:
        if self._criterion is None:
            self._criterion = CriterionBreakdown.from_terms(self._engine().criterion_terms())
        return self._criterion

    # -- edits ---------------------------------------------------------------

    def merge(self, side: str, a: int, b: int):
        """Fuse clusters a and b on `side`; returns (new model, criterion delta)."""
        k = self.k_source if side == "source" else self.k_target
        if a == b or not (0 <= a < k and 0 <= b < k):
            raise ModelError(f"invalid {side} cluster pair ({a}, {b})")
        eng = self._engine()
        delta = eng.merge_delta(side, a, b)
        eng.apply_merge(side, a, b)
        s, t = eng.compact_assignments()
        return Coclustering(self.sample, s, t), float(delta)

    def move(self, side: str, vertex: int, dest):
        """Move a vertex to cluster `dest` (or NEW_CLUSTER); returns (model, delta)."""
        n = self.sample.n_source if side == "source" else self.sample.n_target
        k = self.k_source if side == "source" else self.k_target
        if not 0 <= vertex < n:
            raise ModelError(f"{side} vertex {vertex} out of range")
        fresh = dest == NEW_CLUSTER or dest is None
        if not fresh and not 0 <= dest < k:
            raise ModelError(f"invalid {side} destination cluster {dest}")
        assign = self.source_assignment if side == "source" else self.target_assignment
        if not fresh and dest == assign[vertex]:
            return self, 0.0
        eng = self._engine()
        delta = eng.move_delta(side, vertex, None if fresh else dest)
        eng.apply_move(side, vertex, None if fresh else dest)
        s, t = eng.compact_assignments()
        return Coclustering(self.sample, s, t), float(delta)

    # -- audits ---------------------------------------------------------------

    def verify_consistent(self, sample: MultigraphSample | None = None):
        """Recompute all counts from the sample and compare (consistency audit)."""
        sample = sample or self.sample
        if sample.n_source != self.sample.n_source or sample.n_target != self.sample.n_target:
            raise ModelError("consistency audit failed: vertex universes differ")
        other = Coclustering(sample, self.source_assignment, self.target_assignment)
        if other.cocluster_counts != self.cocluster_counts:
            raise ModelError("consistency audit failed: cocluster counts differ")
        if not np.array_equal(sample.out_degrees, self.sample.out_degrees) or not np.array_equal(
            sample.in_degrees, self.sample.in_degrees
        ):
            raise ModelError("consistency audit failed: vertex degrees differ")

    def clusters(self, side: str) -> list[list[str]]:
        labels = self.sample.source_labels if side == "source" else self.sample.target_labels
        assign = self.source_assignment if side == "source" else self.target_assignment
        k = self.k_source if side == "source" else self.k_target
        out: list[list[str]] = [[] for _ in range(k)]
        for idx, cid in enumerate(assign):
            out[cid].append(labels[idx])
        return out

    # -- serialization ------------------------------------------------------------

    def to_dict(self, seed=None, tool_version=None) -> dict:
        from . import __version__

        return {
            "format_version": 1,
            "tool_version": tool_version or __version__,
            "seed": seed,
            "source_labels": self.sample.source_labels,
            "target_labels": self.sample.target_labels,
            "unified": self.sample.unified,
            "source_assignment": self.source_assignment.tolist(),
            "target_assignment": self.target_assignment.tolist(),
            "source_clusters": self.clusters("source"),
            "target_clusters": self.clusters("target"),
            "cocluster_counts": [[i, j, c] for (i, j), c in sorted(self.cocluster_counts.items())],
            "criterion": self.criterion().to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict, sample: MultigraphSample) -> "Coclustering":
        if data.get("source_labels") != sample.source_labels or (
            data.get("target_labels") != sample.target_labels
        ):
            raise ModelError("model labels do not match the sample")
        model = cls(sample, data["source_assignment"], data["target_assignment"])
        stored = {(int(i), int(j)): int(c) for i, j, c in data.get("cocluster_counts", [])}
        if stored and stored != model.cocluster_counts:
            raise ModelError("consistency audit failed: stored cocluster counts differ from the sample")
        return model

    def __repr__(self):
        return f"Coclustering(k_source={self.k_source}, k_target={self.k_target}, m={self.sample.m})"


def from_partitions(sample, source_partition, target_partition) -> Coclustering:
    """Build a model from explicit partitions (assignment arrays or label clusters)."""
    return Coclustering(sample, source_partition, target_partition)


def criterion(model: Coclustering) -> CriterionBreakdown:
    return model.criterion()


def merge(model: Coclustering, side: str, a: int, b: int):
    return model.merge(side, a, b)


def move(model: Coclustering, side: str, vertex: int, dest):
    return model.move(side, vertex, dest)


def null_model(sample: MultigraphSample) -> Coclustering:
    """One cluster per side."""
    return Coclustering(
        sample, np.zeros(sample.n_source, dtype=np.int64), np.zeros(sample.n_target, dtype=np.int64)
    )


def maximal_model(sample: MultigraphSample) -> Coclustering:
    """One cluster per vertex."""
    return Coclustering(
        sample, np.arange(sample.n_source, dtype=np.int64), np.arange(sample.n_target, dtype=np.int64)
    )
