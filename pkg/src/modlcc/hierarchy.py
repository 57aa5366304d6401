"""Agglomerative coarsening of a fitted coclustering into a dendrogram."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Coclustering

__all__ = ["MergeRecord", "Dendrogram", "build_dendrogram", "cut"]


@dataclass(frozen=True)
class MergeRecord:
    side: str
    a: int  # cluster ids as seen in the renumbered model at this step
    b: int
    delta: float
    criterion: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class Dendrogram:
    initial_model: Coclustering
    merges: list[MergeRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "initial_k_source": self.initial_model.k_source,
            "initial_k_target": self.initial_model.k_target,
            "initial_criterion": self.initial_model.criterion().total,
            "merges": [rec.to_dict() for rec in self.merges],
        }


def build_dendrogram(model: Coclustering) -> Dendrogram:
    """Greedy minimum-delta merge sequence from `model` down to one cluster per side.

    Both sides compete at every step; deltas are criterion differences and
    are recorded verbatim (they can be negative if the input model was not
    merge-optimal).
    """
    eng = model._engine()
    total = eng.criterion_total()
    merges: list[MergeRecord] = []
    while eng.kS > 1 or eng.kT > 1:
        best = None  # (delta, side, slot_a, slot_b)
        for side in ("source", "target"):
            if eng.k(side) < 2:
                continue
            slots = eng.active_slots(side)
            g = eng.merge_global(side)
            for ai in range(len(slots) - 1):
                for bi in range(ai + 1, len(slots)):
                    d = eng.merge_struct(side, slots[ai], slots[bi]) + g
                    if best is None or d < best[0]:
                        best = (d, side, int(slots[ai]), int(slots[bi]))
        delta, side, sa, sb = best
        a_pub, b_pub = eng.public_pair(side, sa, sb)
        eng.apply_merge(side, sa, sb)
        total += delta
        merges.append(MergeRecord(side=side, a=a_pub, b=b_pub, delta=float(delta), criterion=float(total)))
    return Dendrogram(initial_model=model, merges=merges)


def cut(dendrogram: Dendrogram, target_source_clusters: int, target_target_clusters: int) -> Coclustering:
    """Model at the earliest merge-sequence state where both cluster counts
    are at or below the requested targets.

    The greedy sequence may skip the exact requested pair; the returned
    model's actual counts are its `k_source`/`k_target`.
    """
    model = dendrogram.initial_model
    if not (1 <= target_source_clusters <= model.k_source):
        raise ValueError(f"target source clusters must be in 1..{model.k_source}")
    if not (1 <= target_target_clusters <= model.k_target):
        raise ValueError(f"target target clusters must be in 1..{model.k_target}")
    for rec in dendrogram.merges:
        if model.k_source <= target_source_clusters and model.k_target <= target_target_clusters:
            break
        model, _ = model.merge(rec.side, rec.a, rec.b)
    return model
