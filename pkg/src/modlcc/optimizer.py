"""Model-space search: random initial solutions, greedy bottom-up merging,
vertex-move post-optimization and multi-start selection of the best model."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._engine import Engine
from .model import Coclustering, CriterionBreakdown, null_model

__all__ = [
    "FitConfig",
    "RoundLog",
    "FitResult",
    "initial_solution",
    "gbum",
    "post_optimize",
    "vns_fit",
]


@dataclass
class FitConfig:
    rounds: int = 10
    seed: int = 0
    max_initial_clusters: int | None = None
    post_opt_passes: int = 2

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.post_opt_passes < 0:
            raise ValueError("post_opt_passes must be >= 0")


@dataclass
class RoundLog:
    round: int
    seed: int
    initial_k_source: int
    initial_k_target: int
    final_k_source: int
    final_k_target: int
    criterion: float
    seconds: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class FitResult:
    best_model: Coclustering
    best_criterion: CriterionBreakdown
    rounds: list[RoundLog] = field(default_factory=list)
    config: FitConfig | None = None

    def to_dict(self, seed=None) -> dict:
        d = self.best_model.to_dict(seed=seed if seed is not None else getattr(self.config, "seed", None))
        # wall times stay out of the file so identical runs serialize identically
        d["fit_log"] = [
            {k: v for k, v in r.to_dict().items() if k != "seconds"} for r in self.rounds
        ]
        return d


def initial_solution(sample, max_clusters: int, seed) -> Coclustering:
    """Seeded uniform random partition into at most `max_clusters` clusters per side."""
    if max_clusters < 1:
        raise ValueError("max_clusters must be >= 1")
    rng = np.random.default_rng(seed)
    parts = []
    for n in (sample.n_source, sample.n_target):
        k = min(max_clusters, n)
        assign = rng.integers(0, k, size=n)
        # force every cluster to be non-empty so the solution spans exactly
        # k clusters (moves and merges can only reduce the count afterwards)
        seeds = rng.permutation(n)[:k]
        assign[seeds] = np.arange(k)
        parts.append(assign)
    return Coclustering(sample, parts[0], parts[1])


# -- greedy bottom-up merging --------------------------------------------------


def _pair_struct_matrix(eng: Engine, side: str) -> np.ndarray:
    """Dense matrix of k-independent merge deltas; D[a, b] valid for active a < b."""
    _, sizes, margin, active, M, _ = eng._state(side)
    lf = eng.lf
    idx = np.flatnonzero(active)
    cap = len(active)
    D = np.full((cap, cap), np.inf)
    rows = M[idx]
    lrows = lf[rows]
    for ai in range(len(idx) - 1):
        a = idx[ai]
        bs = idx[ai + 1 :]
        t6 = (lrows[ai] + lrows[ai + 1 :] - lf[rows[ai] + rows[ai + 1 :]]).sum(axis=1)
        ma, mb = margin[a], margin[bs]
        na, nb = sizes[a], sizes[bs]
        t4 = (
            eng._lnC(ma + mb + na + nb - 1, na + nb - 1)
            - eng._lnC(ma + na - 1, na - 1)
            - eng._lnC(mb + nb - 1, nb - 1)
        )
        t7 = lf[ma + mb] - lf[ma] - lf[mb]
        D[a, bs] = t6 + t4 + t7
    return D


def _refresh_pairs_for(eng: Engine, side: str, D: np.ndarray, slot: int):
    """Recompute struct deltas of `slot` versus every other active cluster."""
    _, sizes, margin, active, M, _ = eng._state(side)
    lf = eng.lf
    others = np.flatnonzero(active)
    others = others[others != slot]
    if len(others) == 0:
        return
    ra = M[slot]
    B = M[others]
    t6 = (lf[ra] + lf[B] - lf[ra + B]).sum(axis=1)
    ma, na = margin[slot], sizes[slot]
    mb, nb = margin[others], sizes[others]
    t4 = (
        eng._lnC(ma + mb + na + nb - 1, na + nb - 1)
        - eng._lnC(ma + na - 1, na - 1)
        - eng._lnC(mb + nb - 1, nb - 1)
    )
    t7 = lf[ma + mb] - lf[ma] - lf[mb]
    vals = t6 + t4 + t7
    lo = np.minimum(slot, others)
    hi = np.maximum(slot, others)
    D[lo, hi] = vals


def _cross_side_correction(eng: Engine, D_other: np.ndarray, old_a, old_b):
    """Adjust the other side's pair deltas after a merge changed one row.

    Only pairs of clusters that share nonzero cells with the merged rows
    are impacted; everything else keeps its delta.
    """
    lf = eng.lf
    support = np.flatnonzero((old_a != 0) | (old_b != 0))
    if len(support) < 2:
        return

    def pair_contrib(r):
        lr = lf[r]
        return lr[:, None] + lr[None, :] - lf[r[:, None] + r[None, :]]

    x, y = old_a[support], old_b[support]
    corr = pair_contrib(x + y) - pair_contrib(x) - pair_contrib(y)
    D_other[np.ix_(support, support)] += corr


def _best_pair(D: np.ndarray):
    flat = np.argmin(D)
    a, b = divmod(int(flat), D.shape[1])
    return D[a, b], a, b


def _gbum(eng: Engine, trace=None):
    """Run greedy bottom-up merging in place until no merge improves."""
    Ds = _pair_struct_matrix(eng, "source")
    Dt = _pair_struct_matrix(eng, "target")
    while eng.kS > 1 or eng.kT > 1:
        best = None  # (total, side, a, b)
        if eng.kS > 1:
            v, a, b = _best_pair(Ds)
            best = (v + eng.merge_global("source"), "source", a, b)
        if eng.kT > 1:
            v, a, b = _best_pair(Dt)
            cand = (v + eng.merge_global("target"), "target", a, b)
            if best is None or cand[0] < best[0]:
                best = cand
        total, side, a, b = best
        if not total < 0.0:
            break
        if side == "source":
            old_a, old_b = eng.M[a].copy(), eng.M[b].copy()
            keep = eng.apply_merge(side, a, b)
            drop = b if keep == a else a
            Ds[drop, :] = np.inf
            Ds[:, drop] = np.inf
            _refresh_pairs_for(eng, "source", Ds, keep)
            _cross_side_correction(eng, Dt, old_a, old_b)
        else:
            old_a, old_b = eng.M[:, a].copy(), eng.M[:, b].copy()
            keep = eng.apply_merge(side, a, b)
            drop = b if keep == a else a
            Dt[drop, :] = np.inf
            Dt[:, drop] = np.inf
            _refresh_pairs_for(eng, "target", Dt, keep)
            _cross_side_correction(eng, Ds, old_a, old_b)
        if trace is not None:
            trace.append((side, a, b, float(total)))
    return eng


def gbum(model: Coclustering) -> Coclustering:
    """Greedy bottom-up merge heuristic: apply the best strictly-improving
    cluster merge until none improves the criterion."""
    eng = model._engine()
    _gbum(eng)
    s, t = eng.compact_assignments()
    return Coclustering(model.sample, s, t)


# -- vertex-move post-optimization ----------------------------------------------


def _sweep(eng: Engine, side: str) -> bool:
    """One greedy best-move pass over all vertices of `side`; True if anything moved."""
    n = eng.nS if side == "source" else eng.nT
    moved = False
    for v in range(n):
        if eng.k(side) < 2:
            break
        a, dests, deltas = eng.move_options(side, v)
        if len(dests) == 0:
            continue
        best = int(np.argmin(deltas))
        if deltas[best] < 0.0:
            eng.apply_move(side, v, int(dests[best]))
            moved = True
    return moved


def _post_opt(eng: Engine, passes: int):
    for _ in range(passes):
        moved = _sweep(eng, "source")
        moved |= _sweep(eng, "target")
        if not moved:
            break
    return eng


def post_optimize(model: Coclustering, passes: int = 2) -> Coclustering:
    """Greedy vertex-move sweeps, alternating sides with the other partition frozen."""
    eng = model._engine()
    _post_opt(eng, passes)
    s, t = eng.compact_assignments()
    return Coclustering(model.sample, s, t)


# -- multi-start -------------------------------------------------------------------


def vns_fit(sample, config: FitConfig | None = None, progress=None) -> FitResult:
    """Multi-start search: per round, random initial solution, move
    pre-optimization, greedy merging, move post-optimization; keep the best."""
    config = config or FitConfig()
    max_init = config.max_initial_clusters
    if max_init is None:
        r = math.isqrt(sample.m)
        max_init = r if r * r == sample.m else r + 1  # ceil(sqrt(m))
        if max_init < 2:
            # tiny samples: start from the maximal model so merging can explore
            max_init = max(sample.n_source, sample.n_target)
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.rounds)

    best_model = None
    best_total = np.inf
    logs: list[RoundLog] = []
    for r in range(config.rounds):
        t0 = time.perf_counter()
        model = initial_solution(sample, max_init, children[r])
        eng = model._engine()
        ik_s, ik_t = eng.kS, eng.kT
        _post_opt(eng, config.post_opt_passes)
        _gbum(eng)
        _post_opt(eng, config.post_opt_passes)
        total = eng.criterion_total()
        s, t = eng.compact_assignments()
        fitted = Coclustering(sample, s, t)
        elapsed = time.perf_counter() - t0
        log = RoundLog(
            round=r,
            seed=config.seed,
            initial_k_source=ik_s,
            initial_k_target=ik_t,
            final_k_source=fitted.k_source,
            final_k_target=fitted.k_target,
            criterion=total,
            seconds=elapsed,
        )
        logs.append(log)
        if progress is not None:
            progress(log)
        if total < best_total:
            best_total = total
            best_model = fitted
    null = null_model(sample)
    if null.criterion().total < best_total:
        best_model = null
    return FitResult(
        best_model=best_model,
        best_criterion=best_model.criterion(),
        rounds=logs,
        config=config,
    )
