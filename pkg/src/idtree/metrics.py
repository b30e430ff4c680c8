"""Influence metrics over dispersion trees.

IDI (influence dispersion index) sums the root-to-leaf path lengths of a
tree.  For n citers it ranges from n (every branch unified, each node on
exactly one branch) up to a peak reached by a single chain that fans out
at the bottom.  The normalized influence divergence NID rescales the gap
between a tree's IDI and the ideal value n onto [0, 1]; lower means the
citing papers are organized closer to the ideal layout, whose depth and
breadth are both ceil(sqrt(n)).
"""

from __future__ import annotations

import json
import math
import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusError
from .tree import InfluenceTree, build_idg, build_idt

CSV_HEADER = "paper_id,n,d,b,idi,idi_min,idi_max,id,nid"


def idi(tree: InfluenceTree) -> int:
    """Sum of root-to-leaf path lengths; 0 for an empty tree."""
    if not tree.parent:
        return 0
    internal = set(tree.parent.values())
    return sum(d for v, d in tree.depth.items() if v != tree.root and v not in internal)


def _require_positive(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"citation count must be a positive integer, got {n!r}")


def idi_min(n: int) -> int:
    """Smallest achievable IDI for n citers: n itself."""
    _require_positive(n)
    return int(n)


def idi_max(n: int) -> int:
    """Largest achievable IDI for n citers: (1 + k)(n - k) at k ~ (n-1)/2.

    The expression is symmetric about k = (n-1)/2, so rounding half-values
    up or down gives the same product; both are evaluated and checked.
    """
    _require_positive(n)
    k_lo = (n - 1) // 2
    k_hi = (n - 1) - k_lo
    lo = (1 + k_lo) * (n - k_lo)
    hi = (1 + k_hi) * (n - k_hi)
    if lo != hi:
        raise AssertionError(f"rounding asymmetry at n={n}: {lo} != {hi}")
    return lo


def ideal_idi(n: int) -> int:
    """IDI of the ideal layout (all branches unified): n."""
    _require_positive(n)
    return int(n)


def optimal_shape(n: int) -> tuple[int, int]:
    """Depth and breadth of the ideal layout: both ceil(sqrt(n))."""
    _require_positive(n)
    k = math.isqrt(n)
    if k * k < n:
        k += 1
    return (k, k)


def divergence_value(n: int, idi_value: int) -> int:
    _require_positive(n)
    return int(idi_value) - ideal_idi(n)


def influence_divergence(tree: InfluenceTree) -> int:
    """How far the tree's IDI sits above the ideal value; 0 for empty trees."""
    if not tree.parent:
        return 0
    return divergence_value(tree.n, idi(tree))


def nid_value(n: int, idi_value: int) -> float:
    """Normalized divergence in [0, 1]; 0 by convention when n <= 2."""
    _require_positive(n)
    span = idi_max(n) - idi_min(n)
    if span == 0:
        return 0.0
    return (int(idi_value) - ideal_idi(n)) / span


def nid(tree: InfluenceTree) -> float:
    """Normalized influence divergence of a tree; undefined for n = 0."""
    if not tree.parent:
        raise CorpusError(f"NID is undefined for uncited paper {tree.root!r}")
    return nid_value(tree.n, idi(tree))


@dataclass(frozen=True)
class MetricsReport:
    """Per-paper structural metrics, one CSV row per report."""

    paper_id: str
    n: int
    depth: int
    breadth: int
    idi: int
    idi_min: int
    idi_max: int
    divergence: int
    nid: float

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "n": self.n,
            "d": self.depth,
            "b": self.breadth,
            "idi": self.idi,
            "idi_min": self.idi_min,
            "idi_max": self.idi_max,
            "id": self.divergence,
            "nid": self.nid,
        }

    def csv_row(self) -> str:
        return (
            f"{self.paper_id},{self.n},{self.depth},{self.breadth},"
            f"{self.idi},{self.idi_min},{self.idi_max},{self.divergence},{self.nid!r}"
        )


def _paper_rng(seed: int, paper_id: str) -> np.random.Generator:
    # Stable per-paper stream: identical across runs, orders, and processes.
    return np.random.default_rng([seed] + list(paper_id.encode("utf-8")))


def paper_metrics(
    view,
    paper_id: str,
    *,
    tie: str = "min-id",
    seed: int = 0,
) -> MetricsReport | None:
    """Metrics for one paper under a view; None when it has no citations."""
    idg = build_idg(view, paper_id)
    n = idg.n
    if n == 0:
        return None
    rng = _paper_rng(seed, paper_id) if tie == "random" else None
    tree = build_idt(idg, tie=tie, rng=rng)
    depths = [tree.depth[v] for v in tree.parent]
    d = max(depths)
    b = max(np.bincount(depths)[1:])
    value = idi(tree)
    report = MetricsReport(
        paper_id, n, int(d), int(b), value,
        idi_min(n), idi_max(n), divergence_value(n, value), nid_value(n, value),
    )
    if not report.idi_min <= report.idi <= report.idi_max:
        raise AssertionError(f"IDI {report.idi} outside bounds for n={n}")
    return report


_WORKER_CTX: tuple | None = None


def _init_worker(view, tie: str, seed: int) -> None:
    global _WORKER_CTX
    _WORKER_CTX = (view, tie, seed)


def _metrics_chunk(ids: list[str]) -> list[MetricsReport]:
    view, tie, seed = _WORKER_CTX
    out = []
    for pid in ids:
        report = paper_metrics(view, pid, tie=tie, seed=seed)
        if report is not None:
            out.append(report)
    return out


def corpus_metrics(
    view,
    paper_ids=None,
    *,
    tie: str = "min-id",
    seed: int = 0,
    jobs: int = 1,
) -> list[MetricsReport]:
    """Metrics for every paper with at least one citation, sorted by id.

    With `jobs` > 1 papers are chunked across worker processes; the merge
    order is fixed by the sorted id list, so results match a serial run.
    """
    ids = sorted(paper_ids) if paper_ids is not None else list(view.paper_ids)
    if jobs <= 1 or len(ids) < 2 * jobs:
        _init_worker(view, tie, seed)
        return _metrics_chunk(ids)
    n_chunks = jobs * 4
    size = max(1, math.ceil(len(ids) / n_chunks))
    chunks = [ids[i : i + size] for i in range(0, len(ids), size)]
    method = "fork" if "fork" in mp.get_all_start_methods() else None
    ctx = mp.get_context(method)
    with ctx.Pool(jobs, initializer=_init_worker, initargs=(view, tie, seed)) as pool:
        parts = pool.map(_metrics_chunk, chunks)
    return [report for part in parts for report in part]


def write_metrics_csv(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for report in reports:
            fh.write(report.csv_row() + "\n")


def write_metrics_json(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)
        fh.write("\n")
