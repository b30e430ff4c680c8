"""Citation corpus ingestion, hygiene rules, and time-sliced views.

Raw bibliographic edge streams are messy: duplicate rows, self-citations,
citations pointing forward in time (preprints citing later work), papers
with no metadata, and papers that end up with no links at all.  `ingest`
funnels everything through a fixed cleaning order and returns an immutable
`CitationCorpus` plus an `IngestReport` with one counter per rule.

Cleaning order (per edge, then globally):

1. malformed records are rejected and counted,
2. self-citations dropped,
3. exact duplicate edges dropped (before any year screening),
4. edges touching a paper without metadata dropped,
5. forward citations dropped (citing year < cited year),
6. residual same-year cycles broken by dropping every edge that lies on a
   cycle (all such cycles live inside one publication year, so this is the
   "drop both directions" rule generalized to longer cycles),
7. papers left without links are removed iteratively until a fixed point.

Step 7 defaults to removing papers with no citations AND no references;
pass ``isolated_policy="either"`` to remove papers missing either kind of
link instead.
"""

from __future__ import annotations

import hashlib
import json
import pickle
from bisect import bisect_right
from collections import defaultdict, deque
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence


class CorpusError(Exception):
    """Unusable corpus input or request."""


class UnknownPaperError(CorpusError):
    """Requested paper id is absent from the corpus or view."""

    def __init__(self, paper_id: str):
        super().__init__(f"unknown paper id: {paper_id!r}")
        self.paper_id = paper_id


@dataclass(frozen=True)
class PaperRecord:
    """One paper: opaque id, publication year, optional venue.

    A venue string identifies one series+year pairing (e.g. ``"JCDL-2000"``),
    so two editions of the same series are distinct venues.
    """

    id: str
    year: int
    venue: str | None = None


@dataclass
class IngestReport:
    """Counters for every cleaning rule applied during ingest."""

    papers_in: int = 0
    papers_kept: int = 0
    edges_in: int = 0
    edges_kept: int = 0
    dropped_self: int = 0
    dropped_dup: int = 0
    dropped_forward: int = 0
    dropped_cycle: int = 0
    dropped_isolated: int = 0
    dropped_unknown: int = 0
    malformed_papers: int = 0
    malformed_edges: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class CitationCorpus:
    """Immutable deduplicated citation DAG over a set of papers.

    Edges are (citing_id, cited_id) pairs.  Construction assumes the edge
    list is already clean (use `ingest` for raw streams); endpoints must
    exist and citing papers may not predate the papers they cite.
    """

    __slots__ = ("_records", "_citers", "_citer_years", "_refs", "_ids", "_n_edges")

    def __init__(self, records: Iterable[PaperRecord], edges: Iterable[tuple[str, str]]):
        recs: dict[str, PaperRecord] = {}
        for rec in records:
            if rec.id in recs:
                raise CorpusError(f"duplicate paper id: {rec.id!r}")
            recs[rec.id] = rec
        citers: dict[str, list[str]] = {pid: [] for pid in recs}
        refs: dict[str, set[str]] = {pid: set() for pid in recs}
        n_edges = 0
        for citing, cited in edges:
            if citing not in recs or cited not in recs:
                raise CorpusError(f"edge ({citing!r}, {cited!r}) references unknown paper")
            if citing == cited:
                raise CorpusError(f"self-citation: {citing!r}")
            if recs[citing].year < recs[cited].year:
                raise CorpusError(f"forward citation: {citing!r} -> {cited!r}")
            if cited in refs[citing]:
                raise CorpusError(f"duplicate edge ({citing!r}, {cited!r})")
            refs[citing].add(cited)
            citers[cited].append(citing)
            n_edges += 1
        self._records = recs
        self._refs = {pid: frozenset(rs) for pid, rs in refs.items()}
        self._ids = tuple(sorted(recs))
        self._n_edges = n_edges
        self._citers = {}
        self._citer_years = {}
        for pid, lst in citers.items():
            lst.sort(key=lambda c: (recs[c].year, c))
            self._citers[pid] = tuple(lst)
            self._citer_years[pid] = tuple(recs[c].year for c in lst)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._records

    @property
    def paper_ids(self) -> tuple[str, ...]:
        return self._ids

    @property
    def n_edges(self) -> int:
        return self._n_edges

    def has_paper(self, paper_id: str) -> bool:
        return paper_id in self._records

    def record(self, paper_id: str) -> PaperRecord:
        try:
            return self._records[paper_id]
        except KeyError:
            raise UnknownPaperError(paper_id) from None

    def year(self, paper_id: str) -> int:
        return self.record(paper_id).year

    def citations_of(self, paper_id: str) -> tuple[str, ...]:
        """Ids of papers citing `paper_id`, ordered by (year, id)."""
        try:
            return self._citers[paper_id]
        except KeyError:
            raise UnknownPaperError(paper_id) from None

    def citation_count(self, paper_id: str) -> int:
        return len(self.citations_of(paper_id))

    def references_of(self, paper_id: str) -> frozenset[str]:
        """Ids of papers that `paper_id` cites."""
        try:
            return self._refs[paper_id]
        except KeyError:
            raise UnknownPaperError(paper_id) from None

    def edges(self) -> Iterator[tuple[str, str]]:
        """All (citing, cited) pairs in sorted order."""
        for citing in self._ids:
            for cited in sorted(self._refs[citing]):
                yield (citing, cited)

    def year_range(self) -> tuple[int, int]:
        if not self._records:
            raise CorpusError("empty corpus has no year range")
        years = [r.year for r in self._records.values()]
        return min(years), max(years)

    def snapshot(self, cutoff_year: int) -> "CorpusSnapshot":
        """View restricted to papers and citing activity up to `cutoff_year`."""
        return CorpusSnapshot(self, cutoff_year)


class CorpusSnapshot:
    """Time-sliced read-only view of a corpus.

    Contains papers published in or before the cutoff year and edges whose
    citing paper falls within the cutoff (the cited side then does too,
    because retained citations never point forward in time).
    """

    __slots__ = ("base", "cutoff_year")

    def __init__(self, base: CitationCorpus, cutoff_year: int):
        self.base = base
        self.cutoff_year = cutoff_year

    def __contains__(self, paper_id: str) -> bool:
        return self.has_paper(paper_id)

    def has_paper(self, paper_id: str) -> bool:
        return self.base.has_paper(paper_id) and self.base.year(paper_id) <= self.cutoff_year

    @property
    def paper_ids(self) -> tuple[str, ...]:
        return tuple(p for p in self.base.paper_ids if self.base.year(p) <= self.cutoff_year)

    def record(self, paper_id: str) -> PaperRecord:
        rec = self.base.record(paper_id)
        if rec.year > self.cutoff_year:
            raise UnknownPaperError(paper_id)
        return rec

    def year(self, paper_id: str) -> int:
        return self.record(paper_id).year

    def citations_of(self, paper_id: str) -> tuple[str, ...]:
        self.record(paper_id)
        years = self.base._citer_years[paper_id]
        return self.base._citers[paper_id][: bisect_right(years, self.cutoff_year)]

    def citation_count(self, paper_id: str) -> int:
        self.record(paper_id)
        years = self.base._citer_years[paper_id]
        return bisect_right(years, self.cutoff_year)

    def references_of(self, paper_id: str) -> frozenset[str]:
        self.record(paper_id)
        return self.base.references_of(paper_id)

    def edges(self) -> Iterator[tuple[str, str]]:
        for citing, cited in self.base.edges():
            if self.base.year(citing) <= self.cutoff_year:
                yield (citing, cited)


def _coerce_record(item) -> PaperRecord | None:
    if isinstance(item, PaperRecord):
        pid, year, venue = item.id, item.year, item.venue
    elif isinstance(item, Mapping):
        pid, year, venue = item.get("id"), item.get("year"), item.get("venue")
    else:
        return None
    if not isinstance(pid, str) or not pid:
        return None
    if isinstance(year, bool) or not isinstance(year, int):
        return None
    if venue is not None and not isinstance(venue, str):
        return None
    return PaperRecord(pid, year, venue)


def _coerce_edge(item) -> tuple[str, str] | None:
    if not isinstance(item, Sequence) or isinstance(item, str) or len(item) != 2:
        return None
    citing, cited = item
    if not isinstance(citing, str) or not isinstance(cited, str) or not citing or not cited:
        return None
    return (citing, cited)


def _edges_on_cycles(edges: list[tuple[str, str]]) -> set[tuple[str, str]]:
    """Edges lying on a directed cycle: both endpoints in one nontrivial SCC."""
    adj: dict[str, list[str]] = defaultdict(list)
    nodes: set[str] = set()
    for u, v in edges:
        adj[u].append(v)
        nodes.add(u)
        nodes.add(v)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    comp: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    n_comp = 0
    comp_size: dict[int, int] = {}
    for start in sorted(nodes):
        if start in index:
            continue
        work = [(start, iter(adj[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                size = 0
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = n_comp
                    size += 1
                    if w == node:
                        break
                comp_size[n_comp] = size
                n_comp += 1
    return {(u, v) for u, v in edges if comp[u] == comp[v] and comp_size[comp[u]] > 1}


def ingest(
    edges: Iterable,
    records: Iterable,
    *,
    isolated_policy: str = "both",
) -> tuple[CitationCorpus, IngestReport]:
    """Build a clean corpus from raw edge and metadata streams.

    `records` yields `PaperRecord`s or dicts with ``id``/``year``/``venue``
    keys; `edges` yields (citing_id, cited_id) pairs.  Malformed items and
    edges touching papers without metadata are rejected and counted, never
    fatal.  `isolated_policy` is ``"both"`` (drop papers with no citations
    and no references) or ``"either"`` (drop papers missing either kind).
    """
    if isolated_policy not in ("both", "either"):
        raise ValueError(f"isolated_policy must be 'both' or 'either', got {isolated_policy!r}")
    report = IngestReport()

    recs: dict[str, PaperRecord] = {}
    for item in records:
        report.papers_in += 1
        rec = _coerce_record(item)
        if rec is None or rec.id in recs:
            report.malformed_papers += 1
            continue
        recs[rec.id] = rec

    kept: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for item in edges:
        report.edges_in += 1
        edge = _coerce_edge(item)
        if edge is None:
            report.malformed_edges += 1
            continue
        citing, cited = edge
        if citing == cited:
            report.dropped_self += 1
            continue
        if edge in seen:
            report.dropped_dup += 1
            continue
        seen.add(edge)
        if citing not in recs or cited not in recs:
            report.dropped_unknown += 1
            continue
        if recs[citing].year < recs[cited].year:
            report.dropped_forward += 1
            continue
        kept.append(edge)

    same_year = [(u, v) for u, v in kept if recs[u].year == recs[v].year]
    cyclic = _edges_on_cycles(same_year) if same_year else set()
    if cyclic:
        report.dropped_cycle = len(cyclic)
        kept = [e for e in kept if e not in cyclic]

    # Iterative removal of papers without links; removing a paper deletes
    # its edges, which can strand neighbours (matters under "either").
    cit_count: dict[str, int] = defaultdict(int)
    ref_count: dict[str, int] = defaultdict(int)
    out_adj: dict[str, list[str]] = defaultdict(list)
    in_adj: dict[str, list[str]] = defaultdict(list)
    for citing, cited in kept:
        ref_count[citing] += 1
        cit_count[cited] += 1
        out_adj[citing].append(cited)
        in_adj[cited].append(citing)

    if isolated_policy == "both":
        def _dropped(p: str) -> bool:
            return cit_count[p] == 0 and ref_count[p] == 0
    else:
        def _dropped(p: str) -> bool:
            return cit_count[p] == 0 or ref_count[p] == 0

    alive = set(recs)
    pending = deque(sorted(recs))
    queued = set(pending)
    while pending:
        p = pending.popleft()
        queued.discard(p)
        if p not in alive or not _dropped(p):
            continue
        alive.discard(p)
        report.dropped_isolated += 1
        for v in out_adj[p]:
            if v in alive:
                cit_count[v] -= 1
                if v not in queued:
                    pending.append(v)
                    queued.add(v)
        for u in in_adj[p]:
            if u in alive:
                ref_count[u] -= 1
                if u not in queued:
                    pending.append(u)
                    queued.add(u)

    final_edges = [(u, v) for u, v in kept if u in alive and v in alive]
    report.papers_kept = len(alive)
    report.edges_kept = len(final_edges)
    corpus = CitationCorpus((recs[p] for p in sorted(alive)), final_edges)
    return corpus, report


# ---------------------------------------------------------------------------
# File formats: tab-separated edge lists and JSON-lines metadata.
# ---------------------------------------------------------------------------

def read_edge_file(path) -> Iterator[tuple[str, ...]]:
    """Yield raw field tuples from a `citing<TAB>cited` file.

    Blank lines and lines starting with ``#`` are skipped.  Any other line
    is split on tabs and yielded as-is; `ingest` rejects wrong arity.
    """
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield tuple(line.split("\t"))


def read_metadata_file(path) -> Iterator:
    """Yield one parsed JSON object per line; undecodable lines yield the raw string."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                yield line


def write_edge_file(corpus: CitationCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for citing, cited in corpus.edges():
            fh.write(f"{citing}\t{cited}\n")


def write_metadata_file(corpus: CitationCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pid in corpus.paper_ids:
            rec = corpus.record(pid)
            obj: dict = {"id": rec.id, "year": rec.year}
            if rec.venue is not None:
                obj["venue"] = rec.venue
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def ingest_files(edge_path, meta_path, **kwargs) -> tuple[CitationCorpus, IngestReport]:
    return ingest(read_edge_file(edge_path), read_metadata_file(meta_path), **kwargs)


# ---------------------------------------------------------------------------
# Binary cache keyed by a digest of the source files.
# ---------------------------------------------------------------------------

CACHE_FORMAT = 1


def file_digest(*paths) -> str:
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
        h.update(b"\x00")
    return h.hexdigest()


def save_cache(corpus: CitationCorpus, path, source_hash: str = "") -> None:
    payload = {
        "format": CACHE_FORMAT,
        "source_hash": source_hash,
        "records": [(r.id, r.year, r.venue) for r in (corpus.record(p) for p in corpus.paper_ids)],
        "edges": list(corpus.edges()),
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_cache(path, expect_hash: str | None = None) -> CitationCorpus | None:
    """Load a cached corpus; returns None when missing, stale, or unreadable."""
    try:
        with open(path, "rb") as fh:
            payload = pickle.load(fh)
    except (OSError, pickle.UnpicklingError, EOFError):
        return None
    if not isinstance(payload, dict) or payload.get("format") != CACHE_FORMAT:
        return None
    if expect_hash is not None and payload.get("source_hash") != expect_hash:
        return None
    records = (PaperRecord(pid, year, venue) for pid, year, venue in payload["records"])
    return CitationCorpus(records, payload["edges"])
