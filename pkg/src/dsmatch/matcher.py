"""Query registration, candidate retrieval, and exact answer maintenance.

A registered query keeps a live answer set: the exact set of injective,
label- and edge-preserving mappings of the query into the current graph
snapshot.  Answers are normalized as a tuple of data-vertex ids aligned
with the query's vertices in ascending id order, so answer sets from any
vertex ordering (or from the brute-force oracle) compare directly.

Edge insertions extend answers from the inserted edge outward: every query
edge whose endpoint labels fit is seeded onto the new edge (both
orientations) and completed by left-deep depth-first join.  Edge deletions
drop exactly the stored answers whose edge image contains the deleted
edge, located through an inverted edge-to-answers index (or, behind a
flag, a full scan that must agree with it).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Iterable, Iterator

from .embedding import EmbeddingConfig, Vec, compose, label_vector
from .errors import InvalidParams
from .graph import DynamicGraph, INSERT, Label, UpdateOp, VertexId, load_graph
from .synopsis import (
    FILTER_EPS,
    DegreeGroups,
    ScanStats,
    SynopsisIndex,
    compute_degree_groups,
    dominated_within,
)

Mapping = tuple[VertexId, ...]  # images aligned with QueryGraph.vertex_order
EdgeKey = tuple[VertexId, VertexId]  # data edge as (min, max)


class QueryGraph:
    """Connected undirected labeled pattern; every vertex has degree >= 1."""

    __slots__ = ("vertex_order", "labels", "adj", "edges", "index_of", "edge_index_pairs")

    def __init__(self, labels: dict[VertexId, Label], edges: Iterable[EdgeKey]):
        self.labels = dict(labels)
        self.adj: dict[VertexId, set[VertexId]] = {v: set() for v in self.labels}
        edge_set = set()
        for u, v in edges:
            if u == v:
                raise InvalidParams(f"query has a self-loop on vertex {u}")
            if u not in self.labels or v not in self.labels:
                raise InvalidParams(f"query edge ({u}, {v}) references an unlabeled vertex")
            edge_set.add((u, v) if u < v else (v, u))
            self.adj[u].add(v)
            self.adj[v].add(u)
        self.edges: tuple[EdgeKey, ...] = tuple(sorted(edge_set))
        self.vertex_order: tuple[VertexId, ...] = tuple(sorted(self.labels))
        self.index_of = {q: i for i, q in enumerate(self.vertex_order)}
        self.edge_index_pairs = tuple(
            (self.index_of[u], self.index_of[v]) for u, v in self.edges
        )
        self._validate()

    def _validate(self) -> None:
        if len(self.vertex_order) < 2:
            raise InvalidParams("query needs at least two vertices")
        if any(not nbrs for nbrs in self.adj.values()):
            isolated = [v for v, nbrs in self.adj.items() if not nbrs]
            raise InvalidParams(f"query vertices {isolated} have degree 0")
        seen = {self.vertex_order[0]}
        frontier = [self.vertex_order[0]]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self.adj[u]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        if len(seen) != len(self.vertex_order):
            raise InvalidParams("query graph is not connected")

    @classmethod
    def from_text(cls, text: str) -> "QueryGraph":
        g = load_graph(text)
        return cls(g.labels, g.edges())

    @classmethod
    def from_graph(cls, g: DynamicGraph) -> "QueryGraph":
        return cls(g.labels, g.edges())

    def __len__(self) -> int:
        return len(self.vertex_order)

    def degree(self, q: VertexId) -> int:
        return len(self.adj[q])

    def has_edge(self, a: VertexId, b: VertexId) -> bool:
        return b in self.adj[a]

    def to_text(self) -> str:
        out = [f"t {len(self.vertex_order)} {len(self.edges)}"]
        out.extend(f"v {v} {self.labels[v]}" for v in self.vertex_order)
        out.extend(f"e {u} {v}" for u, v in self.edges)
        return "\n".join(out) + "\n"


def embed_query(q: QueryGraph, cfg: EmbeddingConfig) -> dict[VertexId, Vec]:
    """Embed each query vertex exactly as a data vertex would be."""
    out = {}
    for qi in q.vertex_order:
        acc = [0.0] * cfg.d
        for n in sorted(q.adj[qi]):
            x = label_vector(q.labels[n], cfg)
            for k in range(cfg.d):
                acc[k] += x[k]
        lbl = q.labels[qi]
        out[qi] = compose(label_vector(lbl, cfg), tuple(acc), lbl, cfg)
    return out


def make_plan(
    q: QueryGraph,
    cand_sizes: dict[VertexId, int],
    first: tuple[VertexId, VertexId] | None = None,
) -> tuple[VertexId, ...]:
    """Connected vertex ordering, greedily by smallest candidate set.

    Starts from the globally smallest candidate set (ties to the smallest
    id) and repeatedly appends the cheapest neighbor of the chosen prefix.
    ``first`` pins the two leading vertices (they must form a query edge),
    which the insertion path uses to seed the join on a new data edge.
    """
    if first is not None:
        qa, qb = first
        if not q.has_edge(qa, qb):
            raise InvalidParams(f"({qa}, {qb}) is not a query edge")
        plan = [qa, qb]
    else:
        start = min(q.vertex_order, key=lambda v: (cand_sizes[v], v))
        plan = [start]
    chosen = set(plan)
    while len(plan) < len(q.vertex_order):
        frontier = [
            v
            for v in q.vertex_order
            if v not in chosen and any(n in chosen for n in q.adj[v])
        ]
        nxt = min(frontier, key=lambda v: (cand_sizes[v], v))
        plan.append(nxt)
        chosen.add(nxt)
    return tuple(plan)


CandidateSource = Callable[[int, list], Iterable[VertexId]]


def refine(
    q: QueryGraph,
    plan: tuple[VertexId, ...],
    graph: DynamicGraph,
    seed: list[VertexId],
    depth: int,
    candidates_for: CandidateSource,
) -> set[Mapping]:
    """Left-deep depth-first completion of a partial mapping.

    At level n a candidate is admitted iff it is unused (injectivity) and
    the data edge exists for every query edge from plan[n] back into the
    mapped prefix.  Complete assignments are emitted in normalized form.
    The caller guarantees the seed itself is consistent.
    """
    size = len(plan)
    back = [
        [i for i in range(n) if q.has_edge(plan[i], plan[n])] for n in range(size)
    ]
    norm_pos = [q.index_of[qi] for qi in plan]
    M: list[VertexId] = list(seed) + [0] * (size - len(seed))
    used = set(seed)
    out: set[Mapping] = set()
    adj = graph.adj

    def rec(n: int) -> None:
        if n == size:
            norm = [0] * size
            for pos, img in zip(norm_pos, M):
                norm[pos] = img
            out.add(tuple(norm))
            return
        for u in candidates_for(n, M):
            if u in used:
                continue
            ok = True
            for i in back[n]:
                if u not in adj[M[i]]:
                    ok = False
                    break
            if ok:
                M[n] = u
                used.add(u)
                rec(n + 1)
                used.discard(u)

    rec(depth)
    return out


class AnswerSet:
    """Normalized mappings plus an inverted data-edge -> answers index."""

    def __init__(self, query: QueryGraph):
        self.query = query
        self._maps: set[Mapping] = set()
        self._by_edge: dict[EdgeKey, set[Mapping]] = defaultdict(set)

    def __len__(self) -> int:
        return len(self._maps)

    def __contains__(self, m: Mapping) -> bool:
        return m in self._maps

    def __iter__(self) -> Iterator[Mapping]:
        return iter(self._maps)

    def mappings(self) -> frozenset[Mapping]:
        return frozenset(self._maps)

    def edge_images(self, m: Mapping) -> Iterator[EdgeKey]:
        for ia, ib in self.query.edge_index_pairs:
            a, b = m[ia], m[ib]
            yield (a, b) if a < b else (b, a)

    def add(self, m: Mapping) -> bool:
        if m in self._maps:
            return False
        self._maps.add(m)
        for key in self.edge_images(m):
            self._by_edge[key].add(m)
        return True

    def discard(self, m: Mapping) -> None:
        if m not in self._maps:
            return
        self._maps.discard(m)
        for key in self.edge_images(m):
            bucket = self._by_edge.get(key)
            if bucket is not None:
                bucket.discard(m)
                if not bucket:
                    del self._by_edge[key]

    def answers_on_edge(self, key: EdgeKey) -> frozenset[Mapping]:
        return frozenset(self._by_edge.get(key, ()))


@dataclass
class RegisteredQuery:
    name: str
    query: QueryGraph
    embeds: dict[VertexId, Vec]
    cand_sets: dict[VertexId, list[VertexId]]
    scan_stats: dict[VertexId, ScanStats]
    plan: tuple[VertexId, ...]
    answers: AnswerSet

    @property
    def mean_pruning_power(self) -> float:
        stats = list(self.scan_stats.values())
        return sum(s.pruning_power for s in stats) / len(stats)


@dataclass
class QueryDelta:
    added: frozenset[Mapping] = frozenset()
    removed: frozenset[Mapping] = frozenset()


@dataclass
class UpdateResult:
    op: UpdateOp
    deltas: dict[str, QueryDelta]
    timings: dict[str, float] = field(default_factory=dict)


class MatchEngine:
    """Continuous exact subgraph matching over one dynamic graph.

    Owns the graph, the synopsis index (degree groups frozen from the
    graph at construction), and any number of registered queries.  All
    mutation goes through :meth:`process_update` (single writer); reads
    may happen freely between updates.
    """

    def __init__(
        self,
        graph: DynamicGraph,
        cfg: EmbeddingConfig,
        m_groups: int = 3,
        k_cells: int = 5,
        deletion_mode: str = "index",
    ):
        if deletion_mode not in ("index", "scan"):
            raise ValueError(f"deletion_mode must be 'index' or 'scan', got {deletion_mode!r}")
        self.graph = graph
        self.cfg = cfg
        self.groups: DegreeGroups = compute_degree_groups(graph, m_groups)
        self.index = SynopsisIndex.build(graph, self.groups, cfg, k_cells)
        self.queries: dict[str, RegisteredQuery] = {}
        self.deletion_mode = deletion_mode
        # test hooks; the first must not change results (the box filter is
        # a pure pruning step), the second deliberately breaks exactness
        self._skip_box_filter = False
        self._single_orientation = False

    # -- registration and initial answers --------------------------------

    def register(self, name: str, query: QueryGraph) -> RegisteredQuery:
        if name in self.queries:
            raise ValueError(f"query {name!r} already registered")
        rq = self.initial_match(name, query)
        self.queries[name] = rq
        return rq

    def initial_match(self, name: str, query: QueryGraph) -> RegisteredQuery:
        """Exact answers on the current snapshot via synopsis retrieval."""
        embeds = embed_query(query, self.cfg)
        cand_sets: dict[VertexId, list[VertexId]] = {}
        scan_stats: dict[VertexId, ScanStats] = {}
        for qi in query.vertex_order:
            cands, stats = self.index.scan_for_degree(
                embeds[qi], query.degree(qi), query.labels[qi]
            )
            cand_sets[qi] = cands
            scan_stats[qi] = stats
        plan = make_plan(query, {qi: len(c) for qi, c in cand_sets.items()})

        def from_cand_sets(n: int, _m: list) -> Iterable[VertexId]:
            return cand_sets[plan[n]]

        found = refine(query, plan, self.graph, [], 0, from_cand_sets)
        answers = AnswerSet(query)
        for m in found:
            answers.add(m)
        return RegisteredQuery(name, query, embeds, cand_sets, scan_stats, plan, answers)

    # -- incremental maintenance ------------------------------------------

    def process_update(self, op: UpdateOp) -> UpdateResult:
        """Apply one op to graph and index, then to every registered query."""
        timings = {
            "graph": 0.0,
            "embedding_update": 0.0,
            "synopsis_update": 0.0,
            "filtering": 0.0,
            "refinement": 0.0,
        }
        t0 = perf_counter()
        effect = self.graph.apply_update(op)
        timings["graph"] = perf_counter() - t0
        report = self.index.maintain(effect)
        timings["embedding_update"] = report.list_update_seconds
        timings["synopsis_update"] = report.entry_update_seconds

        deltas: dict[str, QueryDelta] = {}
        for name, rq in self.queries.items():
            if op.kind == INSERT:
                added, t_filter, t_refine = self._on_insert(rq, op.u, op.v)
                for m in added:
                    rq.answers.add(m)
                timings["filtering"] += t_filter
                timings["refinement"] += t_refine
                deltas[name] = QueryDelta(added=frozenset(added))
            else:
                t1 = perf_counter()
                removed = self._on_delete(rq, op.edge())
                timings["refinement"] += perf_counter() - t1
                deltas[name] = QueryDelta(removed=frozenset(removed))
        return UpdateResult(op=op, deltas=deltas, timings=timings)

    def _endpoint_ok(self, q: QueryGraph, qi: VertexId, v: VertexId, q_embed: Vec) -> bool:
        """Necessary-conditions filter for mapping query vertex qi onto v."""
        dq = q.degree(qi)
        if dq > self.index.lists.degree(v):
            return False
        if not dominated_within(q_embed, self.index.embedding_of(v)):
            return False
        if self._skip_box_filter:
            return True
        return self.index.lists.mbr(v, dq).contains(q_embed, FILTER_EPS)

    def _on_insert(
        self, rq: RegisteredQuery, vi: VertexId, vj: VertexId
    ) -> tuple[set[Mapping], float, float]:
        """New answers that use the just-inserted edge (vi, vj).

        Tries every query edge in both orientations; each hit seeds a
        two-deep partial mapping and completes it by refinement.  The
        per-level candidates come from the current adjacency (label-checked
        and filtered by the same dominance/box conditions the synopsis
        scan applies), so no stale candidate state is consulted.
        """
        q = rq.query
        graph = self.graph
        labels = graph.labels
        sizes = {qi: len(c) for qi, c in rq.cand_sets.items()}
        added: set[Mapping] = set()
        t_refine = 0.0
        t_start = perf_counter()
        orientations = ((vi, vj), (vj, vi)) if not self._single_orientation else ((vi, vj),)
        for qa, qb in q.edges:
            for va, vb in orientations:
                if q.labels[qa] != labels[va] or q.labels[qb] != labels[vb]:
                    continue
                if not self._endpoint_ok(q, qa, va, rq.embeds[qa]):
                    continue
                if not self._endpoint_ok(q, qb, vb, rq.embeds[qb]):
                    continue
                plan = make_plan(q, sizes, first=(qa, qb))
                source = self._adjacency_candidates(rq, plan)
                t1 = perf_counter()
                added |= refine(q, plan, graph, [va, vb], 2, source)
                t_refine += perf_counter() - t1
        t_filter = perf_counter() - t_start - t_refine
        return added, t_filter, t_refine

    def _adjacency_candidates(
        self, rq: RegisteredQuery, plan: tuple[VertexId, ...]
    ) -> CandidateSource:
        """Candidates for plan levels >= 1, derived from current adjacency.

        Prefix connectivity guarantees at least one back-edge, so every
        admissible image is a neighbor of an already-mapped vertex; the
        smallest such neighborhood is enumerated and filtered.
        """
        q = rq.query
        graph = self.graph
        labels = graph.labels
        back = [
            [i for i in range(n) if q.has_edge(plan[i], plan[n])]
            for n in range(len(plan))
        ]

        def source(n: int, M: list) -> Iterator[VertexId]:
            qn = plan[n]
            want = q.labels[qn]
            anchor = min(back[n], key=lambda i: len(graph.adj[M[i]]))
            embed = rq.embeds[qn]
            for u in graph.adj[M[anchor]]:
                if labels[u] == want and self._endpoint_ok(q, qn, u, embed):
                    yield u

        return source

    def _on_delete(self, rq: RegisteredQuery, edge: EdgeKey) -> set[Mapping]:
        if self.deletion_mode == "index":
            victims = rq.answers.answers_on_edge(edge)
        else:
            victims = frozenset(
                m for m in rq.answers if edge in set(rq.answers.edge_images(m))
            )
        for m in victims:
            rq.answers.discard(m)
        return set(victims)


def format_mapping(query: QueryGraph, m: Mapping) -> str:
    pairs = " ".join(
        f"q{qid}->{img}" for qid, img in zip(query.vertex_order, m)
    )
    return f"match {pairs}"


def format_answers(query: QueryGraph, answers: Iterable[Mapping]) -> str:
    return "\n".join(format_mapping(query, m) for m in sorted(answers))


def format_delta(query: QueryGraph, delta: QueryDelta) -> str:
    """Answer lines prefixed '+' for additions and '-' for removals."""
    lines = [f"+ {format_mapping(query, m)}" for m in sorted(delta.added)]
    lines += [f"- {format_mapping(query, m)}" for m in sorted(delta.removed)]
    return "\n".join(lines)
