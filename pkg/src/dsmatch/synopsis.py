"""Degree-grouped grid synopses over vertex embeddings.

One synopsis per degree group.  A vertex of degree ``deg`` appears in every
group whose lower bound it exceeds, filed under the upper corner of the
bounding box of its star-subset embeddings at the group-capped degree.
Cells of each grid are kept in descending order of their squared-norm key
so scans can stop early once no remaining cell can be dominated by a query
embedding.

Per-degree bounding boxes are never materialized: each vertex keeps one
ascending list (plus prefix sums) of its neighbors' label-vector components
per dimension, and the box for any degree is two prefix-sum lookups per
dimension (sum of the delta smallest / delta largest components).

Scans and maintenance follow the single-writer contract of the graph:
maintenance is exclusive, scans may run concurrently between updates.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left, insort
from dataclasses import dataclass
from time import perf_counter

from .embedding import (
    EmbeddingConfig,
    MODE_PLAIN,
    Vec,
    base_vector,
    compose,
    embedding_key,
    label_vector,
)
from .errors import DegreeOutOfRange, InconsistentState, UnknownVertex
from .graph import DynamicGraph, INSERT, UpdateEffect, VertexId

# Slack applied to filter comparisons only (never to the exact dominance
# predicate): sums of identical floats taken in different orders can differ
# in the last ulps, and a pruning filter must never drop a true match over
# rounding.  False positives this lets through are removed by refinement.
FILTER_EPS = 1e-9

# grid domain headroom over the initial-graph estimate of embedding extents
_DOMAIN_EPS = 0.01

# cap on exhaustive search over degree-group boundary placements
_MAX_BOUNDARY_COMBOS = 200_000


def dominated_within(a: Vec, b: Vec, eps: float = FILTER_EPS) -> bool:
    """Filter-grade dominance: a[j] <= b[j] + eps on every dimension."""
    return all(ai <= bi + eps for ai, bi in zip(a, b))


# -- degree grouping ----------------------------------------------------------


@dataclass(frozen=True)
class DegreeGroups:
    """Partition of [1, inf) into contiguous integer degree intervals.

    ``cutoffs`` holds the interior boundaries; group j (0-based) covers
    (lower_j, upper_j] with lower_0 = 0 and the last upper bound infinite.
    """

    cutoffs: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.cutoffs) + 1

    def lower(self, j: int) -> int:
        return 0 if j == 0 else self.cutoffs[j - 1]

    def upper(self, j: int) -> float:
        return self.cutoffs[j] if j < len(self.cutoffs) else math.inf

    def group_of(self, degree: int) -> int:
        if degree < 1:
            raise ValueError(f"degree {degree} belongs to no group")
        return bisect_left(self.cutoffs, degree)

    def capped_degree(self, degree: int, j: int) -> int:
        """min(degree, upper_j); equals degree in the unbounded last group."""
        up = self.upper(j)
        return degree if math.isinf(up) else min(degree, int(up))


def compute_degree_groups(g0: DynamicGraph, m: int) -> DegreeGroups:
    """Choose m degree intervals with near-equal vertex mass over g0.

    Degree-zero vertices carry no mass (they sit in no synopsis).  When m
    exceeds the number of distinct positive degrees, every distinct degree
    becomes its own group.  Balance objective: minimize max - min bucket
    mass, ties broken toward the smaller max and then the lexicographically
    smallest boundaries, found by exhaustive search over boundary
    placements (greedy fallback above a combination-count cap).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    freq: dict[int, int] = {}
    for v in g0.vertices():
        d = g0.degree(v)
        if d >= 1:
            freq[d] = freq.get(d, 0) + 1
    degrees = sorted(freq)
    n = len(degrees)
    if n == 0 or m == 1:
        return DegreeGroups(())
    if m >= n:
        return DegreeGroups(tuple(degrees[:-1]))

    masses = [freq[d] for d in degrees]
    n_cuts = m - 1
    if math.comb(n - 1, n_cuts) <= _MAX_BOUNDARY_COMBOS:
        best = None
        for cuts in itertools.combinations(range(1, n), n_cuts):
            sizes = []
            prev = 0
            for c in (*cuts, n):
                sizes.append(sum(masses[prev:c]))
                prev = c
            key = (max(sizes) - min(sizes), max(sizes), cuts)
            if best is None or key < best:
                best = key
                best_cuts = cuts
        return DegreeGroups(tuple(degrees[c - 1] for c in best_cuts))

    # greedy: close a bucket once it reaches its fair share of what remains
    cuts = []
    remaining = sum(masses)
    groups_left = m
    acc = 0
    for i, mass in enumerate(masses):
        acc += mass
        if len(cuts) < n_cuts and acc >= remaining / groups_left:
            cuts.append(degrees[i])
            remaining -= acc
            acc = 0
            groups_left -= 1
    return DegreeGroups(tuple(cuts))


# -- per-vertex sorted component lists ---------------------------------------


class VertexLists:
    """Ascending per-dimension lists of neighbor label-vector components.

    ``prefix[k][i]`` is the sum of the i smallest components on dimension k,
    so the extreme sums over any delta neighbors are O(1) lookups.  Prefix
    sums are rebuilt from the list after every touch: cheap at graph-stream
    degree scales, and it keeps them bit-identical to a from-scratch build.
    """

    __slots__ = ("lists", "prefix")

    def __init__(self, d: int):
        self.lists: list[list[float]] = [[] for _ in range(d)]
        self.prefix: list[list[float]] = [[0.0] for _ in range(d)]

    @property
    def degree(self) -> int:
        return len(self.lists[0])

    def _rebuild_prefix(self) -> None:
        for k, lst in enumerate(self.lists):
            pre = [0.0] * (len(lst) + 1)
            acc = 0.0
            for i, x in enumerate(lst):
                acc += x
                pre[i + 1] = acc
            self.prefix[k] = pre

    def add(self, vec: Vec) -> None:
        for k, x in enumerate(vec):
            insort(self.lists[k], x)
        self._rebuild_prefix()

    def remove(self, vec: Vec) -> None:
        for k, x in enumerate(vec):
            lst = self.lists[k]
            i = bisect_left(lst, x)
            if i >= len(lst) or lst[i] != x:
                raise InconsistentState(
                    f"component {x!r} not present in sorted list {k}"
                )
            del lst[i]
        self._rebuild_prefix()

    def totals(self) -> Vec:
        """Sum of all neighbor components per dimension."""
        return tuple(pre[-1] for pre in self.prefix)

    def low_sum(self, k: int, delta: int) -> float:
        return self.prefix[k][delta]

    def high_sum(self, k: int, delta: int) -> float:
        pre = self.prefix[k]
        return pre[-1] - pre[len(pre) - 1 - delta]


@dataclass(frozen=True)
class Mbr:
    """Axis-aligned box over embedding space; first d dims are degenerate
    (every star subset shares the center vertex, hence its coordinates)."""

    low: Vec
    high: Vec

    def contains(self, p: Vec, eps: float = 0.0) -> bool:
        return all(lo - eps <= x <= hi + eps for lo, x, hi in zip(self.low, p, self.high))


class NeighborListStore:
    """All per-vertex sorted lists for one graph, plus box computation."""

    def __init__(self, graph: DynamicGraph, cfg: EmbeddingConfig):
        self.graph = graph
        self.cfg = cfg
        self.by_vertex: dict[VertexId, VertexLists] = {}

    @classmethod
    def build(cls, graph: DynamicGraph, cfg: EmbeddingConfig) -> "NeighborListStore":
        store = cls(graph, cfg)
        for v in graph.vertices():
            vl = VertexLists(cfg.d)
            comps = [
                label_vector(graph.labels[n], cfg) for n in graph.sorted_neighbors(v)
            ]
            for k in range(cfg.d):
                vl.lists[k] = sorted(x[k] for x in comps)
            vl._rebuild_prefix()
            store.by_vertex[v] = vl
        return store

    def ensure(self, v: VertexId) -> VertexLists:
        vl = self.by_vertex.get(v)
        if vl is None:
            vl = VertexLists(self.cfg.d)
            self.by_vertex[v] = vl
        return vl

    def lists_of(self, v: VertexId) -> VertexLists:
        try:
            return self.by_vertex[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} has no list state") from None

    def degree(self, v: VertexId) -> int:
        vl = self.by_vertex.get(v)
        return 0 if vl is None else vl.degree

    def neighbor_sum(self, v: VertexId) -> Vec:
        return self.lists_of(v).totals()

    def embedding(self, v: VertexId) -> Vec:
        """Current full-star embedding of v, from the maintained lists."""
        lbl = self.graph.label(v)
        return compose(label_vector(lbl, self.cfg), self.neighbor_sum(v), lbl, self.cfg)

    def mbr(self, v: VertexId, delta: int) -> Mbr:
        """Bounds over embeddings of all delta-leaf star subsets of v."""
        vl = self.lists_of(v)
        deg = vl.degree
        if not 1 <= delta <= deg:
            raise DegreeOutOfRange(
                f"delta {delta} outside [1, {deg}] for vertex {v}"
            )
        cfg = self.cfg
        lbl = self.graph.label(v)
        x = label_vector(lbl, cfg)
        raw_lo = [vl.low_sum(k, delta) for k in range(cfg.d)]
        raw_hi = [vl.high_sum(k, delta) for k in range(cfg.d)]
        if cfg.mode == MODE_PLAIN:
            return Mbr(low=x + tuple(raw_lo), high=x + tuple(raw_hi))
        z = base_vector(lbl, cfg)
        a, b = cfg.alpha, cfg.beta
        head = tuple(a * x[k] + b * z[k] for k in range(cfg.d))
        low = head + tuple(a * raw_lo[k] + b * z[cfg.d + k] for k in range(cfg.d))
        high = head + tuple(a * raw_hi[k] + b * z[cfg.d + k] for k in range(cfg.d))
        return Mbr(low=low, high=high)


def mbr_for_degree(
    v: VertexId, delta: int, lists: NeighborListStore, cfg: EmbeddingConfig
) -> Mbr:
    """Per-degree bounding box from prefix sums (see NeighborListStore.mbr)."""
    assert lists.cfg == cfg
    return lists.mbr(v, delta)


# -- grid synopses ------------------------------------------------------------


@dataclass
class VertexEntry:
    vertex: VertexId
    ub_delta: int
    corner: Vec  # upper corner of the box at the capped degree


class Cell:
    __slots__ = ("coords", "corner", "key", "entries")

    def __init__(self, coords: tuple[int, ...], corner: Vec):
        self.coords = coords
        self.corner = corner
        self.key = embedding_key(corner)
        self.entries: dict[VertexId, VertexEntry] = {}


@dataclass
class ScanStats:
    """Per-scan pruning accounting.

    ``examined`` counts entries in every cell reached before the key
    cutoff; the pruned_* fields partition examined - survivors by the
    filter that removed each entry, applied in order: whole-cell
    dominance, per-entry corner dominance, label equality, per-degree
    box membership.
    """

    cells_scanned: int = 0
    examined: int = 0
    pruned_cell: int = 0
    pruned_dominance: int = 0
    pruned_label: int = 0
    pruned_box: int = 0
    survivors: int = 0

    @property
    def pruning_power(self) -> float:
        """1 - survivors/examined; 1.0 when the key cutoff examined nothing."""
        if self.examined == 0:
            return 1.0
        return 1.0 - self.survivors / self.examined

    @property
    def dominated(self) -> int:
        """Entries the query embedding dominates, labels disregarded.

        This is the false-alarm count the embedding-mode designs compete
        on; the label and box filters downstream are mode-insensitive.
        """
        return self.examined - self.pruned_cell - self.pruned_dominance

    @property
    def dominance_pruning_power(self) -> float:
        """1 - dominated/examined: pruning by dominance filters alone."""
        if self.examined == 0:
            return 1.0
        return 1.0 - self.dominated / self.examined


class GridSynopsis:
    """Equal-width grid over one degree group's capped-degree corners.

    The top interval on each dimension is unbounded (its corner coordinate
    is +inf): values beyond the frozen domain clamp into it, which keeps
    the key cutoff and cell dominance sound when the graph drifts past the
    initial extent estimate.
    """

    def __init__(self, group: int, lower: int, upper: float, k_cells: int, domain: float):
        self.group = group
        self.lower = lower
        self.upper = upper
        self.k_cells = k_cells
        self.domain = domain
        self.width = domain / k_cells
        self.cells: dict[tuple[int, ...], Cell] = {}
        self.order: list[tuple[float, tuple[int, ...]]] = []  # (-key, coords)
        self.locator: dict[VertexId, tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.locator)

    def cell_coords(self, point: Vec) -> tuple[int, ...]:
        k = self.k_cells
        w = self.width
        return tuple(min(int(x / w) if x > 0 else 0, k - 1) for x in point)

    def _cell_corner(self, coords: tuple[int, ...]) -> Vec:
        return tuple(
            math.inf if c == self.k_cells - 1 else (c + 1) * self.width for c in coords
        )

    def place(self, vertex: VertexId, ub_delta: int, corner: Vec) -> None:
        coords = self.cell_coords(corner)
        old = self.locator.get(vertex)
        if old == coords:
            cell = self.cells[coords]
            entry = cell.entries[vertex]
            entry.ub_delta = ub_delta
            entry.corner = corner
            return
        if old is not None:
            self._remove_from_cell(vertex, old)
        cell = self.cells.get(coords)
        if cell is None:
            cell = Cell(coords, self._cell_corner(coords))
            self.cells[coords] = cell
            insort(self.order, (-cell.key, coords))
        cell.entries[vertex] = VertexEntry(vertex, ub_delta, corner)
        self.locator[vertex] = coords

    def remove(self, vertex: VertexId) -> None:
        coords = self.locator.get(vertex)
        if coords is None:
            raise InconsistentState(
                f"vertex {vertex} has no entry in synopsis {self.group}"
            )
        self._remove_from_cell(vertex, coords)
        del self.locator[vertex]

    def _remove_from_cell(self, vertex: VertexId, coords: tuple[int, ...]) -> None:
        cell = self.cells.get(coords)
        if cell is None or vertex not in cell.entries:
            raise InconsistentState(
                f"synopsis {self.group}: expected entry for vertex {vertex} "
                f"in cell {coords}"
            )
        del cell.entries[vertex]
        if not cell.entries:
            del self.cells[coords]
            i = bisect_left(self.order, (-cell.key, coords))
            del self.order[i]

    def snapshot(self) -> dict:
        """Canonical content for equality checks (entry order independent)."""
        return {
            coords: sorted(
                (e.vertex, e.ub_delta, e.corner) for e in cell.entries.values()
            )
            for coords, cell in self.cells.items()
        }

    def dump(self) -> str:
        lines = []
        for negkey, coords in self.order:
            cell = self.cells[coords]
            cs = ",".join(map(str, coords))
            lines.append(f"cell {cs} key={-negkey:.6g} entries={len(cell.entries)}")
        return "\n".join(lines)


def scan_candidates(
    syn: GridSynopsis,
    q_embed: Vec,
    q_degree: int,
    q_label: int,
    lists: NeighborListStore,
    cfg: EmbeddingConfig,
) -> tuple[list[VertexId], ScanStats]:
    """Candidate vertices for one query vertex from one synopsis.

    Walks cells in descending key order and stops once a cell key falls
    below the query key (minus a float-safety slack); inside surviving
    cells keeps a vertex only if the query embedding dominates the stored
    corner, its label matches, and the query embedding lies inside the
    vertex's box at exactly the query degree.  All three are necessary
    conditions for a match, so no true match image is ever dropped.
    """
    stats = ScanStats()
    out: list[VertexId] = []
    key_q = embedding_key(q_embed)
    # dominance is checked with +eps per dimension; widen the key cutoff by
    # the worst-case key growth so the two filters cannot disagree
    cutoff = key_q - 2.0 * FILTER_EPS * len(q_embed) * syn.domain - 1e-12
    labels = lists.graph.labels
    for negkey, coords in syn.order:
        if -negkey < cutoff:
            break
        cell = syn.cells[coords]
        n = len(cell.entries)
        stats.cells_scanned += 1
        stats.examined += n
        if not dominated_within(q_embed, cell.corner):
            stats.pruned_cell += n
            continue
        for entry in cell.entries.values():
            v = entry.vertex
            if not dominated_within(q_embed, entry.corner):
                stats.pruned_dominance += 1
            elif labels.get(v) != q_label:
                stats.pruned_label += 1
            elif q_degree > lists.degree(v) or not lists.mbr(v, q_degree).contains(
                q_embed, FILTER_EPS
            ):
                stats.pruned_box += 1
            else:
                out.append(v)
                stats.survivors += 1
    return out, stats


# -- the full index -----------------------------------------------------------


@dataclass
class MaintenanceReport:
    entries_added: int = 0
    entries_removed: int = 0
    entries_moved: int = 0
    entries_refreshed: int = 0
    list_update_seconds: float = 0.0
    entry_update_seconds: float = 0.0


class SynopsisIndex:
    """All degree-group synopses plus the shared per-vertex list store.

    Degree groups and the grid domain are frozen at build time (from the
    initial graph); incremental maintenance keeps entries, corners, and
    lists exactly equal to what a from-scratch build over the current
    snapshot (with the same frozen parameters) would produce.
    """

    def __init__(
        self,
        graph: DynamicGraph,
        groups: DegreeGroups,
        cfg: EmbeddingConfig,
        k_cells: int,
        domain: float,
        lists: NeighborListStore,
    ):
        self.graph = graph
        self.groups = groups
        self.cfg = cfg
        self.k_cells = k_cells
        self.domain = domain
        self.lists = lists
        self.synopses = [
            GridSynopsis(j, groups.lower(j), groups.upper(j), k_cells, domain)
            for j in range(groups.m)
        ]

    @classmethod
    def build(
        cls,
        graph: DynamicGraph,
        groups: DegreeGroups,
        cfg: EmbeddingConfig,
        k_cells: int,
        domain: float | None = None,
    ) -> "SynopsisIndex":
        if k_cells < 1:
            raise ValueError(f"k_cells must be >= 1, got {k_cells}")
        lists = NeighborListStore.build(graph, cfg)
        if domain is None:
            domain = default_domain(lists, cfg)
        index = cls(graph, groups, cfg, k_cells, domain, lists)
        for v in graph.vertices():
            index._sync_vertex(v, graph.degree(v))
        return index

    def _sync_vertex(self, v: VertexId, degree: int) -> tuple[int, int, int, int]:
        added = removed = moved = refreshed = 0
        for syn in self.synopses:
            present = syn.locator.get(v) is not None
            belongs = degree > syn.lower
            if belongs:
                ub = self.groups.capped_degree(degree, syn.group)
                corner = self.lists.mbr(v, ub).high
                before = syn.locator.get(v)
                syn.place(v, ub, corner)
                after = syn.locator[v]
                if not present:
                    added += 1
                elif before != after:
                    moved += 1
                else:
                    refreshed += 1
            elif present:
                syn.remove(v)
                removed += 1
        return added, removed, moved, refreshed

    def maintain(self, effect: UpdateEffect) -> MaintenanceReport:
        """Apply one graph update's consequences to lists and entries.

        Must be called with the effect of the op just applied to the graph
        this index was built over, before any other op is applied.
        """
        report = MaintenanceReport()
        op = effect.op
        t0 = perf_counter()
        lu = self.graph.label(op.u)
        lv = self.graph.label(op.v)
        for w, other_label in ((op.u, lv), (op.v, lu)):
            vl = self.lists.ensure(w)
            vec = label_vector(other_label, self.cfg)
            if op.kind == INSERT:
                vl.add(vec)
            else:
                vl.remove(vec)
        t1 = perf_counter()
        for w, (_, new_deg) in effect.degrees.items():
            a, r, mv, rf = self._sync_vertex(w, new_deg)
            report.entries_added += a
            report.entries_removed += r
            report.entries_moved += mv
            report.entries_refreshed += rf
        report.list_update_seconds = t1 - t0
        report.entry_update_seconds = perf_counter() - t1
        return report

    def scan_for_degree(
        self, q_embed: Vec, q_degree: int, q_label: int
    ) -> tuple[list[VertexId], ScanStats]:
        syn = self.synopses[self.groups.group_of(q_degree)]
        return scan_candidates(syn, q_embed, q_degree, q_label, self.lists, self.cfg)

    def embedding_of(self, v: VertexId) -> Vec:
        return self.lists.embedding(v)

    def snapshot(self) -> dict:
        return {
            "domain": self.domain,
            "cutoffs": self.groups.cutoffs,
            "synopses": [syn.snapshot() for syn in self.synopses],
            "lists": {
                v: tuple(tuple(lst) for lst in vl.lists)
                for v, vl in self.lists.by_vertex.items()
                if vl.degree > 0
            },
        }

    def dump(self) -> str:
        parts = []
        for syn in self.synopses:
            parts.append(
                f"# synopsis {syn.group} degrees ({syn.lower}, {syn.upper}] "
                f"entries={len(syn)}"
            )
            text = syn.dump()
            if text:
                parts.append(text)
        return "\n".join(parts) + "\n"


def default_domain(lists: NeighborListStore, cfg: EmbeddingConfig) -> float:
    """Grid extent from the current graph's largest neighbor-sum component.

    Optimized modes are dominated by the beta term, so the extent is beta
    plus headroom plus the (small) alpha image of the sum estimate; plain
    mode just covers the raw concat range.  Later growth past the estimate
    clamps into the unbounded top interval.
    """
    sum_max = 0.0
    for vl in lists.by_vertex.values():
        if vl.degree:
            sum_max = max(sum_max, max(pre[-1] for pre in vl.prefix))
    if cfg.mode == MODE_PLAIN:
        return (1.0 + _DOMAIN_EPS) * max(1.0, sum_max)
    return cfg.beta * (1.0 + _DOMAIN_EPS) + cfg.alpha * max(1.0, sum_max)
