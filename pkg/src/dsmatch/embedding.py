"""Per-vertex dominance embeddings over labels and 1-hop neighborhoods.

A vertex embedding has 2d dimensions: a d-vector determined only by the
vertex's label (strictly positive, seeded), concatenated with the
componentwise sum of the neighbors' label vectors.  Because a sub-star of
a vertex's neighborhood drops non-negative summands, its embedding is
componentwise <= the full star's embedding; that dominance relation is
what all index pruning in this package relies on.

Three modes share that property:

* ``plain``      -- the raw concatenation.
* ``base``       -- affine re-location ``alpha * concat + beta * z`` where
  ``z`` is a label-seeded point on the L1-unit diagonal; with
  ``alpha << beta`` embeddings of equal-label vertices cluster tightly
  around their diagonal point, which sharpens pruning.
* ``zipf``       -- like ``base`` but label-vector components are drawn from
  a seeded Zipf distribution (low mean, high variance) instead of a
  uniform one, which a query-cost analysis favors.

All draws come from the integer mixer in :mod:`dsmatch.rng`, so every
vector is a pure, bit-stable function of (label, dimension, salt).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionMismatch, NegativeComponent, UnknownVertex
from .graph import DynamicGraph, Label, VertexId
from .rng import mix_words, unit_open_closed

MODE_PLAIN = "plain"
MODE_BASE = "base"
MODE_ZIPF = "zipf"
MODES = (MODE_PLAIN, MODE_BASE, MODE_ZIPF)

# stream tags keep the label-vector, base-vector, and zipf draws disjoint
_TAG_LABEL_VEC = 0x5B
_TAG_BASE_VEC = 0xBA

# tolerance for detecting a remove of a contribution that was never added
_REMOVE_EPS = 1e-9

Vec = tuple[float, ...]


@dataclass(frozen=True)
class EmbeddingConfig:
    """Embedding parameters; hashable so derived tables can be cached.

    ``alpha``/``beta`` only matter for the ``base`` and ``zipf`` modes and
    must satisfy ``beta / alpha >= 10`` there (the re-location argument
    needs the concat term to act as small noise on the diagonal term).
    """

    d: int = 2
    alpha: float = 0.1
    beta: float = 100.0
    mode: str = MODE_ZIPF
    zipf_s: float = 1.2
    zipf_ranks: int = 1024
    zipf_buckets: int = 64
    seed_salt: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.mode != MODE_PLAIN and self.beta / self.alpha < 10:
            raise ValueError(
                f"beta/alpha must be >= 10 for mode {self.mode!r}, "
                f"got {self.beta / self.alpha:g}"
            )
        if self.zipf_s <= 0:
            raise ValueError("zipf_s must be positive")
        if not 1 <= self.zipf_buckets <= self.zipf_ranks:
            raise ValueError("need zipf_ranks >= zipf_buckets >= 1")


# -- seeded Zipf draws --------------------------------------------------------


class ZipfTable:
    """Inverse-CDF sampler for Zipf(s) over ranks 1..n with a bucket index.

    Both the uniform source and the rank distribution are cut into
    ``buckets`` equal-mass pieces; a uniform draw selects its bucket in
    O(1) and is then placed at its proportional position inside the
    corresponding rank bucket (i.e. by the conditional inverse CDF), so
    the result follows the Zipf distribution exactly.  With one bucket
    this degenerates to a plain inverse-CDF lookup over all ranks.
    """

    def __init__(self, s: float, n: int, buckets: int):
        if not 1 <= buckets <= n:
            raise ValueError("need n >= buckets >= 1")
        self.s = s
        self.n = n
        self.buckets = buckets
        weights = [r ** -s for r in range(1, n + 1)]
        total = sum(weights)
        cdf = []
        acc = 0.0
        for w in weights:
            acc += w
            cdf.append(acc / total)
        cdf[-1] = 1.0  # guard against rounding just below one
        self._cdf = cdf
        # bucket i covers cumulative mass (i/b, (i+1)/b]; starts[i] is the
        # index of the first rank whose cdf can exceed i/b
        self._starts = [bisect.bisect_right(cdf, i / buckets) for i in range(buckets)]
        self._starts.append(n)

    def draw(self, u: float) -> float:
        """Map a uniform u in (0, 1] to rank/n in (0, 1]."""
        if not 0.0 < u <= 1.0:
            raise ValueError(f"u must be in (0, 1], got {u}")
        b = min(int(u * self.buckets), self.buckets - 1)
        lo, hi = self._starts[b], self._starts[b + 1]
        idx = bisect.bisect_left(self._cdf, u, lo, hi)
        if idx >= self.n:  # float guard: u == 1.0 lands on the last rank
            idx = self.n - 1
        return (idx + 1) / self.n


@lru_cache(maxsize=None)
def _zipf_table(s: float, n: int, buckets: int) -> ZipfTable:
    return ZipfTable(s, n, buckets)


def seeded_zipf_draw(seed: int, cfg: EmbeddingConfig) -> float:
    """Deterministic Zipf-distributed value in (0, 1] for a 64-bit seed."""
    u = unit_open_closed(mix_words(seed))
    return _zipf_table(cfg.zipf_s, cfg.zipf_ranks, cfg.zipf_buckets).draw(u)


# -- label-seeded vectors -----------------------------------------------------


@lru_cache(maxsize=None)
def label_vector(label: Label, cfg: EmbeddingConfig) -> Vec:
    """The d-vector determined by a vertex label, components in (0, 1].

    Per-dimension seeds mix (stream tag, salt, label, dimension); the
    ``zipf`` mode pushes each uniform draw through the Zipf table.
    """
    out = []
    for k in range(cfg.d):
        seed = mix_words(_TAG_LABEL_VEC, cfg.seed_salt, label, k)
        if cfg.mode == MODE_ZIPF:
            out.append(seeded_zipf_draw(seed, cfg))
        else:
            out.append(unit_open_closed(mix_words(seed)))
    return tuple(out)


@lru_cache(maxsize=None)
def base_vector(label: Label, cfg: EmbeddingConfig) -> Vec:
    """Label-seeded point on the L1-unit diagonal of the positive orthant.

    2d strictly-positive uniform draws normalized to L1 norm 1.
    """
    raw = [
        unit_open_closed(mix_words(_TAG_BASE_VEC, cfg.seed_salt, label, k))
        for k in range(2 * cfg.d)
    ]
    total = sum(raw)
    return tuple(x / total for x in raw)


def neighbor_sum(g: DynamicGraph, v: VertexId, cfg: EmbeddingConfig) -> Vec:
    """Componentwise sum of label vectors over v's 1-hop neighbors.

    Summation runs in ascending neighbor-id order; keeping one canonical
    order makes subset sums float-monotone against the full sum, which the
    exhaustive dominance tests rely on.
    """
    if v not in g:
        raise UnknownVertex(f"vertex {v} not in graph")
    acc = [0.0] * cfg.d
    for n in g.sorted_neighbors(v):
        x = label_vector(g.labels[n], cfg)
        for k in range(cfg.d):
            acc[k] += x[k]
    return tuple(acc)


def adjust_neighbor_sum(
    y: Vec, neighbor_label: Label, direction: str, cfg: EmbeddingConfig
) -> Vec:
    """O(d) incremental neighbor-sum update: add or remove one neighbor.

    Removing a contribution that was never added drives a component below
    -1e-9 and raises :class:`NegativeComponent`; sub-tolerance negatives
    from float cancellation are clamped to zero.
    """
    x = label_vector(neighbor_label, cfg)
    if direction == "add":
        return tuple(a + b for a, b in zip(y, x))
    if direction != "remove":
        raise ValueError(f"direction must be 'add' or 'remove', got {direction!r}")
    out = []
    for a, b in zip(y, x):
        r = a - b
        if r < -_REMOVE_EPS:
            raise NegativeComponent(
                f"neighbor-sum component would drop to {r}; removal of a "
                f"contribution that was never added"
            )
        out.append(r if r > 0.0 else 0.0)
    return tuple(out)


# -- composition, dominance, keys --------------------------------------------


def compose(x: Vec, y: Vec, label: Label, cfg: EmbeddingConfig) -> Vec:
    """Assemble the 2d embedding from a label vector and a neighbor sum."""
    if cfg.mode == MODE_PLAIN:
        return x + y
    z = base_vector(label, cfg)
    a, b = cfg.alpha, cfg.beta
    concat = x + y
    return tuple(a * concat[j] + b * z[j] for j in range(2 * cfg.d))


def embed_vertex(g: DynamicGraph, v: VertexId, cfg: EmbeddingConfig) -> Vec:
    """Embedding of v's full 1-hop star in the current snapshot."""
    lbl = g.label(v)
    return compose(label_vector(lbl, cfg), neighbor_sum(g, v, cfg), lbl, cfg)


def dominates(a: Vec, b: Vec) -> bool:
    """True iff a[j] <= b[j] on every dimension (equality allowed)."""
    if len(a) != len(b):
        raise DimensionMismatch(f"arity {len(a)} vs {len(b)}")
    return all(ai <= bi for ai, bi in zip(a, b))


def embedding_key(a: Vec) -> float:
    """Sum of squared components (monotone under dominance on >=0 vectors)."""
    return sum(c * c for c in a)
