import statistics

import pytest

from dsmatch.errors import InvalidParams, InvalidRate
from dsmatch.generate import (
    BenchConfig,
    generate_graph,
    ring_params_for_avg_degree,
    sample_queries,
    split_stream,
)
from dsmatch.graph import DELETE, INSERT, dump_graph
from dsmatch.oracle import enumerate_matches


def test_pure_ring_lattice_degrees():
    g = generate_graph(20, 4, 0.0, alphabet=3, seed=1)
    assert all(g.degree(v) == 4 for v in g.vertices())
    assert g.num_edges == 40


def test_same_seed_byte_identical():
    a = generate_graph(100, 4, 0.3, alphabet=5, label_dist="zipf", seed=9)
    b = generate_graph(100, 4, 0.3, alphabet=5, label_dist="zipf", seed=9)
    assert dump_graph(a) == dump_graph(b)
    c = generate_graph(100, 4, 0.3, alphabet=5, label_dist="zipf", seed=10)
    assert dump_graph(a) != dump_graph(c)


@pytest.mark.parametrize("target", [3.0, 4.0, 5.0, 6.0, 7.0])
def test_average_degree_calibration(target):
    k, p = ring_params_for_avg_degree(target)
    degs = []
    for seed in range(3):
        g = generate_graph(600, k, p, alphabet=5, seed=seed)
        degs.append(2 * g.num_edges / g.num_vertices)
    assert statistics.fmean(degs) == pytest.approx(target, rel=0.10)


def test_generated_graph_is_connected():
    g = generate_graph(150, 2, 0.5, alphabet=4, seed=3)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    assert len(seen) == g.num_vertices


def test_label_distributions_cover_alphabet():
    for dist in ("uniform", "gaussian", "zipf"):
        g = generate_graph(500, 4, 0.2, alphabet=6, label_dist=dist, seed=4)
        labels = set(g.labels.values())
        assert labels <= set(range(6))
    zipf_g = generate_graph(2000, 4, 0.0, alphabet=6, label_dist="zipf", seed=5)
    counts = [0] * 6
    for lbl in zipf_g.labels.values():
        counts[lbl] += 1
    assert counts[0] > counts[5]  # rank-1 label clearly most frequent


def test_generate_graph_param_validation():
    with pytest.raises(InvalidParams):
        generate_graph(10, 3, 0.1, alphabet=3)  # odd k
    with pytest.raises(InvalidParams):
        generate_graph(4, 4, 0.1, alphabet=3)  # n too small
    with pytest.raises(InvalidParams):
        generate_graph(10, 4, 1.5, alphabet=3)
    with pytest.raises(InvalidParams):
        generate_graph(10, 4, 0.1, alphabet=3, label_dist="pareto")


# -- stream splitting -----------------------------------------------------------


def test_split_zero_rates_empty_stream():
    g = generate_graph(50, 4, 0.1, alphabet=3, seed=6)
    g0, stream = split_stream(g, 0.0, 0.0, seed=1)
    assert stream == []
    assert g0.num_edges == g.num_edges


def test_split_insertion_partition_identity():
    g = generate_graph(100, 4, 0.25, alphabet=4, seed=7)
    g0, stream = split_stream(g, 0.1, 0.0, seed=2)
    assert g0.num_edges + len(stream) == g.num_edges
    assert all(op.kind == INSERT for op in stream)
    assert [op.timestamp for op in stream] == list(range(1, len(stream) + 1))


def test_split_insertion_replay_reconstructs():
    g = generate_graph(80, 4, 0.2, alphabet=4, seed=8)
    g0, stream = split_stream(g, 0.15, 0.0, seed=3)
    replay = g0.copy()
    for op in stream:
        replay.apply_update(op)
    assert dump_graph(replay) == dump_graph(g)


def test_split_deletion_mode():
    g = generate_graph(80, 4, 0.2, alphabet=4, seed=9)
    g0, stream = split_stream(g, 0.0, 0.1, seed=4)
    assert g0.num_edges == g.num_edges
    assert all(op.kind == DELETE for op in stream)
    replay = g0.copy()
    for op in stream:
        replay.apply_update(op)
    assert replay.num_edges == g.num_edges - len(stream)


def test_split_rate_validation():
    g = generate_graph(50, 4, 0.1, alphabet=3, seed=10)
    with pytest.raises(InvalidRate):
        split_stream(g, 0.6, 0.0)
    with pytest.raises(InvalidRate):
        split_stream(g, 0.1, 0.1)


# -- query sampling ---------------------------------------------------------------


def test_sample_size_two_is_an_edge():
    g = generate_graph(60, 4, 0.2, alphabet=4, seed=11)
    for q in sample_queries(g, 5, 2, 1.0, seed=5):
        assert len(q.vertex_order) == 2
        assert len(q.edges) == 1


def test_sampled_queries_always_match():
    g = generate_graph(120, 4, 0.25, alphabet=5, seed=12)
    for q in sample_queries(g, 10, 5, 2.5, seed=6):
        assert len(enumerate_matches(g, q)) >= 1


def test_sampled_queries_connected_and_sized():
    g = generate_graph(120, 4, 0.25, alphabet=5, seed=13)
    for size in (3, 4, 6):
        for q in sample_queries(g, 5, size, 2.0, seed=7):
            assert len(q.vertex_order) == size
            assert q.vertex_order == tuple(range(size))
            # QueryGraph construction already validates connectivity


def test_sample_determinism():
    g = generate_graph(100, 4, 0.25, alphabet=5, seed=14)
    a = sample_queries(g, 6, 4, 2.0, seed=8)
    b = sample_queries(g, 6, 4, 2.0, seed=8)
    assert [q.to_text() for q in a] == [q.to_text() for q in b]


def test_bench_config_wiring():
    cfg = BenchConfig(n_vertices=200, alphabet=5, label_dist="zipf",
                      query_count=3, query_size=4, master_seed=42)
    g = cfg.make_graph()
    assert g.num_vertices == 200
    g0, stream = cfg.make_split(g)
    assert len(stream) == round(0.1 * g.num_edges)
    queries = cfg.make_queries(g)
    assert len(queries) == 3
    ecfg = cfg.embedding_config()
    assert ecfg.beta / ecfg.alpha == pytest.approx(1000.0)
    assert ecfg.mode == "zipf"
