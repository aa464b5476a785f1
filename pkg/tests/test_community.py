import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from labelspace.community import (
    ALGORITHMS,
    ConvergenceError,
    DetectorConfig,
    detect,
    fast_greedy,
    infomap,
    label_propagation,
    leading_eigenpair,
    leading_eigenvector,
    map_equation,
    modularity,
    walktrap,
)
from labelspace.community import eigenvector
from labelspace.label_graph import LabelGraph
from labelspace.partition import Partition
from oracles import (
    best_modularity,
    canonical,
    map_equation_bruteforce,
    modularity_bruteforce,
    set_partitions,
    two_cliques_with_bridge,
)

TRIANGLE = LabelGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
TWO_TRIANGLES = LabelGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
K4 = LabelGraph.from_edges(4, itertools.combinations(range(4), 2))


def _two_five_cliques():
    edges, planted = two_cliques_with_bridge(5)
    return LabelGraph.from_edges(10, edges), planted


@st.composite
def graphs(draw, max_n=7, weighted=True):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    weights = [draw(st.integers(1, 4)) if weighted else 1 for _ in chosen]
    return LabelGraph.from_edges(n, [(i, j, w) for (i, j), w in zip(chosen, weights)])


def _random_partition(draw, n):
    return Partition.from_membership(draw(st.lists(st.integers(0, 3), min_size=n, max_size=n)))


# --- quality functions -------------------------------------------------------

def test_modularity_examples():
    assert modularity(TRIANGLE, Partition.whole(3)) == pytest.approx(0.0, abs=1e-12)
    assert modularity(TWO_TRIANGLES, Partition(((0, 1, 2), (3, 4, 5)))) == pytest.approx(0.5, abs=1e-12)
    assert modularity(TRIANGLE, Partition.singletons(3)) == pytest.approx(-1 / 3, abs=1e-12)
    assert modularity(LabelGraph(4, {}), Partition.singletons(4)) == 0.0


def test_modularity_rejects_wrong_cover():
    with pytest.raises(ValueError):
        modularity(TRIANGLE, Partition.singletons(4))


@settings(max_examples=150)
@given(st.data())
def test_modularity_matches_definition(data):
    g = data.draw(graphs())
    p = _random_partition(data.draw, g.vertex_count)
    q = modularity(g, p)
    assert q == pytest.approx(modularity_bruteforce(g.adjacency(), p.blocks), abs=1e-12)
    assert -1.0 <= q < 1.0


def test_map_equation_examples():
    assert map_equation(TRIANGLE, Partition.whole(3)) == pytest.approx(math.log2(3), abs=1e-12)
    assert map_equation(TWO_TRIANGLES, Partition.whole(6)) == pytest.approx(math.log2(6), abs=1e-12)
    split = Partition(((0, 1, 2), (3, 4, 5)))
    assert map_equation(TWO_TRIANGLES, split) == pytest.approx(math.log2(3), abs=1e-12)
    with pytest.raises(ValueError):
        map_equation(LabelGraph(3, {}), Partition.whole(3))


@settings(max_examples=150)
@given(st.data())
def test_map_equation_matches_entropy_form(data):
    g = data.draw(graphs())
    if not g.edges:
        return
    p = _random_partition(data.draw, g.vertex_count)
    assert map_equation(g, p) == pytest.approx(map_equation_bruteforce(g.adjacency(), p.blocks), abs=1e-9)


@settings(max_examples=80)
@given(graphs())
def test_single_module_codelength_is_visit_entropy(g):
    if not g.edges:
        return
    p = g.strengths() / (2 * g.total_weight)
    entropy = -sum(x * math.log2(x) for x in p if x > 0)
    assert map_equation(g, Partition.whole(g.vertex_count)) == pytest.approx(entropy, abs=1e-12)


# --- detector examples --------------------------------------------------------

@pytest.mark.parametrize("detector", [fast_greedy, leading_eigenvector])
def test_spectral_and_greedy_examples(detector):
    g, planted = _two_five_cliques()
    assert detector(g).blocks == planted
    assert detector(K4).blocks == ((0, 1, 2, 3),)


def test_two_five_cliques_is_the_modularity_optimum():
    g, planted = _two_five_cliques()
    adj = g.adjacency()
    best = max(set_partitions(10, 3), key=lambda p: modularity_bruteforce(adj, p))
    assert canonical(best) == planted


def test_fast_greedy_edgeless():
    assert fast_greedy(LabelGraph(4, {})) == Partition.singletons(4)


def test_k4_has_no_better_partition():
    assert best_modularity(K4.adjacency()) == pytest.approx(0.0, abs=1e-12)


def test_leading_eigenvector_single_vertex():
    assert leading_eigenvector(LabelGraph(1, {})).blocks == ((0,),)


def test_leading_eigenpair_against_numpy():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.normal(size=(6, 6))
        m = a + a.T
        lam, vec = leading_eigenpair(m, rng.normal(size=6), tol=1e-12, max_iter=200000)
        w, v = np.linalg.eigh(m)
        assert lam == pytest.approx(w[-1], abs=1e-8)
        assert abs(vec @ v[:, -1]) == pytest.approx(1.0, abs=1e-6)


def test_leading_eigenpair_reports_residual():
    m = np.diag([1.0, 0.999999, -3.0])
    with pytest.raises(ConvergenceError) as info:
        leading_eigenpair(m, np.ones(3), tol=1e-14, max_iter=3)
    assert info.value.residual > 0


@pytest.mark.parametrize("solver", ["lapack", "power"])
def test_leading_eigenvector_zero_top_eigenvalue(solver):
    # a subgroup whose only non-negative eigenvalue belongs to the constant vector,
    # next one at -0.016: undeflated power iteration crawls past the iteration cap
    g = LabelGraph(8, {(0, 2): 1, (0, 4): 2, (0, 1): 4, (1, 2): 2, (2, 3): 4, (0, 5): 4, (0, 6): 4}, weighted=True)
    p = leading_eigenvector(g, DetectorConfig("leading_eigenvector", use_weights=True, eigen_solver=solver))
    assert p.blocks == canonical(p.blocks)
    assert sorted(v for b in p.blocks for v in b) == list(range(8))


def test_leading_eigenvector_near_degenerate_top_pair():
    # top eigenvalues 0.80194 and 0.80497: the shifted power iteration needs ~35k steps
    rng = np.random.default_rng(12345)
    pairs = list(itertools.combinations(range(8), 2))
    for _ in range(150):
        edges = [e for e in pairs if rng.random() < 0.7]
    g = LabelGraph.from_edges(8, edges)
    assert leading_eigenvector(g).n == 8
    with pytest.raises(ConvergenceError) as info:
        leading_eigenvector(g, DetectorConfig("leading_eigenvector", eigen_solver="power"))
    assert info.value.residual > 0


def test_leading_eigenvector_sign_tie_in_magnitude():
    # leading eigenvector (0.5, 0, 0.5, -0.5, 0, 0, -0.5): the sign pin must not
    # depend on which of the tied +-0.5 entries rounding makes larger
    g = LabelGraph(8, {(0, 3): 2, (1, 5): 1, (3, 5): 1, (3, 6): 2, (4, 5): 3, (4, 6): 3, (4, 7): 1}, weighted=True)
    results = {leading_eigenvector(g, DetectorConfig("leading_eigenvector", False, rng_seed=s, eigen_solver=solver)).blocks
               for s in range(5) for solver in ("lapack", "power")}
    assert len(results) == 1


def test_walktrap_distance_ties_are_scale_free():
    # two Ward distances tie exactly; rounding under weight scaling must not pick the merge
    edges = {(0, 2): 1, (0, 1): 3, (2, 3): 4}
    cuts = {walktrap(LabelGraph(4, {e: w * f for e, w in edges.items()}, weighted=True)).blocks for f in range(1, 8)}
    assert len(cuts) == 1


def test_leading_eigenpair_deflation():
    m = np.diag([3.0, 1.0, -2.0])
    lam, vec = leading_eigenpair(m, np.ones(3), deflate=np.array([1.0, 0.0, 0.0]))
    assert lam == pytest.approx(1.0, abs=1e-9)
    assert abs(vec[1]) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_label_propagation_two_triangles(seed):
    p = label_propagation(TWO_TRIANGLES, DetectorConfig("label_propagation", rng_seed=seed))
    assert p.blocks == ((0, 1, 2), (3, 4, 5))


def test_label_propagation_single_vertex_and_cap():
    assert label_propagation(LabelGraph(1, {})).blocks == ((0,),)
    with pytest.raises(ValueError):
        DetectorConfig("label_propagation", propagation_max_sweeps=0)


def test_label_propagation_five_cliques_over_seeds():
    g, planted = _two_five_cliques()
    hits = sum(
        label_propagation(g, DetectorConfig("label_propagation", rng_seed=s)).blocks == planted
        for s in range(100)
    )
    assert hits >= 95


def test_walktrap_examples():
    assert walktrap(TWO_TRIANGLES).blocks == ((0, 1, 2), (3, 4, 5))
    assert walktrap(LabelGraph.from_edges(2, [(0, 1)])).blocks == ((0, 1),)
    assert walktrap(LabelGraph(3, {})) == Partition.singletons(3)


def test_infomap_examples():
    assert infomap(TWO_TRIANGLES).blocks == ((0, 1, 2), (3, 4, 5))
    assert infomap(TRIANGLE).blocks == ((0, 1, 2),)
    assert infomap(LabelGraph.from_edges(3, [(0, 1)])).blocks == ((0, 1), (2,))


def test_triangle_single_module_is_codelength_optimal():
    lengths = {canonical(p): map_equation(TRIANGLE, Partition(tuple(map(tuple, p)))) for p in set_partitions(3)}
    assert min(lengths, key=lengths.get) == ((0, 1, 2),)


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig("louvain")
    with pytest.raises(ValueError):
        DetectorConfig(walktrap_steps=0)
    with pytest.raises(ValueError):
        DetectorConfig(infomap_trials=0)


# --- properties over all detectors -------------------------------------------

def _configs(seed=0):
    return [DetectorConfig(a, use_weights=w, rng_seed=seed, infomap_trials=3)
            for a in ALGORITHMS for w in (True, False)]


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=8), st.integers(0, 2**16))
def test_detectors_return_valid_covers(g, seed):
    strengths = g.strengths()
    for cfg in _configs(seed):
        p = detect(g, cfg)
        assert p.n == g.vertex_count
        for b in p.blocks:
            if any(strengths[v] == 0 for v in b):
                assert len(b) == 1  # isolated vertices are singletons


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8), st.booleans(), st.integers(0, 2**16))
def test_leading_eigenvector_solvers_agree(g, weighted, seed):
    """Power iteration and LAPACK agree whenever every leading eigenvector is unique."""
    gaps = []

    def record(bg, start, config):
        w = np.linalg.eigvalsh(bg)
        if len(w) > 1 and w[-1] > 1e-8:
            gaps.append(w[-1] - w[-2])
        return solve(bg, start, config)

    solve = eigenvector._leading
    eigenvector._leading = record
    try:
        dense = leading_eigenvector(g, DetectorConfig("leading_eigenvector", weighted, rng_seed=seed))
    finally:
        eigenvector._leading = solve
    assume(all(gap > 1e-6 for gap in gaps))
    try:
        power = leading_eigenvector(g, DetectorConfig("leading_eigenvector", weighted, rng_seed=seed, eigen_solver="power"))
    except ConvergenceError:
        assume(False)
    assert power.blocks == dense.blocks


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=8), st.integers(1, 5))
def test_weight_scaling_leaves_partition_unchanged(g, factor):
    scaled = g.scaled(factor)
    for cfg in _configs():
        assert detect(g, cfg) == detect(scaled, cfg), cfg.algorithm


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=8), st.lists(st.sampled_from([0.1, 0.3, 0.7, 1.1]), min_size=28, max_size=28),
       st.sampled_from([0.3, 1.7, 1e3]))
def test_fractional_weight_scaling_leaves_partition_unchanged(g, weights, factor):
    frac = LabelGraph(g.vertex_count, {e: w for e, w in zip(sorted(g.edges), weights)}, weighted=True)
    scaled = LabelGraph(g.vertex_count, {e: w * factor for e, w in frac.edges.items()}, weighted=True)
    for cfg in _configs():
        assert detect(frac, cfg) == detect(scaled, cfg), cfg.algorithm


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8))
def test_fast_greedy_beats_singletons(g):
    assert modularity(g, fast_greedy(g)) >= modularity(g, Partition.singletons(g.vertex_count)) - 1e-12


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=5), graphs(max_n=5), st.integers(0, 100))
def test_infomap_never_merges_components(a, b, seed):
    shift = a.vertex_count
    g = LabelGraph.from_edges(
        a.vertex_count + b.vertex_count,
        [(i, j, w) for (i, j), w in a.edges.items()] + [(i + shift, j + shift, w) for (i, j), w in b.edges.items()],
    )
    p = infomap(g, DetectorConfig("infomap", rng_seed=seed, infomap_trials=3))
    for block in p.blocks:
        assert all(v < shift for v in block) or all(v >= shift for v in block)


def test_detectors_are_deterministic():
    rng = np.random.default_rng(11)
    edges, _ = two_cliques_with_bridge(6, rng)
    g = LabelGraph.from_edges(12, edges)
    for cfg in _configs(seed=5):
        assert detect(g, cfg) == detect(g, cfg)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_planted_partition_sample(algorithm):
    rng = np.random.default_rng(2024)
    hits = 0
    for seed in range(20):
        edges, planted = two_cliques_with_bridge(6, rng)
        p = detect(LabelGraph.from_edges(12, edges), DetectorConfig(algorithm, rng_seed=seed))
        hits += p.blocks == planted
    assert hits >= 19


def test_partition_text_round_trip():
    p = Partition(((4, 1), (0, 3), (2,)))
    assert p.to_text() == "0: 0,3\n1: 1,4\n2: 2\n"
    assert Partition.from_text(p.to_text()) == p
