"""Tree growers: exact small-case laws, structural bookkeeping, and
agreement in distribution with the counting chain."""

import numpy as np
import pytest

from treeldp import (
    DEFAULT_SEED,
    ModelSpec,
    RandomizedPASlope,
    batch_pa_buds,
    batch_pa_leaves,
    batch_recursive_leaves,
    batch_stirling_plateaux,
    batch_yule_cherries,
    bud_lln_endpoints,
    grow_pa_graph,
    grow_recursive,
    grow_stirling,
    grow_yule,
    model_from_name,
    tv_against_chain,
    verify_clt,
)

GAMMA_HALF = {1: 0.5, 2: 0.5}


# ------------------------------------------------------------ small cases


def test_forced_small_trees():
    # a cherry is forced with 2 or 3 leaves
    assert grow_yule(2).statistic == 1
    assert grow_yule(3).statistic == 1
    assert grow_yule(1).statistic == 0
    # the identity permutation 11 has one plateau
    res, extra = grow_stirling(1, return_structure=True)
    assert res.statistic == 1
    assert extra["code"] == (1, 1)
    # the seed graph is a single edge: both endpoints are leaves
    assert grow_pa_graph(0.0, 2).statistic == 2
    # one- and two-vertex recursive trees
    for kind in ("uniform", "plane_oriented"):
        assert grow_recursive(kind, 1).statistic == 1
        assert grow_recursive(kind, 2).statistic == 1


def test_stirling_pair_insertion_law():
    # inserting 22 into 11 gives 2211/1221/1122: plateaux 2 w.p. 2/3, 1 w.p. 1/3
    reps = 30000
    z = batch_stirling_plateaux(2, reps, seed=5)
    freq_one = np.mean(z == 1)
    assert set(np.unique(z)) == {1, 2}
    assert abs(freq_one - 1 / 3) <= 3 * np.sqrt((1 / 3) * (2 / 3) / reps)


def test_grower_labels():
    assert grow_yule(4).model == "yule"
    assert grow_stirling(4).model == "stirling"
    assert grow_recursive("uniform", 4).model == "uniform"
    assert grow_recursive("plane_oriented", 4).model == "plane_oriented"
    assert grow_pa_graph(0.5, 4).model == "pa:beta=0.5"
    bud = grow_pa_graph(0.0, 4, seed=9, multi_edge_pmf=GAMMA_HALF)
    assert bud.model == "rpa:beta=0,gamma=1@0.5+2@0.5,seed=9"
    assert bud.n == 4 and bud.seed == 9


def test_grower_validation():
    with pytest.raises(ValueError):
        grow_pa_graph(-1.5, 5)
    with pytest.raises(ValueError):
        grow_recursive("binary", 5)
    with pytest.raises(ValueError):
        grow_stirling(0)
    with pytest.raises(ValueError):
        grow_yule(0)


# ------------------------------------------------------- structure recounts


def test_pa_structure_recount():
    res, extra = grow_pa_graph(1.0, 40, seed=17, return_structure=True)
    degrees, edges = extra["degrees"], extra["edges"]
    assert len(edges) == 40  # one seed edge plus one per arrival
    recount = np.zeros_like(degrees)
    for a, b, g in edges:
        recount[a] += g
        recount[b] += g
    np.testing.assert_array_equal(recount, degrees)
    assert degrees.sum() == 2 * 40
    assert res.statistic == int(np.sum(degrees == 1))


def test_bud_structure_recount():
    res, extra = grow_pa_graph(0.0, 30, seed=23, multi_edge_pmf=GAMMA_HALF, return_structure=True)
    degrees, edges, is_bud = extra["degrees"], extra["edges"], extra["is_bud"]
    recount = np.zeros_like(degrees)
    neighbors = [set() for _ in range(len(degrees))]
    for a, b, g in edges:
        recount[a] += g
        recount[b] += g
        neighbors[a].add(b)
        neighbors[b].add(a)
    np.testing.assert_array_equal(recount, degrees)
    # a bud is exactly a vertex with a single distinct neighbor
    np.testing.assert_array_equal(is_bud, np.array([len(s) == 1 for s in neighbors]))
    assert res.statistic == int(is_bud.sum())


def test_recursive_structure_recount():
    res, extra = grow_recursive("plane_oriented", 50, seed=31, return_structure=True)
    parents, nchildren = extra["parents"], extra["nchildren"]
    assert parents[0] == -1
    assert np.all(parents[1:] < np.arange(1, 50))
    np.testing.assert_array_equal(np.bincount(parents[1:], minlength=50), nchildren)
    assert res.statistic == int(np.sum(nchildren == 0))


def test_yule_structure_recount():
    res, extra = grow_yule(30, seed=41, return_structure=True)
    children, leaves = extra["children"], extra["leaves"]
    assert len(leaves) == 30
    leafset = set(leaves)
    assert not (leafset & children.keys())  # internal nodes are not leaves
    cherries = sum(1 for a, b in children.values() if a in leafset and b in leafset)
    assert res.statistic == cherries


def test_statistic_stays_in_chain_support():
    for name, run in [
        ("yule", lambda s: grow_yule(12, seed=s)),
        ("uniform", lambda s: grow_recursive("uniform", 12, seed=s)),
        ("plane_oriented", lambda s: grow_recursive("plane_oriented", 12, seed=s)),
        ("pa:beta=0", lambda s: grow_pa_graph(0.0, 12, seed=s)),
        ("plane_oriented", lambda s: grow_stirling(11, seed=s)),  # step 12
    ]:
        k0 = model_from_name(name).k0
        for s in range(20):
            stat = run(s).statistic
            assert k0 <= stat <= k0 + 11, (name, s, stat)


# ----------------------------------------------------------------- batches


def test_batch_determinism_and_seed_sensitivity():
    a = batch_pa_leaves(0.0, 30, 100, seed=5)
    b = batch_pa_leaves(0.0, 30, 100, seed=5)
    c = batch_pa_leaves(0.0, 30, 100, seed=6)
    np.testing.assert_array_equal(a, b)
    assert np.any(a != c)


def test_batch_forced_values():
    assert np.all(batch_pa_leaves(0.0, 2, 50) == 2)
    assert np.all(batch_yule_cherries(3, 50) == 1)
    assert np.all(batch_recursive_leaves("uniform", 2, 50) == 1)


def test_batch_record_all_shapes_and_increments():
    out = batch_recursive_leaves("plane_oriented", 25, 40, seed=2, record_all=True)
    assert out.shape == (40, 25)
    assert np.all(out[:, 0] == 1)
    steps = np.diff(out, axis=1)
    assert np.all((steps == 0) | (steps == 1))
    # final column equals the plain run with the same seed
    np.testing.assert_array_equal(out[:, -1], batch_recursive_leaves("plane_oriented", 25, 40, seed=2))


def test_batch_stirling_record_all_matches_final():
    out = batch_stirling_plateaux(9, 200, seed=3, record_all=True)
    np.testing.assert_array_equal(out[:, -1], batch_stirling_plateaux(9, 200, seed=3))
    assert np.all(out[:, 0] == 1)


# ------------------------------------------------- distributional agreement


def test_batch_growers_match_chain_distribution():
    reps = 20000
    cases = [
        (batch_recursive_leaves("uniform", 8, reps, seed=11), "uniform", 8),
        (batch_pa_leaves(1.0, 6, reps, seed=13), "pa:beta=1", 6),
        (batch_yule_cherries(8, reps, seed=15), "yule", 8),
    ]
    for stats, preset, n in cases:
        tv = tv_against_chain(stats.reshape(-1, 1), model_from_name(preset), [n])
        assert tv[0] <= 0.02, (preset, tv)


def test_stirling_plateaux_match_plane_chain():
    # labels 1..7 (length-14 permutation) correspond to chain step 8
    reps = 100000
    stats = batch_stirling_plateaux(7, reps, seed=21)
    tv = tv_against_chain(stats.reshape(-1, 1), model_from_name("plane_oriented"), [8])
    assert tv[0] <= 0.01


def test_bud_batch_matches_quenched_chain():
    reps = 30000
    stats = batch_pa_buds(0.0, GAMMA_HALF, 8, reps, seed=99, env_seed=13)
    model = model_from_name("rpa:beta=0,gamma=1@0.5+2@0.5,seed=13")
    tv = tv_against_chain(stats.reshape(-1, 1), model, [8])
    assert tv[0] <= 0.02


def test_degenerate_buds_reduce_to_plain_pa():
    reps = 30000
    stats = batch_pa_buds(0.0, {1: 1.0}, 8, reps, seed=7)
    tv = tv_against_chain(stats.reshape(-1, 1), model_from_name("pa:beta=0"), [8])
    assert tv[0] <= 0.02


def test_tv_harness_on_synthetic_columns():
    model = model_from_name("uniform")
    # Z_3 is 1 or 2 with probability 1/2 each: a perfectly split sample has TV 0
    stats = np.array([[1], [2], [1], [2]])
    assert tv_against_chain(stats, model, [3])[0] == pytest.approx(0.0, abs=1e-15)
    # mass entirely outside the support counts as distance 1
    stats = np.array([[99], [99]])
    assert tv_against_chain(stats, model, [3])[0] == pytest.approx(1.0, abs=1e-15)


def test_bud_lln_quick():
    z = bud_lln_endpoints(0.0, GAMMA_HALF, 2000, 300, seed=3)
    assert abs(float(np.mean(z)) / 2000 - 0.75) <= 0.01


# ------------------------------------------------------------ CLT harness


def test_verify_clt_degenerate():
    rep = verify_clt(model_from_name("plane_oriented"), 1, 50)
    assert rep.empirical_var == 0.0
    assert rep.ks_distance == 1.0


def test_verify_clt_plane():
    rep = verify_clt(model_from_name("plane_oriented"), 3000, 2000, seed=8)
    assert rep.replicates == 2000
    assert abs(rep.empirical_mean - 2 / 3) <= 0.01
    assert abs(rep.empirical_var - 1 / 9) <= 0.25 / 9
    assert rep.ks_distance < 0.05
    assert rep.clt_stat_sample.shape == (2000,)
