"""Smoke tests for the python module (built by CMake; see tests/CMakeLists.txt)."""

import math

import pytest

import fss

EMPTY_WORLD = """
{ "dimension": 2, "domain": {"min": [0, 0], "max": [1, 1]}, "obstacles": [] }
"""

QUARTER_WORLD = """
{ "dimension": 2, "domain": {"min": [0, 0], "max": [1, 1]},
  "obstacles": [ {"type": "aabb", "min": [0.25, 0.25], "max": [0.75, 0.75]} ] }
"""

BLOCKED_WORLD = """
{ "dimension": 2, "domain": {"min": [0, 0], "max": [1, 1]},
  "obstacles": [ {"type": "aabb", "min": [0, 0], "max": [1, 1]} ] }
"""


def test_environment_round_trip():
    env = fss.Environment.from_json(QUARTER_WORLD)
    assert env.dimension == 2
    assert env.domain.measure() == 1.0
    again = fss.Environment.from_json(env.to_json())
    assert again.to_json() == env.to_json()


def test_environment_rejects_unknown_fields():
    with pytest.raises(fss.EnvironmentParseError):
        fss.Environment.from_json('{"dimension": 2, "oops": 1}')


def test_collision_and_measure():
    env = fss.Environment.from_json(QUARTER_WORLD)
    assert not env.collision_free([0.5, 0.5])
    assert env.collision_free([0.1, 0.1])
    assert env.query_count == 2
    cell = fss.HyperRect([0.0, 0.0], [1.0, 1.0])
    assert env.free_measure_exact(cell) == pytest.approx(0.75)
    mc = env.free_measure_mc(cell, 20000, seed=1)
    assert abs(mc.value - 0.75) <= 4 * mc.std_error


def test_tree_growth_and_invariants():
    env = fss.Environment.from_json(EMPTY_WORLD)
    tree = fss.SamplerTree(env, seed=7)
    records = tree.generate_many(500)
    assert all(r.free for r in records)
    assert [r.draw_index for r in records] == list(range(500))
    stats = tree.stats()
    assert stats.leaf_count == 501  # every free draw splits one leaf
    assert stats.node_count == 2 * 500 + 1
    assert stats.total_leaf_mass == pytest.approx(1.0, abs=1e-9)
    for leaf in tree.leaves():
        assert leaf.weighted_free <= leaf.weighted_samples


def test_determinism():
    a = fss.SamplerTree(fss.Environment.from_json(QUARTER_WORLD), seed=42)
    b = fss.SamplerTree(fss.Environment.from_json(QUARTER_WORLD), seed=42)
    for _ in range(300):
        ra, rb = a.generate(), b.generate()
        assert ra.point == rb.point
        assert ra.free == rb.free
    assert a.snapshot() == b.snapshot()


def test_rejection_budget():
    blocked = fss.Environment.from_json(BLOCKED_WORLD)
    sampler = fss.RejectionSampler(blocked, seed=1, max_attempts=100)
    with pytest.raises(fss.BudgetExhausted):
        sampler.sample()


def test_histogram_and_convergence():
    env = fss.Environment.from_json(QUARTER_WORLD)
    grid = fss.HistogramGrid.with_exact_measure(env, 16)
    assert grid.free_total == pytest.approx(0.75)

    tree = fss.SamplerTree(env, seed=3)
    report = fss.run_convergence(tree, [2000, 20000], grid_resolution=32)
    assert report.tree_run and report.exact_oracle
    assert report.obstacle_mass_increases == 0
    first, last = report.snapshots
    assert last.tv < first.tv
    assert last.free_mass == pytest.approx(0.75, rel=0.1)
    assert "n,tv,chi2" in report.to_csv()


def test_classification():
    env = fss.Environment.from_json(QUARTER_WORLD)
    assert fss.classify_rect(env, fss.HyperRect([0.3, 0.3], [0.4, 0.4])) \
        == fss.NodeClass.Obstacle
    assert fss.classify_rect(env, fss.HyperRect([0.0, 0.0], [0.2, 0.2])) \
        == fss.NodeClass.Free
    assert fss.classify_rect(env, fss.HyperRect([0.2, 0.2], [0.3, 0.3])) \
        == fss.NodeClass.Mixed


def test_uniform_sampler_accept_rate():
    env = fss.Environment.from_json(QUARTER_WORLD)
    sampler = fss.UniformSampler(env, seed=11)
    free = sum(sampler.sample().free for _ in range(20000))
    assert free / 20000 == pytest.approx(0.75, abs=0.02)
