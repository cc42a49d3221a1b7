#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "fss/errors.hpp"
#include "fss/sampler.hpp"
#include "../support.hpp"

using namespace fss;
using namespace testsupport;

namespace {

// Hand-built two-leaf tree over the unit square, split at x = 0.5, with the
// leaf masses pinned to the given values.
std::unique_ptr<Node> two_leaf_root(double mass_low, double mass_high) {
  auto root = std::make_unique<Node>(unit_square(), 0);
  root->split_point = Point{0.5, 0.5};
  auto halves = root->rect.split(*root->split_point, 0);
  root->child[0] = std::make_unique<Node>(halves.first, 1);
  root->child[1] = std::make_unique<Node>(halves.second, 1);
  for (auto& c : root->child) {
    c->parent = root.get();
    c->weighted_samples = 1.0;
    c->weighted_free = 1.0;
  }
  root->child[0]->free_mass = mass_low;
  root->child[1]->free_mass = mass_high;
  root->free_mass = mass_low + mass_high;
  root->weighted_samples = 1.0;
  root->weighted_free = 1.0;
  return root;
}

void check_tree_invariants(const Node& v, const Environment& env,
                           std::size_t depth = 1) {
  CHECK(v.weighted_free <= v.weighted_samples);
  if (depth > 1 && v.rect.measure() > 0.0) {
    CHECK(v.weighted_free > 0.0);  // positive inherited weight
  }
  if (v.leaf()) return;
  const double child_sum = v.child[0]->free_mass + v.child[1]->free_mass;
  CHECK(std::abs(v.free_mass - child_sum) <=
        1e-9 * std::max(1.0, v.free_mass));
  // children come from splitting at the stored point, axes cycling
  REQUIRE(v.split_point.has_value());
  const auto halves = v.rect.split(*v.split_point, v.split_axis);
  CHECK(v.child[0]->rect == halves.first);
  CHECK(v.child[1]->rect == halves.second);
  for (const auto& c : v.child) {
    CHECK(c->split_axis == (v.split_axis + 1) % env.dimension());
    CHECK(c->parent == &v);
  }
  check_tree_invariants(*v.child[0], env, depth + 1);
  check_tree_invariants(*v.child[1], env, depth + 1);
}

}  // namespace

TEST_CASE("a fresh tree is one optimistic leaf over the domain") {
  SamplerTree t(empty_world(), 1);
  CHECK(t.root().leaf());
  CHECK(t.root().weighted_samples == 0.0);
  CHECK(t.root().weighted_free == 0.0);
  CHECK(t.root().split_axis == 0);
  CHECK(t.root().free_mass == 1.0);
  CHECK(t.stats().leaf_count == 1);
  CHECK(t.stats().nodes_per_depth[1] == 1);

  SamplerTree wide(Environment(HyperRect({0.0, 0.0}, {2.0, 3.0}), {}), 1);
  CHECK(wide.root().free_mass == 6.0);
}

TEST_CASE("first free draw splits the root and inherits weighted counts") {
  SamplerTree t(empty_world(), 42);
  const SampleRecord rec = t.generate();
  CHECK(rec.free);
  CHECK(rec.draw_index == 0);
  CHECK(rec.leaf_depth == 1);

  const Node& r = t.root();
  REQUIRE_FALSE(r.leaf());
  CHECK(r.weighted_samples == 1.0);
  CHECK(r.weighted_free == 1.0);
  REQUIRE(r.split_point.has_value());
  CHECK(*r.split_point == rec.point);
  for (const auto& c : r.child) {
    // one free draw inherited: ratio is 1, so mass equals the child volume
    CHECK(c->free_mass == doctest::Approx(c->rect.measure()).epsilon(1e-15));
    CHECK(c->weighted_samples == doctest::Approx(c->rect.measure()));
    CHECK(c->weighted_free == c->weighted_samples);
    CHECK(c->split_axis == 1);
    CHECK(c->parent == &r);
  }
  CHECK(r.free_mass == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("a fully blocked world never splits and zeroes the root mass") {
  SamplerTree t(blocked_world(), 9);
  for (int i = 0; i < 100; ++i) {
    const SampleRecord rec = t.generate();
    CHECK_FALSE(rec.free);
  }
  CHECK(t.root().leaf());
  CHECK(t.root().weighted_samples == 100.0);
  CHECK(t.root().weighted_free == 0.0);
  CHECK(t.root().free_mass == 0.0);
}

TEST_CASE("every free draw splits exactly one leaf in an empty world") {
  SamplerTree t(empty_world(), 5);
  for (int i = 0; i < 1000; ++i) t.generate();
  const TreeStats s = t.stats();
  CHECK(s.leaf_count == 1001);
  CHECK(s.node_count - s.leaf_count == 1000);  // binary tree identity
  CHECK(t.env().query_count() == 1000);
}

TEST_CASE("identical seeds give identical trees and records") {
  SamplerTree a(quarter_world(), 77);
  SamplerTree b(quarter_world(), 77);
  for (int i = 0; i < 500; ++i) {
    const SampleRecord ra = a.generate();
    const SampleRecord rb = b.generate();
    CHECK(ra.point == rb.point);
    CHECK(ra.free == rb.free);
    CHECK(ra.leaf_depth == rb.leaf_depth);
    CHECK(ra.draw_index == rb.draw_index);
  }
  CHECK(a.snapshot() == b.snapshot());

  SamplerTree c(quarter_world(), 78);
  c.generate();
  CHECK(c.snapshot() != b.snapshot());
}

TEST_CASE("tree invariants hold across worlds, seeds, and dimensions") {
  const Environment cube_world(
      HyperRect({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}),
      {AabbObstacle{HyperRect({0.2, 0.2, 0.2}, {0.6, 0.6, 0.6})}});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int world = 0; world < 4; ++world) {
      Environment env = world == 0   ? empty_world()
                        : world == 1 ? quarter_world()
                        : world == 2 ? random_box_world(seed * 13 + 1, 4)
                                     : cube_world;
      SamplerTree t(env, seed);
      for (int i = 0; i < 2000; ++i) t.generate();
      check_tree_invariants(t.root(), t.env());

      // root mass equals the sum over leaves
      const TreeStats s = t.stats();
      CHECK(std::abs(t.root().free_mass - s.total_leaf_mass) <=
            1e-9 * std::max(1.0, t.root().free_mass));

      // leaf boxes partition the domain
      double leaf_measure = 0.0;
      for (const Node* leaf : t.leaves()) leaf_measure += leaf->rect.measure();
      CHECK(std::abs(leaf_measure - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("every record's point lies in its leaf box") {
  SamplerTree t(quarter_world(), 31);
  for (int i = 0; i < 2000; ++i) {
    const SampleRecord rec = t.generate();
    CHECK(rec.leaf != nullptr);
    CHECK(rec.leaf->rect.contains(rec.point));
  }
}

TEST_CASE("leaf mass inside a blocked region never rises on hits there") {
  // The central quarter is solid obstacle; watch the total mass of leaves
  // fully inside it across every draw that lands there.
  SamplerTree t(quarter_world(), 15);
  const HyperRect blocked({0.25, 0.25}, {0.75, 0.75});
  double last_inside_mass = -1.0;
  for (int i = 0; i < 20'000; ++i) {
    const SampleRecord rec = t.generate();
    if (!blocked.contains(rec.point)) continue;
    double inside = 0.0;
    for (const Node* leaf : t.leaves()) {
      const auto cut = intersect(leaf->rect, blocked);
      if (cut && cut->measure() == leaf->rect.measure()) {
        inside += leaf->free_mass;
      }
    }
    if (last_inside_mass >= 0.0) {
      CHECK(inside <= last_inside_mass * (1.0 + 1e-12) + 1e-15);
    }
    last_inside_mass = inside;
  }
  CHECK(last_inside_mass >= 0.0);
}

TEST_CASE("descend_probability follows mass shares") {
  const auto root = two_leaf_root(0.3, 0.1);
  CHECK(descend_probability(*root, *root) == doctest::Approx(1.0));
  CHECK(descend_probability(*root, *root->child[0]) == doctest::Approx(0.75));
  CHECK(descend_probability(*root, *root->child[1]) == doctest::Approx(0.25));

  const auto zero = two_leaf_root(0.4, 0.0);
  CHECK(descend_probability(*zero, *zero->child[1]) == 0.0);

  const auto dead = two_leaf_root(0.0, 0.0);
  CHECK_THROWS_AS(descend_probability(*dead, *dead->child[0]), ZeroTotalMass);
}

TEST_CASE("descend frequencies match the mass shares") {
  const auto root = two_leaf_root(0.3, 0.1);
  RandomStream rng(808);
  int low = 0;
  const int trials = 100'000;
  for (int i = 0; i < trials; ++i) {
    if (&descend(*root, rng) == root->child[0].get()) ++low;
  }
  // binomial 3 sigma at p = 0.75 is ~0.004; padded
  CHECK(std::abs(low / double(trials) - 0.75) < 0.01);
}

TEST_CASE("descend never selects a massless leaf") {
  for (int side = 0; side < 2; ++side) {
    const auto root = two_leaf_root(side == 0 ? 0.0 : 0.4,
                                    side == 0 ? 0.4 : 0.0);
    RandomStream rng(13 + side);
    for (int i = 0; i < 100'000; ++i) {
      CHECK(&descend(*root, rng) == root->child[1 - side].get());
    }
  }
}

TEST_CASE("descend on a single leaf returns it; zero mass throws") {
  SamplerTree t(empty_world(), 4);
  RandomStream rng(1);
  CHECK(&t.descend_only(rng) == &t.root());

  SamplerTree dead(blocked_world(), 4);
  dead.generate();
  CHECK_THROWS_AS(dead.descend_only(rng), ZeroTotalMass);
}

TEST_CASE("descend_only mutates nothing") {
  SamplerTree t(quarter_world(), 91);
  for (int i = 0; i < 200; ++i) t.generate();
  const std::string before = t.snapshot();
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) t.descend_only(rng);
  CHECK(t.snapshot() == before);
  CHECK(t.draws() == 200);
}

TEST_CASE("split guard: thin boxes stop splitting but keep counting") {
  SamplerTree t(empty_world(), 6);
  CHECK(t.splittable(unit_square()));
  CHECK(t.splittable(HyperRect({0.0, 0.0}, {1e-11, 1.0})));
  CHECK_FALSE(t.splittable(HyperRect({0.0, 0.0}, {1e-13, 1.0})));
  CHECK_FALSE(t.splittable(HyperRect({0.5, 0.0}, {0.5, 1.0})));  // degenerate
}

TEST_CASE("snapshot lists every node once in preorder") {
  SamplerTree t(quarter_world(), 55);
  for (int i = 0; i < 300; ++i) t.generate();
  const std::string snap = t.snapshot();
  const std::size_t lines =
      static_cast<std::size_t>(std::count(snap.begin(), snap.end(), '\n'));
  CHECK(lines == t.stats().node_count);
  CHECK(snap.substr(0, 2) == "1 ");  // root line first, depth 1
}
