#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fss/environment.hpp"
#include "fss/geometry.hpp"
#include "fss/rng.hpp"

namespace fss {

// A node of the space-partition tree. Each node owns an axis-aligned box of
// the domain; the leaf boxes partition it. A leaf accumulates draw counts,
// and when a draw is collision-free the leaf splits at that point, handing
// each child a volume-weighted share of its counts. free_mass is the node's
// running estimate of how much free space its box holds: for a leaf,
// free_ratio(weighted_free, weighted_samples) * volume; for an internal
// node, the sum over its children. Descent is biased by free_mass, so space
// that keeps colliding is visited less and less often.
struct Node {
  HyperRect rect;
  std::size_t split_axis = 0;                    // axis a split of this node uses
  std::optional<Point> split_point;              // set once the node has split
  std::array<std::unique_ptr<Node>, 2> child{};  // both null iff leaf
  Node* parent = nullptr;
  double weighted_samples = 0.0;  // volume-weighted draw count
  double weighted_free = 0.0;     // volume-weighted collision-free draw count
  double free_mass = 0.0;         // estimated free measure of rect

  Node(HyperRect r, std::size_t axis) : rect(std::move(r)), split_axis(axis) {}

  bool leaf() const noexcept { return !child[0] && !child[1]; }

  // 1-based depth (root = 1), walking parent links.
  std::size_t depth() const noexcept;
};

// weighted_free / weighted_samples, optimistically 1 before the first draw.
double free_ratio(double weighted_free, double weighted_samples);

// Sum of free_mass over the leaves under root.
double total_leaf_mass(const Node& root);

// Probability that the next draw descends into v's box: v.free_mass divided
// by the total leaf mass. Throws ZeroTotalMass when the total is zero.
double descend_probability(const Node& root, const Node& v);

// One biased descent from root to a leaf, mutating nothing but rng. At each
// internal node u is uniform on [0, free_mass]; the low child is taken iff
// u <= low child's free_mass. Throws ZeroTotalMass when root carries no mass.
const Node& descend(const Node& root, RandomStream& rng);

void collect_leaves(const Node& root, std::vector<const Node*>& out);

struct SampleRecord {
  Point point;
  bool free = false;
  std::size_t leaf_depth = 0;    // depth of the producing leaf; 0 for non-tree samplers
  std::uint64_t draw_index = 0;  // strictly increasing per sampler
  const Node* leaf = nullptr;    // leaf that produced the point (may have split since)
};

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::vector<std::size_t> nodes_per_depth;  // indexed by 1-based depth
  double total_leaf_mass = 0.0;
};

// The adaptive sampler. Owns its environment, its random stream, and the
// tree; single-owner mutable (generate must not race any other access).
class SamplerTree {
 public:
  // Starts with a single optimistic leaf covering the whole domain:
  // weighted counts 0, free_mass = domain measure, split axis 0.
  SamplerTree(Environment env, std::uint64_t seed);

  // Draws one point: descends to a leaf biased by free_mass, samples the
  // leaf box uniformly, collision-checks, splits the leaf at the point when
  // the draw was free (children inherit volume-weighted counts), then
  // refreshes free_mass along the whole path back to the root.
  SampleRecord generate();

  double descend_probability(const Node& v) const;

  // Descent only, no state change; randomness comes from the caller's rng.
  const Node& descend_only(RandomStream& rng) const;

  const Node& root() const noexcept { return *root_; }
  const Environment& env() const noexcept { return env_; }
  Environment& env() noexcept { return env_; }
  std::uint64_t draws() const noexcept { return draws_; }
  std::size_t dimension() const noexcept { return env_.dimension(); }

  // A box is split only while every side is at least 1e-12 of the matching
  // domain side; thinner leaves keep counting draws but stay leaves.
  bool splittable(const HyperRect& r) const;

  std::vector<const Node*> leaves() const;
  TreeStats stats() const;

  // Line-oriented dump, one node per line in deterministic pre-order:
  // depth, lo coords, hi coords, split axis, weighted_samples,
  // weighted_free, free_mass, leaf flag (0/1).
  std::string snapshot() const;

 private:
  Environment env_;
  RandomStream rng_;
  std::unique_ptr<Node> root_;
  std::uint64_t draws_ = 0;
};

}  // namespace fss
