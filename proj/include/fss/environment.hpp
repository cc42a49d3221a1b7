#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fss/geometry.hpp"

namespace fss {

class RandomStream;

struct AabbObstacle {
  HyperRect box;
  bool operator==(const AabbObstacle&) const = default;
};

struct SphereObstacle {
  Point center;
  double radius = 0.0;
  bool operator==(const SphereObstacle&) const = default;
};

using Obstacle = std::variant<AabbObstacle, SphereObstacle>;

// Closed membership test: boundary points collide.
bool obstacle_contains(const Obstacle& o, const Point& x);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// A bounded domain of positive measure plus an obstacle list. Collision
// queries through collision_free() are counted; the oracle entry points
// below are not, so efficiency numbers reflect only sampler-issued checks.
// Single-owner: share one Environment with at most one sampler at a time.
class Environment {
 public:
  Environment(HyperRect domain, std::vector<Obstacle> obstacles);

  std::size_t dimension() const noexcept { return domain_.dim(); }
  const HyperRect& domain() const noexcept { return domain_; }
  const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
  bool has_spheres() const noexcept;

  // True iff x avoids every (closed) obstacle. Throws OutOfDomain when x is
  // outside the domain. Adds exactly one to query_count() per call.
  bool collision_free(const Point& x);
  std::uint64_t query_count() const noexcept { return query_count_; }

  // Uncounted membership test for oracles and estimators.
  bool collision_free_uncounted(const Point& x) const;

  // Exact measure of cell ∩ free space for box-only worlds, by
  // inclusion-exclusion over the clipped obstacle boxes. Throws
  // UnsupportedGeometry when any sphere is present.
  double free_measure_exact(const HyperRect& cell) const;

  // Exact measure of cell ∩ obstacle union (box-only worlds).
  double obstacle_measure_exact(const HyperRect& cell) const;

  // Unbiased Monte Carlo estimate of the free measure of cell, with binomial
  // standard error. Does not touch query_count().
  McEstimate free_measure_mc(const HyperRect& cell, std::size_t samples,
                             RandomStream& rng) const;

  bool operator==(const Environment& other) const {
    return domain_ == other.domain_ && obstacles_ == other.obstacles_;
  }

 private:
  HyperRect domain_;
  std::vector<Obstacle> obstacles_;
  std::uint64_t query_count_ = 0;
};

// JSON environment files, UTF-8:
//   { "dimension": 2, "domain": {"min": [0,0], "max": [1,1]},
//     "obstacles": [ {"type": "aabb", "min": [...], "max": [...]},
//                    {"type": "sphere", "center": [...], "radius": 0.1} ] }
// Coordinate arrays must have exactly `dimension` entries; unknown fields are
// rejected. load(save(e)) is structurally equal to e.
Environment load_environment(const std::string& json_text);
Environment load_environment_file(const std::string& path);
std::string save_environment(const Environment& e);

}  // namespace fss
