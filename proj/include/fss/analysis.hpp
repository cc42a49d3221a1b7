#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fss/baseline.hpp"
#include "fss/environment.hpp"
#include "fss/sampler.hpp"

namespace fss {

// Oracle-side node taxonomy. Free: the box holds free space almost
// everywhere; Obstacle: obstacle space almost everywhere; Mixed: a positive
// amount of both. The sampler itself never sees this.
enum class NodeClass { Free, Obstacle, Mixed };

// Exact classification for box-only worlds, with an absolute tolerance of
// 1e-12 * measure. Measure-zero boxes classify as Free.
NodeClass classify_rect(const Environment& e, const HyperRect& rect);

// Monte Carlo fallback for sphere worlds: decides Free/Obstacle only when
// the estimate is within 4 standard errors of full/empty, else Mixed.
NodeClass classify_rect_mc(const Environment& e, const HyperRect& rect,
                           std::size_t samples, RandomStream& rng);

inline NodeClass classify_node(const Environment& e, const Node& v) {
  return classify_rect(e, v.rect);
}

struct ClassMasses {
  double free_mass = 0.0;  // sum of leaf free_mass per class
  double obstacle_mass = 0.0;
  double mixed_mass = 0.0;
  double free_measure = 0.0;  // sum of leaf box measure per class
  double obstacle_measure = 0.0;
  double mixed_measure = 0.0;
};

// Classifies every leaf of t against the exact oracle and sums masses and
// measures per class. Box-only worlds.
ClassMasses leaf_mass_by_class(const SamplerTree& t, const Environment& e);

// Regular grid over the first two axes of the domain. Each cell also knows
// the free measure of its full-dimensional slab (cell bounds on axes 0 and
// 1, whole domain on the rest), exact for box worlds or Monte Carlo for
// sphere worlds. Counts are row-major with the origin at the domain min
// corner, row index = axis-1 cell index.
class HistogramGrid {
 public:
  static HistogramGrid with_exact_measure(const Environment& e,
                                          std::size_t resolution);
  static HistogramGrid with_mc_measure(const Environment& e,
                                       std::size_t resolution,
                                       std::size_t samples_per_cell,
                                       RandomStream& rng);

  void add(const Point& x);

  std::size_t resolution() const noexcept { return res_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& cell_free_measure() const noexcept { return free_; }
  double free_total() const noexcept { return free_total_; }

  std::size_t cell_index(const Point& x) const;  // flat row-major index

 private:
  HistogramGrid(const Environment& e, std::size_t resolution);
  HyperRect cell_slab(const Environment& e, std::size_t ix, std::size_t iy) const;

  std::size_t res_ = 0;
  double lo0_ = 0.0, lo1_ = 0.0;
  double w0_ = 0.0, w1_ = 0.0;  // cell widths on axes 0 and 1
  std::vector<std::uint64_t> counts_;
  std::vector<double> free_;
  double free_total_ = 0.0;
  std::uint64_t total_ = 0;
};

// Total variation distance between the empirical cell distribution and the
// cell distribution of uniform-over-free-space. Always in [0, 1]; invariant
// under cell reordering. Throws ZeroFreeSpace when no cell has free measure.
double tv_distance(std::span<const std::uint64_t> counts,
                   std::span<const double> cell_free_measure,
                   std::uint64_t total);
double tv_distance(const HistogramGrid& h);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t df = 0;
  // Share of draws that landed in cells with zero free measure. Those cells
  // have expectation 0 under the null and are tallied here instead of being
  // folded into the statistic.
  double forbidden_fraction = 0.0;
};

// Pearson goodness-of-fit against expected counts total * free/free_total.
// Cells with expected count below 5 are pooled canonically (sorted by
// (expected, observed)) so the result is invariant under cell reordering.
// Throws InsufficientSamples when fewer than two pooled buckets remain.
ChiSquare chi_square(std::span<const std::uint64_t> counts,
                     std::span<const double> cell_free_measure,
                     std::uint64_t total);
ChiSquare chi_square(const HistogramGrid& h);

struct ConvergenceSnapshot {
  std::uint64_t n = 0;
  double tv = 0.0;
  double chi2 = 0.0;
  std::size_t df = 0;
  double obstacle_hit_fraction = 0.0;  // over the window since the previous snapshot
  double free_mass = 0.0;              // leaf-mass sums by oracle class (tree runs only)
  double obstacle_mass = 0.0;
  double mixed_mass = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceSnapshot> snapshots;
  bool zero_free_space = false;
  bool exact_oracle = true;  // false: sphere world, cell measures via Monte Carlo
  bool tree_run = false;     // leaf-mass columns are meaningful
  // Count of obstacle-classified leaves whose free_mass ever rose across
  // their own draw events (tree runs with an exact oracle; expected 0).
  std::uint64_t obstacle_mass_increases = 0;
  double free_space_measure = 0.0;  // from the grid's cell measures
};

struct ConvergenceOptions {
  std::size_t grid_resolution = 64;
  std::size_t mc_cell_samples = 10'000;           // sphere-world cell measures
  std::uint64_t mc_seed = 0x9e3779b97f4a7c15ULL;  // stream for those estimates
};

// Draws up to the last scheduled n, recording at each snapshot the distance
// metrics over all draws so far, the obstacle-hit fraction over the window
// since the previous snapshot, and (tree runs, exact oracle) leaf masses by
// class. The schedule must be strictly increasing.
ConvergenceReport run_convergence(SamplerTree& t,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt = {});
ConvergenceReport run_convergence(RejectionSampler& s,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt = {});
ConvergenceReport run_convergence(UniformSampler& s,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt = {});

// CSV with one row per snapshot:
// n,tv,chi2,df,obstacle_hit_fraction,free_mass,obstacle_mass,mixed_mass
std::string convergence_csv(const ConvergenceReport& r,
                            const std::string& header_comment);

}  // namespace fss
