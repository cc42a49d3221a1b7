#include "fss/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "fss/errors.hpp"
#include "fss/output.hpp"

namespace fss {

NodeClass classify_rect(const Environment& e, const HyperRect& rect) {
  const double m = rect.measure();
  const double fm = e.free_measure_exact(rect);
  const double tol = 1e-12 * m;
  if (fm >= m - tol) return NodeClass::Free;
  if (fm <= tol) return NodeClass::Obstacle;
  return NodeClass::Mixed;
}

NodeClass classify_rect_mc(const Environment& e, const HyperRect& rect,
                           std::size_t samples, RandomStream& rng) {
  const double m = rect.measure();
  const auto [est, se] = e.free_measure_mc(rect, samples, rng);
  if (m - est <= 4.0 * se) return NodeClass::Free;
  if (est <= 4.0 * se) return NodeClass::Obstacle;
  return NodeClass::Mixed;
}

ClassMasses leaf_mass_by_class(const SamplerTree& t, const Environment& e) {
  ClassMasses out;
  for (const Node* leaf : t.leaves()) {
    switch (classify_rect(e, leaf->rect)) {
      case NodeClass::Free:
        out.free_mass += leaf->free_mass;
        out.free_measure += leaf->rect.measure();
        break;
      case NodeClass::Obstacle:
        out.obstacle_mass += leaf->free_mass;
        out.obstacle_measure += leaf->rect.measure();
        break;
      case NodeClass::Mixed:
        out.mixed_mass += leaf->free_mass;
        out.mixed_measure += leaf->rect.measure();
        break;
    }
  }
  return out;
}

HistogramGrid::HistogramGrid(const Environment& e, std::size_t resolution)
    : res_(resolution) {
  if (resolution < 1) throw Error("grid resolution must be at least 1");
  if (e.dimension() < 2) {
    throw DimensionMismatch("histogram grid needs dimension >= 2");
  }
  const HyperRect& d = e.domain();
  lo0_ = d.lo(0);
  lo1_ = d.lo(1);
  w0_ = d.side(0) / static_cast<double>(res_);
  w1_ = d.side(1) / static_cast<double>(res_);
  counts_.assign(res_ * res_, 0);
  free_.assign(res_ * res_, 0.0);
}

HyperRect HistogramGrid::cell_slab(const Environment& e, std::size_t ix,
                                   std::size_t iy) const {
  Point lo = e.domain().lo();
  Point hi = e.domain().hi();
  lo[0] = lo0_ + static_cast<double>(ix) * w0_;
  hi[0] = ix + 1 == res_ ? e.domain().hi(0)
                         : lo0_ + static_cast<double>(ix + 1) * w0_;
  lo[1] = lo1_ + static_cast<double>(iy) * w1_;
  hi[1] = iy + 1 == res_ ? e.domain().hi(1)
                         : lo1_ + static_cast<double>(iy + 1) * w1_;
  return HyperRect(std::move(lo), std::move(hi));
}

HistogramGrid HistogramGrid::with_exact_measure(const Environment& e,
                                                std::size_t resolution) {
  HistogramGrid g(e, resolution);
  for (std::size_t iy = 0; iy < g.res_; ++iy) {
    for (std::size_t ix = 0; ix < g.res_; ++ix) {
      const double fm = e.free_measure_exact(g.cell_slab(e, ix, iy));
      g.free_[iy * g.res_ + ix] = fm;
      g.free_total_ += fm;
    }
  }
  return g;
}

HistogramGrid HistogramGrid::with_mc_measure(const Environment& e,
                                             std::size_t resolution,
                                             std::size_t samples_per_cell,
                                             RandomStream& rng) {
  HistogramGrid g(e, resolution);
  for (std::size_t iy = 0; iy < g.res_; ++iy) {
    for (std::size_t ix = 0; ix < g.res_; ++ix) {
      const double fm =
          e.free_measure_mc(g.cell_slab(e, ix, iy), samples_per_cell, rng).value;
      g.free_[iy * g.res_ + ix] = fm;
      g.free_total_ += fm;
    }
  }
  return g;
}

std::size_t HistogramGrid::cell_index(const Point& x) const {
  const auto clamp_cell = [this](double coord, double lo, double w) {
    auto i = static_cast<long long>(std::floor((coord - lo) / w));
    i = std::max(0LL, std::min(i, static_cast<long long>(res_) - 1));
    return static_cast<std::size_t>(i);
  };
  const std::size_t ix = clamp_cell(x[0], lo0_, w0_);
  const std::size_t iy = clamp_cell(x[1], lo1_, w1_);
  return iy * res_ + ix;
}

void HistogramGrid::add(const Point& x) {
  ++counts_[cell_index(x)];
  ++total_;
}

double tv_distance(std::span<const std::uint64_t> counts,
                   std::span<const double> cell_free_measure,
                   std::uint64_t total) {
  if (counts.size() != cell_free_measure.size()) {
    throw DimensionMismatch("counts and cell measures differ in length");
  }
  if (total == 0) throw Error("tv_distance needs at least one draw");
  double free_total = 0.0;
  for (double f : cell_free_measure) free_total += f;
  if (free_total <= 0.0) throw ZeroFreeSpace("no cell has free measure");
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double observed =
        static_cast<double>(counts[i]) / static_cast<double>(total);
    sum += std::abs(observed - cell_free_measure[i] / free_total);
  }
  return 0.5 * sum;
}

double tv_distance(const HistogramGrid& h) {
  return tv_distance(h.counts(), h.cell_free_measure(), h.total());
}

ChiSquare chi_square(std::span<const std::uint64_t> counts,
                     std::span<const double> cell_free_measure,
                     std::uint64_t total) {
  if (counts.size() != cell_free_measure.size()) {
    throw DimensionMismatch("counts and cell measures differ in length");
  }
  if (total == 0) throw InsufficientSamples("chi_square needs draws");
  double free_total = 0.0;
  for (double f : cell_free_measure) free_total += f;
  if (free_total <= 0.0) throw ZeroFreeSpace("no cell has free measure");

  constexpr double kMinExpected = 5.0;
  std::uint64_t forbidden = 0;
  struct Bucket {
    double expected;
    double observed;
  };
  std::vector<Bucket> cells;
  cells.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (cell_free_measure[i] <= 0.0) {
      forbidden += counts[i];
      continue;
    }
    cells.push_back({static_cast<double>(total) * cell_free_measure[i] / free_total,
                     static_cast<double>(counts[i])});
  }

  // Canonical pooling: sort by (expected, observed) descending and absorb
  // from the small end until the pool reaches the threshold. The result
  // depends only on the multiset of cells, not their order.
  std::sort(cells.begin(), cells.end(), [](const Bucket& a, const Bucket& b) {
    if (a.expected != b.expected) return a.expected > b.expected;
    return a.observed > b.observed;
  });
  Bucket pool{0.0, 0.0};
  bool pooled = false;
  while (!cells.empty() &&
         (cells.back().expected < kMinExpected ||
          (pooled && pool.expected < kMinExpected))) {
    pool.expected += cells.back().expected;
    pool.observed += cells.back().observed;
    pooled = true;
    cells.pop_back();
  }
  if (pooled && pool.expected >= kMinExpected) cells.push_back(pool);

  if (cells.size() < 2) {
    throw InsufficientSamples("fewer than two usable buckets after pooling");
  }
  ChiSquare out;
  for (const Bucket& b : cells) {
    const double d = b.observed - b.expected;
    out.statistic += d * d / b.expected;
  }
  out.df = cells.size() - 1;
  out.forbidden_fraction =
      static_cast<double>(forbidden) / static_cast<double>(total);
  return out;
}

ChiSquare chi_square(const HistogramGrid& h) {
  return chi_square(h.counts(), h.cell_free_measure(), h.total());
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

ConvergenceReport run_impl(const std::function<SampleRecord()>& draw,
                           const Environment& oracle, SamplerTree* tree,
                           const std::vector<std::uint64_t>& schedule,
                           const ConvergenceOptions& opt) {
  if (schedule.empty()) throw Error("snapshot schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw Error("snapshot schedule must be strictly increasing");
    }
  }

  const bool exact = !oracle.has_spheres();
  RandomStream mc_rng(opt.mc_seed);
  HistogramGrid grid =
      exact ? HistogramGrid::with_exact_measure(oracle, opt.grid_resolution)
            : HistogramGrid::with_mc_measure(oracle, opt.grid_resolution,
                                             opt.mc_cell_samples, mc_rng);

  ConvergenceReport rep;
  rep.exact_oracle = exact;
  rep.tree_run = tree != nullptr;
  rep.free_space_measure = grid.free_total();
  rep.zero_free_space = grid.free_total() <= 0.0;

  // Obstacle-classified leaves seen so far, with the mass recorded at their
  // last draw event; mass must never rise between events.
  std::unordered_map<const Node*, double> obstacle_mu;

  std::uint64_t prev = 0;
  for (const std::uint64_t n : schedule) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = prev; i < n; ++i) {
      const SampleRecord rec = draw();
      grid.add(rec.point);
      if (!rec.free) ++hits;
      if (tree && exact && rec.leaf && rec.leaf->leaf()) {
        const Node* lf = rec.leaf;
        auto it = obstacle_mu.find(lf);
        if (it != obstacle_mu.end()) {
          if (lf->free_mass > it->second * (1.0 + 1e-12)) {
            ++rep.obstacle_mass_increases;
          }
          it->second = lf->free_mass;
        } else if (!rec.free &&
                   classify_rect(oracle, lf->rect) == NodeClass::Obstacle) {
          obstacle_mu.emplace(lf, lf->free_mass);
        }
      }
    }

    ConvergenceSnapshot s;
    s.n = n;
    s.obstacle_hit_fraction =
        static_cast<double>(hits) / static_cast<double>(n - prev);
    s.tv = rep.zero_free_space ? kNan : tv_distance(grid);
    try {
      const ChiSquare c = chi_square(grid);
      s.chi2 = c.statistic;
      s.df = c.df;
    } catch (const Error&) {
      s.chi2 = kNan;
      s.df = 0;
    }
    if (tree && exact) {
      const ClassMasses m = leaf_mass_by_class(*tree, oracle);
      s.free_mass = m.free_mass;
      s.obstacle_mass = m.obstacle_mass;
      s.mixed_mass = m.mixed_mass;
    }
    rep.snapshots.push_back(s);
    prev = n;
  }
  return rep;
}

}  // namespace

ConvergenceReport run_convergence(SamplerTree& t,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt) {
  return run_impl([&t] { return t.generate(); }, t.env(), &t, schedule, opt);
}

ConvergenceReport run_convergence(RejectionSampler& s,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt) {
  return run_impl([&s] { return s.sample(); }, s.env(), nullptr, schedule, opt);
}

ConvergenceReport run_convergence(UniformSampler& s,
                                  const std::vector<std::uint64_t>& schedule,
                                  const ConvergenceOptions& opt) {
  return run_impl([&s] { return s.sample(); }, s.env(), nullptr, schedule, opt);
}

std::string convergence_csv(const ConvergenceReport& r,
                            const std::string& header_comment) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  if (r.zero_free_space) out += "# zero_free_space\n";
  out += "n,tv,chi2,df,obstacle_hit_fraction,free_mass,obstacle_mass,mixed_mass\n";
  for (const ConvergenceSnapshot& s : r.snapshots) {
    out += std::to_string(s.n);
    out += ',';
    out += format_double(s.tv);
    out += ',';
    out += format_double(s.chi2);
    out += ',';
    out += std::to_string(s.df);
    out += ',';
    out += format_double(s.obstacle_hit_fraction);
    out += ',';
    out += format_double(s.free_mass);
    out += ',';
    out += format_double(s.obstacle_mass);
    out += ',';
    out += format_double(s.mixed_mass);
    out += '\n';
  }
  return out;
}

}  // namespace fss
