#include "fss/geometry.hpp"

#include <cmath>
#include <string>

#include "fss/errors.hpp"
#include "fss/rng.hpp"

namespace fss {

namespace {

void check_corner(const Point& p) {
  if (p.empty()) throw DimensionMismatch("corner must have dimension >= 1");
  for (double v : p) {
    if (!std::isfinite(v)) throw Error("corner coordinate is not finite");
  }
}

}  // namespace

HyperRect::HyperRect(Point lo, Point hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  check_corner(lo_);
  check_corner(hi_);
  if (lo_.size() != hi_.size()) {
    throw DimensionMismatch("corner dimensions differ: " +
                            std::to_string(lo_.size()) + " vs " +
                            std::to_string(hi_.size()));
  }
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (lo_[i] > hi_[i]) {
      throw Error("box has lo > hi on axis " + std::to_string(i));
    }
  }
}

double HyperRect::measure() const noexcept {
  double m = 1.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) m *= hi_[i] - lo_[i];
  return m;
}

bool HyperRect::degenerate() const noexcept {
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (lo_[i] == hi_[i]) return true;
  }
  return false;
}

bool HyperRect::contains(const Point& x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("point dimension " + std::to_string(x.size()) +
                            " does not match box dimension " +
                            std::to_string(dim()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
  }
  return true;
}

std::pair<HyperRect, HyperRect> HyperRect::split(const Point& x,
                                                 std::size_t axis) const {
  if (axis >= dim()) {
    throw DimensionMismatch("split axis " + std::to_string(axis) +
                            " out of range for dimension " +
                            std::to_string(dim()));
  }
  if (!contains(x)) throw PointOutsideRect("split point outside box");
  Point low_hi = hi_;
  low_hi[axis] = x[axis];
  Point high_lo = lo_;
  high_lo[axis] = x[axis];
  return {HyperRect(lo_, std::move(low_hi)),
          HyperRect(std::move(high_lo), hi_)};
}

std::optional<HyperRect> intersect(const HyperRect& a, const HyperRect& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("box dimensions differ in intersect");
  }
  Point lo(a.dim());
  Point hi(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lo(i), b.lo(i));
    hi[i] = std::min(a.hi(i), b.hi(i));
    if (lo[i] > hi[i]) return std::nullopt;
  }
  return HyperRect(std::move(lo), std::move(hi));
}

Point sample_uniform(const HyperRect& r, RandomStream& rng) {
  Point x(r.dim());
  for (std::size_t i = 0; i < r.dim(); ++i) {
    x[i] = rng.uniform(r.lo(i), r.hi(i));
  }
  return x;
}

}  // namespace fss
