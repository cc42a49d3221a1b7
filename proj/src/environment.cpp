#include "fss/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "fss/errors.hpp"
#include "fss/rng.hpp"
#include "json.hpp"

namespace fss {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool obstacle_contains(const Obstacle& o, const Point& x) {
  return std::visit(
      overloaded{
          [&](const AabbObstacle& a) { return a.box.contains(x); },
          [&](const SphereObstacle& s) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < s.center.size(); ++i) {
              const double d = x[i] - s.center[i];
              d2 += d * d;
            }
            return d2 <= s.radius * s.radius;
          },
      },
      o);
}

Environment::Environment(HyperRect domain, std::vector<Obstacle> obstacles)
    : domain_(std::move(domain)), obstacles_(std::move(obstacles)) {
  if (domain_.measure() <= 0.0) {
    throw Error("domain must have positive measure");
  }
  for (const Obstacle& o : obstacles_) {
    const std::size_t d = std::visit(
        overloaded{
            [](const AabbObstacle& a) { return a.box.dim(); },
            [](const SphereObstacle& s) { return s.center.size(); },
        },
        o);
    if (d != domain_.dim()) {
      throw DimensionMismatch("obstacle dimension does not match domain");
    }
    if (const auto* s = std::get_if<SphereObstacle>(&o)) {
      if (!(s->radius > 0.0) || !std::isfinite(s->radius)) {
        throw Error("sphere radius must be positive and finite");
      }
    }
  }
}

bool Environment::has_spheres() const noexcept {
  return std::any_of(obstacles_.begin(), obstacles_.end(), [](const Obstacle& o) {
    return std::holds_alternative<SphereObstacle>(o);
  });
}

bool Environment::collision_free(const Point& x) {
  if (!domain_.contains(x)) throw OutOfDomain("query point outside domain");
  ++query_count_;
  for (const Obstacle& o : obstacles_) {
    if (obstacle_contains(o, x)) return false;
  }
  return true;
}

bool Environment::collision_free_uncounted(const Point& x) const {
  for (const Obstacle& o : obstacles_) {
    if (obstacle_contains(o, x)) return false;
  }
  return true;
}

namespace {

// Measure of the union of boxes[start..] clipped to `within`:
// sum over i of |B_i ∩ within| minus the union of later boxes inside that
// intersection. Empty intersections prune the whole branch.
double union_measure_from(const std::vector<const HyperRect*>& boxes,
                          std::size_t start, const HyperRect& within) {
  double total = 0.0;
  for (std::size_t i = start; i < boxes.size(); ++i) {
    const auto cut = intersect(within, *boxes[i]);
    if (!cut || cut->measure() == 0.0) continue;
    total += cut->measure() - union_measure_from(boxes, i + 1, *cut);
  }
  return total;
}

}  // namespace

double Environment::obstacle_measure_exact(const HyperRect& cell) const {
  std::vector<const HyperRect*> boxes;
  boxes.reserve(obstacles_.size());
  for (const Obstacle& o : obstacles_) {
    const auto* a = std::get_if<AabbObstacle>(&o);
    if (!a) {
      throw UnsupportedGeometry(
          "exact measure needs box-only worlds; use the Monte Carlo estimate");
    }
    boxes.push_back(&a->box);
  }
  return union_measure_from(boxes, 0, cell);
}

double Environment::free_measure_exact(const HyperRect& cell) const {
  const double m = cell.measure();
  return std::clamp(m - obstacle_measure_exact(cell), 0.0, m);
}

McEstimate Environment::free_measure_mc(const HyperRect& cell,
                                        std::size_t samples,
                                        RandomStream& rng) const {
  if (samples == 0) throw Error("free_measure_mc needs at least one sample");
  const double m = cell.measure();
  std::size_t free = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (collision_free_uncounted(sample_uniform(cell, rng))) ++free;
  }
  const double p = static_cast<double>(free) / static_cast<double>(samples);
  return {m * p, m * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where,
                   std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const bool known =
        std::any_of(required.begin(), required.end(),
                    [&](const char* k) { return key == k; }) ||
        std::any_of(optional.begin(), optional.end(),
                    [&](const char* k) { return key == k; });
    if (!known) fail(where, "unknown field '" + key + "'");
  }
  for (const char* k : required) {
    if (!j.contains(k)) fail(where, std::string("missing field '") + k + "'");
  }
}

Point parse_coords(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  if (j.size() != dim) {
    throw DimensionMismatch(where + ": expected " + std::to_string(dim) +
                            " coordinates, got " + std::to_string(j.size()));
  }
  Point p;
  p.reserve(dim);
  for (const auto& v : j) {
    if (!v.is_number()) fail(where, "coordinate is not a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "coordinate is not finite");
    p.push_back(x);
  }
  return p;
}

}  // namespace

Environment load_environment(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }

  expect_object(j, "environment", {"dimension", "domain"}, {"obstacles"});

  const json& jd = j["dimension"];
  if (!jd.is_number_unsigned() || jd.get<std::uint64_t>() == 0) {
    fail("dimension", "must be a positive integer");
  }
  const auto dim = jd.get<std::size_t>();

  const json& dom = j["domain"];
  expect_object(dom, "domain", {"min", "max"});
  HyperRect domain = [&] {
    try {
      return HyperRect(parse_coords(dom["min"], dim, "domain.min"),
                       parse_coords(dom["max"], dim, "domain.max"));
    } catch (const DimensionMismatch&) {
      throw;
    } catch (const Error& e) {
      fail("domain", e.what());
    }
  }();
  if (domain.measure() <= 0.0) fail("domain", "must have positive measure");

  std::vector<Obstacle> obstacles;
  if (j.contains("obstacles")) {
    const json& arr = j["obstacles"];
    if (!arr.is_array()) fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      const json& o = arr[i];
      if (!o.is_object() || !o.contains("type") || !o["type"].is_string()) {
        fail(where, "expected an object with a string 'type'");
      }
      const auto type = o["type"].get<std::string>();
      if (type == "aabb") {
        expect_object(o, where, {"type", "min", "max"});
        try {
          obstacles.push_back(AabbObstacle{
              HyperRect(parse_coords(o["min"], dim, where + ".min"),
                        parse_coords(o["max"], dim, where + ".max"))});
        } catch (const DimensionMismatch&) {
          throw;
        } catch (const Error& e) {
          fail(where, e.what());
        }
      } else if (type == "sphere") {
        expect_object(o, where, {"type", "center", "radius"});
        if (!o["radius"].is_number()) fail(where, "radius is not a number");
        const double radius = o["radius"].get<double>();
        if (!(radius > 0.0) || !std::isfinite(radius)) {
          fail(where, "radius must be positive and finite");
        }
        obstacles.push_back(SphereObstacle{
            parse_coords(o["center"], dim, where + ".center"), radius});
      } else {
        fail(where, "unknown obstacle type '" + type + "'");
      }
    }
  }

  return Environment(std::move(domain), std::move(obstacles));
}

Environment load_environment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read environment file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_environment(buf.str());
}

std::string save_environment(const Environment& e) {
  json j;
  j["dimension"] = e.dimension();
  j["domain"] = {{"min", e.domain().lo()}, {"max", e.domain().hi()}};
  json arr = json::array();
  for (const Obstacle& o : e.obstacles()) {
    std::visit(overloaded{
                   [&](const AabbObstacle& a) {
                     arr.push_back({{"type", "aabb"},
                                    {"min", a.box.lo()},
                                    {"max", a.box.hi()}});
                   },
                   [&](const SphereObstacle& s) {
                     arr.push_back({{"type", "sphere"},
                                    {"center", s.center},
                                    {"radius", s.radius}});
                   },
               },
               o);
  }
  j["obstacles"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace fss
