#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fss/analysis.hpp"
#include "fss/baseline.hpp"
#include "fss/environment.hpp"
#include "fss/errors.hpp"
#include "fss/output.hpp"
#include "fss/rng.hpp"
#include "fss/sampler.hpp"

namespace py = pybind11;
using namespace fss;

namespace {

struct LeafView {
  Point lo;
  Point hi;
  double weighted_samples;
  double weighted_free;
  double free_mass;
  std::size_t depth;
};

std::vector<LeafView> leaf_views(const SamplerTree& t) {
  std::vector<LeafView> out;
  for (const Node* leaf : t.leaves()) {
    out.push_back({leaf->rect.lo(), leaf->rect.hi(), leaf->weighted_samples,
                   leaf->weighted_free, leaf->free_mass, leaf->depth()});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(fss, m) {
  m.doc() = "Adaptive free-space sampler: tree-guided draws that converge to "
            "uniform over the collision-free part of a bounded domain.";
  m.attr("__version__") = kToolVersion;

  // Base first: translators run newest-first, so the derived types below
  // must be registered after their base to take precedence.
  auto base_exc = py::register_exception<Error>(m, "FssError");
  py::register_exception<ParseError>(m, "EnvironmentParseError", base_exc);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", base_exc);

  py::class_<HyperRect>(m, "HyperRect")
      .def(py::init<Point, Point>(), py::arg("lo"), py::arg("hi"))
      .def_property_readonly("lo", [](const HyperRect& r) { return r.lo(); })
      .def_property_readonly("hi", [](const HyperRect& r) { return r.hi(); })
      .def_property_readonly("dim", &HyperRect::dim)
      .def("measure", &HyperRect::measure)
      .def("degenerate", &HyperRect::degenerate)
      .def("contains", &HyperRect::contains, py::arg("x"))
      .def("split", &HyperRect::split, py::arg("x"), py::arg("axis"))
      .def("__repr__", [](const HyperRect& r) {
        std::string s = "HyperRect(lo=[";
        for (std::size_t i = 0; i < r.dim(); ++i) {
          if (i) s += ", ";
          s += format_double(r.lo(i));
        }
        s += "], hi=[";
        for (std::size_t i = 0; i < r.dim(); ++i) {
          if (i) s += ", ";
          s += format_double(r.hi(i));
        }
        return s + "])";
      });

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("value", &McEstimate::value)
      .def_readonly("std_error", &McEstimate::std_error);

  py::class_<Environment>(m, "Environment")
      .def_static("from_json", &load_environment, py::arg("text"))
      .def_static("from_file", &load_environment_file, py::arg("path"))
      .def("to_json", &save_environment)
      .def_property_readonly("dimension", &Environment::dimension)
      .def_property_readonly("domain", &Environment::domain)
      .def_property_readonly("query_count", &Environment::query_count)
      .def("collision_free", &Environment::collision_free, py::arg("x"))
      .def("free_measure_exact", &Environment::free_measure_exact, py::arg("cell"))
      .def("free_measure_mc",
           [](const Environment& e, const HyperRect& cell, std::size_t samples,
              std::uint64_t seed) {
             RandomStream rng(seed);
             return e.free_measure_mc(cell, samples, rng);
           },
           py::arg("cell"), py::arg("samples"), py::arg("seed") = 0);

  py::class_<SampleRecord>(m, "SampleRecord")
      .def_readonly("point", &SampleRecord::point)
      .def_readonly("free", &SampleRecord::free)
      .def_readonly("leaf_depth", &SampleRecord::leaf_depth)
      .def_readonly("draw_index", &SampleRecord::draw_index);

  py::class_<LeafView>(m, "Leaf")
      .def_readonly("lo", &LeafView::lo)
      .def_readonly("hi", &LeafView::hi)
      .def_readonly("weighted_samples", &LeafView::weighted_samples)
      .def_readonly("weighted_free", &LeafView::weighted_free)
      .def_readonly("free_mass", &LeafView::free_mass)
      .def_readonly("depth", &LeafView::depth);

  py::class_<TreeStats>(m, "TreeStats")
      .def_readonly("node_count", &TreeStats::node_count)
      .def_readonly("leaf_count", &TreeStats::leaf_count)
      .def_readonly("nodes_per_depth", &TreeStats::nodes_per_depth)
      .def_readonly("total_leaf_mass", &TreeStats::total_leaf_mass);

  py::class_<SamplerTree>(m, "SamplerTree")
      .def(py::init<Environment, std::uint64_t>(), py::arg("env"), py::arg("seed"))
      .def("generate", &SamplerTree::generate)
      .def("generate_many",
           [](SamplerTree& t, std::size_t n) {
             std::vector<SampleRecord> out;
             out.reserve(n);
             for (std::size_t i = 0; i < n; ++i) out.push_back(t.generate());
             return out;
           },
           py::arg("n"))
      .def("stats", &SamplerTree::stats)
      .def("leaves", &leaf_views)
      .def("snapshot", &SamplerTree::snapshot)
      .def_property_readonly("draws", &SamplerTree::draws)
      .def_property_readonly("dimension", &SamplerTree::dimension)
      .def_property_readonly(
          "query_count",
          [](const SamplerTree& t) { return t.env().query_count(); });

  py::class_<RejectionSampler>(m, "RejectionSampler")
      .def(py::init<Environment, std::uint64_t, std::uint64_t>(), py::arg("env"),
           py::arg("seed"), py::arg("max_attempts") = kDefaultRejectionBudget)
      .def("sample", &RejectionSampler::sample)
      .def_property_readonly("draws", &RejectionSampler::draws)
      .def_property_readonly(
          "query_count",
          [](const RejectionSampler& s) { return s.env().query_count(); });

  py::class_<UniformSampler>(m, "UniformSampler")
      .def(py::init<Environment, std::uint64_t>(), py::arg("env"), py::arg("seed"))
      .def("sample", &UniformSampler::sample)
      .def_property_readonly("draws", &UniformSampler::draws)
      .def_property_readonly(
          "query_count",
          [](const UniformSampler& s) { return s.env().query_count(); });

  py::class_<HistogramGrid>(m, "HistogramGrid")
      .def_static("with_exact_measure", &HistogramGrid::with_exact_measure,
                  py::arg("env"), py::arg("resolution"))
      .def_static("with_mc_measure",
                  [](const Environment& e, std::size_t resolution,
                     std::size_t samples_per_cell, std::uint64_t seed) {
                    RandomStream rng(seed);
                    return HistogramGrid::with_mc_measure(e, resolution,
                                                          samples_per_cell, rng);
                  },
                  py::arg("env"), py::arg("resolution"),
                  py::arg("samples_per_cell"), py::arg("seed") = 0)
      .def("add", &HistogramGrid::add, py::arg("x"))
      .def_property_readonly("resolution", &HistogramGrid::resolution)
      .def_property_readonly("total", &HistogramGrid::total)
      .def_property_readonly("counts",
                             [](const HistogramGrid& h) { return h.counts(); })
      .def_property_readonly(
          "cell_free_measure",
          [](const HistogramGrid& h) { return h.cell_free_measure(); })
      .def_property_readonly("free_total", &HistogramGrid::free_total);

  m.def("tv_distance",
        [](const HistogramGrid& h) { return tv_distance(h); });
  m.def("chi_square", [](const HistogramGrid& h) {
    const ChiSquare c = chi_square(h);
    return py::make_tuple(c.statistic, c.df, c.forbidden_fraction);
  });

  py::enum_<NodeClass>(m, "NodeClass")
      .value("Free", NodeClass::Free)
      .value("Obstacle", NodeClass::Obstacle)
      .value("Mixed", NodeClass::Mixed);

  m.def("classify_rect", &classify_rect, py::arg("env"), py::arg("rect"));
  m.def("classify_rect_mc",
        [](const Environment& e, const HyperRect& rect, std::size_t samples,
           std::uint64_t seed) {
          RandomStream rng(seed);
          return classify_rect_mc(e, rect, samples, rng);
        },
        py::arg("env"), py::arg("rect"), py::arg("samples"),
        py::arg("seed") = 0);

  py::class_<ClassMasses>(m, "ClassMasses")
      .def_readonly("free_mass", &ClassMasses::free_mass)
      .def_readonly("obstacle_mass", &ClassMasses::obstacle_mass)
      .def_readonly("mixed_mass", &ClassMasses::mixed_mass)
      .def_readonly("free_measure", &ClassMasses::free_measure)
      .def_readonly("obstacle_measure", &ClassMasses::obstacle_measure)
      .def_readonly("mixed_measure", &ClassMasses::mixed_measure);

  m.def("leaf_mass_by_class",
        [](const SamplerTree& t) { return leaf_mass_by_class(t, t.env()); },
        py::arg("tree"));

  py::class_<ConvergenceSnapshot>(m, "ConvergenceSnapshot")
      .def_readonly("n", &ConvergenceSnapshot::n)
      .def_readonly("tv", &ConvergenceSnapshot::tv)
      .def_readonly("chi2", &ConvergenceSnapshot::chi2)
      .def_readonly("df", &ConvergenceSnapshot::df)
      .def_readonly("obstacle_hit_fraction",
                    &ConvergenceSnapshot::obstacle_hit_fraction)
      .def_readonly("free_mass", &ConvergenceSnapshot::free_mass)
      .def_readonly("obstacle_mass", &ConvergenceSnapshot::obstacle_mass)
      .def_readonly("mixed_mass", &ConvergenceSnapshot::mixed_mass);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("snapshots", &ConvergenceReport::snapshots)
      .def_readonly("zero_free_space", &ConvergenceReport::zero_free_space)
      .def_readonly("exact_oracle", &ConvergenceReport::exact_oracle)
      .def_readonly("tree_run", &ConvergenceReport::tree_run)
      .def_readonly("obstacle_mass_increases",
                    &ConvergenceReport::obstacle_mass_increases)
      .def_readonly("free_space_measure", &ConvergenceReport::free_space_measure)
      .def("to_csv", [](const ConvergenceReport& r) {
        return convergence_csv(r, "");
      });

  m.def("run_convergence",
        [](SamplerTree& t, const std::vector<std::uint64_t>& schedule,
           std::size_t grid_resolution) {
          ConvergenceOptions opt;
          opt.grid_resolution = grid_resolution;
          return run_convergence(t, schedule, opt);
        },
        py::arg("tree"), py::arg("schedule"), py::arg("grid_resolution") = 64);
}
