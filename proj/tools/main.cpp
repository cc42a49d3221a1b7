// fss: draw collision-free samples with the adaptive tree sampler or the
// reference samplers, export density heatmaps, benchmark collision-check
// cost, and run the convergence probes.
//
// Exit codes: 0 success, 2 bad configuration, 3 environment parse error,
// 4 rejection budget exhausted, 5 internal invariant violation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fss/analysis.hpp"
#include "fss/baseline.hpp"
#include "fss/environment.hpp"
#include "fss/errors.hpp"
#include "fss/output.hpp"
#include "fss/sampler.hpp"

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string env_path;
  std::string sampler = "adaptive";
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;  // 0: default to the last snapshot
  std::size_t grid = 64;
  std::vector<std::uint64_t> snapshots = {10'000, 100'000, 1'000'000};
  std::string out_dir = ".";
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Each subcommand registers exactly the flags it consumes; anything else is
// an unknown-flag error.
struct FlagSet {
  bool sampler = false;
  bool grid = false;
  bool snapshots = false;
};

void add_options(CLI::App& cmd, RunConfig& cfg, const FlagSet& flags) {
  cmd.add_option("--env", cfg.env_path, "environment JSON file")->required();
  if (flags.sampler) {
    cmd.add_option("--sampler", cfg.sampler,
                   "sampler: adaptive | rejection | uniform");
  }
  cmd.add_option("--seed", cfg.seed, "random seed (64-bit)");
  cmd.add_option("--samples", cfg.samples, "number of draws");
  if (flags.grid) {
    cmd.add_option("--grid", cfg.grid, "histogram resolution per axis");
  }
  if (flags.snapshots) {
    cmd.add_option("--snapshots", cfg.snapshots,
                   "snapshot draw counts, e.g. 10000,100000,1000000")
        ->delimiter(',');
  }
  cmd.add_option("--out", cfg.out_dir, "output directory");
}

void validate(RunConfig& cfg, bool needs_snapshots) {
  if (cfg.sampler != "adaptive" && cfg.sampler != "rejection" &&
      cfg.sampler != "uniform") {
    throw ConfigError("unknown sampler '" + cfg.sampler + "'");
  }
  if (cfg.grid < 2) throw ConfigError("--grid must be at least 2");
  if (needs_snapshots) {
    if (cfg.snapshots.empty()) throw ConfigError("--snapshots must not be empty");
    for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
      if (cfg.snapshots[i] == 0 ||
          (i > 0 && cfg.snapshots[i] <= cfg.snapshots[i - 1])) {
        throw ConfigError("--snapshots must be positive and strictly increasing");
      }
    }
    if (cfg.samples == 0) cfg.samples = cfg.snapshots.back();
    if (cfg.snapshots.back() > cfg.samples) {
      throw ConfigError("snapshots must not exceed --samples");
    }
  }
  if (cfg.samples == 0) throw ConfigError("--samples must be at least 1");
}

std::string env_hash(const std::string& path) {
  return fss::hex64(fss::fnv1a64(fss::read_text_file(path)));
}

std::string file_comment(const RunConfig& cfg, const std::string& extra = "") {
  std::string c = std::string("fss ") + fss::kToolVersion +
                  " env_hash=" + env_hash(cfg.env_path) +
                  " seed=" + std::to_string(cfg.seed);
  if (!extra.empty()) c += " " + extra;
  return c;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

// One draw stream regardless of sampler kind.
class AnySampler {
 public:
  AnySampler(const RunConfig& cfg, fss::Environment env, std::uint64_t seed) {
    if (cfg.sampler == "adaptive") {
      tree_ = std::make_unique<fss::SamplerTree>(std::move(env), seed);
    } else if (cfg.sampler == "rejection") {
      rejection_ = std::make_unique<fss::RejectionSampler>(std::move(env), seed);
    } else {
      uniform_ = std::make_unique<fss::UniformSampler>(std::move(env), seed);
    }
  }

  fss::SampleRecord draw() {
    if (tree_) return tree_->generate();
    if (rejection_) return rejection_->sample();
    return uniform_->sample();
  }

  fss::SamplerTree* tree() { return tree_.get(); }
  fss::RejectionSampler* rejection() { return rejection_.get(); }
  fss::UniformSampler* uniform() { return uniform_.get(); }

 private:
  std::unique_ptr<fss::SamplerTree> tree_;
  std::unique_ptr<fss::RejectionSampler> rejection_;
  std::unique_ptr<fss::UniformSampler> uniform_;
};

int cmd_sample(RunConfig cfg) {
  validate(cfg, false);
  fss::Environment env = fss::load_environment_file(cfg.env_path);
  const std::size_t dim = env.dimension();
  const fs::path dir = ensure_out_dir(cfg);

  AnySampler sampler(cfg, std::move(env), cfg.seed);
  std::string csv = "# " + file_comment(cfg) + "\n";
  csv += "draw_index";
  for (std::size_t i = 0; i < dim; ++i) csv += ",x" + std::to_string(i);
  csv += ",free\n";
  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    const fss::SampleRecord rec = sampler.draw();
    csv += std::to_string(rec.draw_index);
    for (double c : rec.point) csv += "," + fss::format_double(c);
    csv += rec.free ? ",1\n" : ",0\n";
  }
  fss::write_text_file((dir / "samples.csv").string(), csv);
  std::cout << "wrote " << (dir / "samples.csv").string() << " (" << cfg.samples
            << " rows)\n";
  return 0;
}

void write_density_files(const fs::path& dir, const RunConfig& cfg,
                         const std::vector<std::uint64_t>& counts,
                         std::size_t res, std::uint64_t n) {
  const std::string tag = std::to_string(n);
  std::string csv = "# " + file_comment(cfg, "n=" + tag) + "\n";
  for (std::size_t iy = 0; iy < res; ++iy) {
    for (std::size_t ix = 0; ix < res; ++ix) {
      if (ix) csv += ',';
      csv += std::to_string(counts[iy * res + ix]);
    }
    csv += '\n';
  }
  fss::write_text_file((dir / ("density_" + tag + ".csv")).string(), csv);

  std::uint64_t max_count = 0;
  for (std::uint64_t c : counts) max_count = std::max(max_count, c);
  std::vector<int> pixels(counts.size(), 255);
  if (max_count > 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const int scaled = static_cast<int>(
          std::lround(255.0 * static_cast<double>(counts[i]) /
                      static_cast<double>(max_count)));
      pixels[i] = 255 - scaled;  // low density = white
    }
  }
  fss::write_text_file(
      (dir / ("density_" + tag + ".pgm")).string(),
      fss::pgm_image(res, res, pixels, file_comment(cfg, "n=" + tag)));
}

int cmd_density(RunConfig cfg) {
  validate(cfg, true);
  fss::Environment env = fss::load_environment_file(cfg.env_path);
  if (env.dimension() < 2) throw ConfigError("density needs dimension >= 2");
  const fs::path dir = ensure_out_dir(cfg);

  // Counting only; the oracle cell measures are not needed for heatmaps.
  fss::HistogramGrid grid =
      fss::HistogramGrid::with_exact_measure(
          fss::Environment(env.domain(), {}), cfg.grid);
  AnySampler sampler(cfg, std::move(env), cfg.seed);

  std::size_t next = 0;
  for (std::uint64_t i = 1; i <= cfg.samples; ++i) {
    grid.add(sampler.draw().point);
    if (next < cfg.snapshots.size() && i == cfg.snapshots[next]) {
      write_density_files(dir, cfg, grid.counts(), cfg.grid, i);
      ++next;
    }
  }
  std::cout << "wrote " << cfg.snapshots.size() << " density snapshot(s) to "
            << dir.string() << "\n";
  return 0;
}

int cmd_bench(RunConfig cfg) {
  if (cfg.samples == 0) cfg.samples = 1'000'000;
  validate(cfg, false);
  const fs::path dir = ensure_out_dir(cfg);
  const std::uint64_t n = cfg.samples;
  const std::uint64_t window = std::max<std::uint64_t>(1, n / 10);
  const std::uint64_t seed_adaptive = cfg.seed;
  const std::uint64_t seed_rejection = cfg.seed + 1;

  struct WindowRow {
    std::uint64_t first = 0, last = 0, checks = 0, free = 0;
  };
  using Clock = std::chrono::steady_clock;

  std::string csv = "# fss " + std::string(fss::kToolVersion) +
                    " env_hash=" + env_hash(cfg.env_path) +
                    " seed_adaptive=" + std::to_string(seed_adaptive) +
                    " seed_rejection=" + std::to_string(seed_rejection) + "\n";
  csv += "sampler,window,draws,checks,free,checks_per_free,accept_rate\n";

  const auto emit = [&csv](const std::string& kind, const std::string& window_tag,
                           std::uint64_t draws, std::uint64_t checks,
                           std::uint64_t free) {
    csv += kind + "," + window_tag + "," + std::to_string(draws) + "," +
           std::to_string(checks) + "," + std::to_string(free) + "," +
           fss::format_double(free > 0 ? static_cast<double>(checks) /
                                             static_cast<double>(free)
                                       : std::numeric_limits<double>::infinity()) +
           "," +
           fss::format_double(checks > 0 ? static_cast<double>(free) /
                                               static_cast<double>(checks)
                                         : 0.0) +
           "\n";
  };

  // Adaptive: one counted check per draw; a window's cost is its draw count.
  fss::SamplerTree tree(fss::load_environment_file(cfg.env_path), seed_adaptive);
  double adaptive_final_cpf = 0.0;
  std::uint64_t adaptive_free_total = 0;
  const auto t0 = Clock::now();
  {
    WindowRow w;
    w.first = 1;
    for (std::uint64_t i = 1; i <= n; ++i) {
      ++w.checks;
      if (tree.generate().free) ++w.free;
      if (i % window == 0 || i == n) {
        w.last = i;
        emit("adaptive", std::to_string(w.first) + "-" + std::to_string(w.last),
             w.last - w.first + 1, w.checks, w.free);
        adaptive_final_cpf = w.free > 0 ? static_cast<double>(w.checks) /
                                              static_cast<double>(w.free)
                                        : std::numeric_limits<double>::infinity();
        adaptive_free_total += w.free;
        w = WindowRow{};
        w.first = i + 1;
      }
    }
  }
  const double adaptive_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  emit("adaptive", "total", n, n, adaptive_free_total);
  const double adaptive_total_cpf =
      adaptive_free_total > 0
          ? static_cast<double>(n) / static_cast<double>(adaptive_free_total)
          : std::numeric_limits<double>::infinity();

  // Rejection: n accepted samples; cost read off the environment counter.
  fss::RejectionSampler rejection(fss::load_environment_file(cfg.env_path),
                                  seed_rejection);
  const auto t1 = Clock::now();
  {
    WindowRow w;
    w.first = 1;
    std::uint64_t checks_before = 0;
    for (std::uint64_t i = 1; i <= n; ++i) {
      rejection.sample();
      ++w.free;
      if (i % window == 0 || i == n) {
        w.last = i;
        w.checks = rejection.env().query_count() - checks_before;
        checks_before = rejection.env().query_count();
        emit("rejection", std::to_string(w.first) + "-" + std::to_string(w.last),
             w.last - w.first + 1, w.checks, w.free);
        w = WindowRow{};
        w.first = i + 1;
      }
    }
  }
  const double rejection_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
  const std::uint64_t rejection_checks = rejection.env().query_count();
  emit("rejection", "total", n, rejection_checks, n);
  const double rejection_cpf =
      static_cast<double>(rejection_checks) / static_cast<double>(n);

  fss::write_text_file((dir / "bench.csv").string(), csv);

  // Wall time stays out of the CSV so outputs are byte-stable under a seed.
  std::cout << "environment: " << cfg.env_path
            << " hash=" << env_hash(cfg.env_path) << "\n"
            << "adaptive:  seed=" << seed_adaptive << " draws=" << n
            << " free=" << adaptive_free_total
            << " checks_per_free=" << fss::format_double(adaptive_total_cpf)
            << " final_window_checks_per_free="
            << fss::format_double(adaptive_final_cpf)
            << " wall_ms_per_1e5_draws="
            << fss::format_double(adaptive_ms * 1e5 / static_cast<double>(n))
            << "\n"
            << "rejection: seed=" << seed_rejection << " accepted=" << n
            << " checks=" << rejection_checks
            << " checks_per_free=" << fss::format_double(rejection_cpf)
            << " wall_ms_per_1e5_draws="
            << fss::format_double(rejection_ms * 1e5 / static_cast<double>(n))
            << "\n"
            << "report: " << (dir / "bench.csv").string() << "\n";
  return 0;
}

int cmd_classify(RunConfig cfg) {
  validate(cfg, true);
  fss::Environment env = fss::load_environment_file(cfg.env_path);
  if (env.dimension() < 2) throw ConfigError("classify needs dimension >= 2");
  const fs::path dir = ensure_out_dir(cfg);
  const bool exact = !env.has_spheres();
  const double domain_measure = env.domain().measure();

  fss::ConvergenceOptions opt;
  opt.grid_resolution = cfg.grid;

  AnySampler sampler(cfg, std::move(env), cfg.seed);
  fss::ConvergenceReport rep =
      sampler.tree()
          ? fss::run_convergence(*sampler.tree(), cfg.snapshots, opt)
          : (sampler.rejection()
                 ? fss::run_convergence(*sampler.rejection(), cfg.snapshots, opt)
                 : fss::run_convergence(*sampler.uniform(), cfg.snapshots, opt));

  fss::write_text_file((dir / "convergence.csv").string(),
                       fss::convergence_csv(rep, file_comment(cfg)));

  std::string probes = "# " + file_comment(cfg) + "\n";
  const auto probe = [&probes](bool pass, const std::string& name,
                               const std::string& detail) {
    probes += std::string(pass ? "PASS " : "FAIL ") + name + " " + detail + "\n";
  };
  const auto skip = [&probes](const std::string& name, const std::string& why) {
    probes += "SKIPPED(" + why + ") " + name + "\n";
  };

  if (rep.zero_free_space) {
    probes += "ZeroFreeSpace: the environment has no free space; "
              "distribution probes skipped\n";
  } else {
    if (rep.snapshots.size() >= 2) {
      bool decreasing = true;
      std::string trail;
      for (std::size_t i = 0; i < rep.snapshots.size(); ++i) {
        if (i) {
          decreasing &= rep.snapshots[i].tv < rep.snapshots[i - 1].tv;
          trail += " > ";
        }
        trail += fss::format_double(rep.snapshots[i].tv);
      }
      probe(decreasing, "tv_decreasing", trail);
    } else {
      skip("tv_decreasing", "needs >=2 snapshots");
    }

    const auto& first = rep.snapshots.front();
    const auto& last = rep.snapshots.back();
    if (!sampler.tree()) {
      skip("obstacle_hit_decay", "baseline");
    } else if (rep.snapshots.size() >= 2) {
      const bool pass = last.obstacle_hit_fraction < 0.02 &&
                        last.obstacle_hit_fraction < first.obstacle_hit_fraction;
      probe(pass, "obstacle_hit_decay",
            "final=" + fss::format_double(last.obstacle_hit_fraction) +
                " first=" + fss::format_double(first.obstacle_hit_fraction) +
                " threshold=0.02");
    } else {
      skip("obstacle_hit_decay", "needs >=2 snapshots");
    }

    if (!sampler.tree()) {
      skip("free_leaf_mass", "baseline");
      skip("obstacle_mixed_leaf_mass", "baseline");
      skip("obstacle_leaf_mass_monotone", "baseline");
    } else if (!exact) {
      skip("free_leaf_mass", "MC-only");
      skip("obstacle_mixed_leaf_mass", "MC-only");
      skip("obstacle_leaf_mass_monotone", "MC-only");
    } else {
      const double lambda_free = rep.free_space_measure;
      probe(std::abs(last.free_mass - lambda_free) <= 0.05 * lambda_free,
            "free_leaf_mass",
            fss::format_double(last.free_mass) + " within 5% of " +
                fss::format_double(lambda_free));
      const double om = last.obstacle_mass + last.mixed_mass;
      probe(om < 0.02 * domain_measure, "obstacle_mixed_leaf_mass",
            fss::format_double(om) + " < " +
                fss::format_double(0.02 * domain_measure));
      probe(rep.obstacle_mass_increases == 0, "obstacle_leaf_mass_monotone",
            "increases=" + std::to_string(rep.obstacle_mass_increases));
    }
  }

  fss::write_text_file((dir / "probes.txt").string(), probes);
  std::cout << probes;
  std::cout << "report: " << (dir / "convergence.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive free-space sampler"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* sample = app.add_subcommand("sample", "draw samples to CSV");
  CLI::App* density =
      app.add_subcommand("density", "export per-snapshot density CSV + PGM");
  CLI::App* bench =
      app.add_subcommand("bench", "compare adaptive vs rejection cost");
  CLI::App* classify =
      app.add_subcommand("classify", "convergence report and probes");
  add_options(*sample, cfg, {.sampler = true});
  add_options(*density, cfg, {.sampler = true, .grid = true, .snapshots = true});
  add_options(*bench, cfg, {});
  add_options(*classify, cfg,
              {.sampler = true, .grid = true, .snapshots = true});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) {
      if (cfg.samples == 0) throw ConfigError("sample requires --samples");
      return cmd_sample(cfg);
    }
    if (density->parsed()) return cmd_density(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
    return cmd_classify(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fss::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fss::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fss::BudgetExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
}
