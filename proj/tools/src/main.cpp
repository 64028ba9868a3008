// qecc_sim: batch runner for the two-cavity three-qubit correction protocol.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqed/analytic.hpp"
#include "cqed/cli/config.hpp"
#include "cqed/cli/output.hpp"
#include "cqed/cli/sweep.hpp"

namespace {

using namespace cqed;

std::uint64_t parse_seed(const std::string& s, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') {
    throw std::invalid_argument(std::string(what) + ": not a nonnegative integer: '" + s + "'");
  }
  return v;
}

nlohmann::json jumps_json(const std::vector<trajectory::Jump>& jumps) {
  auto arr = nlohmann::json::array();
  for (const auto& j : jumps) arr.push_back({{"t", j.time}, {"channel", j.channel}});
  return arr;
}

std::vector<analytic::ModelPoint> overlay_grid(double phi_stop, std::size_t count) {
  return analytic::model_grid(phi_stop, count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-trajectory simulation of three-qubit error correction in two microwave cavities"};
  app.set_version_flag("--version", CQED_VERSION);

  std::string config_path, out_path, plot_path, log_path;
  std::optional<std::string> seed_arg;
  std::optional<unsigned> workers;
  bool no_correction = false, analytic_only = false;
  std::size_t analytic_points = 201;

  app.add_option("--config", config_path, "INI config file (defaults used when omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
  app.add_option("--plot", plot_path, "SVG plot path");
  app.add_option("--seed", seed_arg, "master seed (overrides QECC_SEED and the config)");
  app.add_option("--workers", workers, "worker threads per ensemble")->check(CLI::Range(1u, 4096u));
  app.add_flag("--no-correction", no_correction, "skip the feedback pulse in both variants");
  app.add_flag("--analytic-only", analytic_only, "emit the simple-model grid (phi_max,f_nofb_ave,f_fb_ave)");
  app.add_option("--analytic-points", analytic_points, "grid size for --analytic-only and plot overlays")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  app.add_option("--trajectory-log", log_path, "JSON-lines record of every trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cli::RunSpec spec = config_path.empty() ? cli::parse_config("") : cli::load_config(config_path);
    if (const char* env = std::getenv("QECC_SEED"); env && *env) spec.seed = parse_seed(env, "QECC_SEED");
    if (seed_arg) spec.seed = parse_seed(*seed_arg, "--seed");
    if (workers) spec.workers = *workers;
    if (no_correction) spec.correction = false;
    spec.validate();

    const bool phi_sweep = spec.sweep.parameter == cli::SweepParameter::phi_max;
    double phi_stop = 4 * std::numbers::pi;
    if (phi_sweep) {
      const double top = *std::max_element(spec.sweep.values.begin(), spec.sweep.values.end());
      if (top > 0.0) phi_stop = top;
    }

    if (analytic_only) {
      const auto grid = overlay_grid(phi_stop, analytic_points);
      if (out_path.empty()) {
        cli::emit_analytic_csv(grid, std::cout);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
        cli::emit_analytic_csv(grid, out);
        if (!out.flush()) throw std::runtime_error("write to '" + out_path + "' failed");
      }
      if (!plot_path.empty()) cli::write_analytic_plot(grid, plot_path);
      return 0;
    }

    std::ofstream log;
    cli::TrajectorySink sink;
    if (!log_path.empty()) {
      log.open(log_path, std::ios::binary);
      if (!log) throw std::runtime_error("cannot open '" + log_path + "' for writing");
      sink = [&log](std::size_t point, std::size_t j, const trajectory::TrajectoryRecord& c,
                    const trajectory::TrajectoryRecord& u) {
        nlohmann::json rec{{"point", point},
                           {"trajectory", j},
                           {"seed", c.rng_seed},
                           {"phi", c.phi_drawn},
                           {"syndrome", protocol::Syndrome::from_bits(c.outcome).name()},
                           {"outcome_probabilities", c.outcome_probabilities},
                           {"jumps_corrected", jumps_json(c.jumps)},
                           {"jumps_uncorrected", jumps_json(u.jumps)}};
        log << rec.dump() << '\n';
      };
    }

    const auto rows = cli::run_sweep(spec, sink);
    if (log.is_open() && !log.flush()) throw std::runtime_error("write to '" + log_path + "' failed");

    for (const auto& r : rows) {
      std::cerr << "phi_max=" << r.phi_max << " t_cav_ms=" << r.t_cav_ms << " alpha_sq=" << r.alpha_sq
                << "  F_corr=" << r.f_corr << " F_uncorr=" << r.f_uncorr << "  (" << r.wall_seconds << " s)\n";
    }

    if (out_path.empty()) cli::emit_csv(rows, std::cout);
    else cli::write_csv(rows, out_path);

    if (!plot_path.empty()) {
      const auto overlay = phi_sweep ? overlay_grid(phi_stop, analytic_points) : std::vector<analytic::ModelPoint>{};
      cli::write_plot(rows, spec.sweep.parameter, overlay, plot_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "qecc_sim: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
