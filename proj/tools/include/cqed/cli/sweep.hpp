#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cqed/cli/config.hpp"

namespace cqed::cli {

struct ResultRow {
  double phi_max = 0.0;
  double t_cav_ms = 0.0;
  double alpha_sq = 0.0;
  std::size_t n_traj = 0;
  double f_corr = 0.0;
  double f_corr_se = 0.0;
  double f_uncorr = 0.0;
  double f_uncorr_se = 0.0;
  std::array<std::size_t, 4> syndrome_counts{};  // mm, pm, mp, pp
  std::uint64_t seed = 0;  // per-point seed actually used

  // not part of the CSV
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::string version;

  /// Compares every CSV field.
  bool same_values(const ResultRow& other) const noexcept;
};

/// Per-trajectory hook: (grid index, trajectory index, corrected, uncorrected).
using TrajectorySink = std::function<void(std::size_t, std::size_t, const trajectory::TrajectoryRecord&,
                                          const trajectory::TrajectoryRecord&)>;

/// Rows in grid order. Point k runs with seed stream_seed(spec.seed, k).
std::vector<ResultRow> run_sweep(const RunSpec& spec, const TrajectorySink& sink = {});

}  // namespace cqed::cli
