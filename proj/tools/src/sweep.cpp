#include "cqed/cli/sweep.hpp"

#include <chrono>
#include <cmath>

namespace cqed::cli {

bool ResultRow::same_values(const ResultRow& o) const noexcept {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return same(phi_max, o.phi_max) && same(t_cav_ms, o.t_cav_ms) && same(alpha_sq, o.alpha_sq) &&
         n_traj == o.n_traj && same(f_corr, o.f_corr) && same(f_corr_se, o.f_corr_se) &&
         same(f_uncorr, o.f_uncorr) && same(f_uncorr_se, o.f_uncorr_se) &&
         syndrome_counts == o.syndrome_counts && seed == o.seed;
}

std::vector<ResultRow> run_sweep(const RunSpec& spec, const TrajectorySink& sink) {
  spec.validate();
  std::vector<ResultRow> rows;
  rows.reserve(spec.sweep.values.size());
  for (std::size_t k = 0; k < spec.sweep.values.size(); ++k) {
    const protocol::ProtocolConfig cfg = spec.point_config(spec.sweep.values[k]);

    protocol::RunOptions opts;
    opts.n_traj = spec.n_traj;
    opts.seed = trajectory::stream_seed(spec.seed, k);
    opts.workers = spec.workers;
    if (sink) {
      opts.sink = [&sink, k](std::size_t j, const trajectory::TrajectoryRecord& c,
                             const trajectory::TrajectoryRecord& u) { sink(k, j, c, u); };
    }

    const auto t0 = std::chrono::steady_clock::now();
    const trajectory::EnsembleStats st = protocol::run_protocol(cfg, opts);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

    ResultRow r;
    const double v = spec.sweep.values[k];
    r.phi_max = spec.sweep.parameter == SweepParameter::phi_max ? v : spec.phi_max;
    r.t_cav_ms = spec.sweep.parameter == SweepParameter::t_cav ? v : spec.t_cav_ms;
    r.alpha_sq = spec.sweep.parameter == SweepParameter::alpha_sq ? v : spec.alpha_sq;
    r.n_traj = st.n_traj;
    r.f_corr = st.fidelity_corrected;
    r.f_corr_se = st.stderr_corrected;
    r.f_uncorr = st.fidelity_uncorrected;
    r.f_uncorr_se = st.stderr_uncorrected;
    r.syndrome_counts = st.syndrome_counts;
    r.seed = opts.seed;
    r.wall_seconds = wall.count();
    r.master_seed = spec.seed;
    r.version = CQED_VERSION;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cqed::cli
