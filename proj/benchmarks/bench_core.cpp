#include <benchmark/benchmark.h>

#include <numbers>

#include "cqed/protocol.hpp"

using namespace cqed;

namespace {

PureState sample_state() {
  PureState s;
  for (int j = 0; j < kDim; ++j) s[j] = Complex{std::cos(0.37 * j), std::sin(0.11 * j)};
  return s.normalized();
}

void BM_EmbedAtomCavity(benchmark::State& st) {
  AtomCavityMatrix m = AtomCavityMatrix::Identity();
  m(3, 4) = 0.5;
  for (auto _ : st) benchmark::DoNotOptimize(embed_atom_cavity_op(2, 1, m));
}
BENCHMARK(BM_EmbedAtomCavity);

void BM_JCApply(benchmark::State& st) {
  const PureState psi = sample_state();
  const dynamics::JCPulse p{.atom = 1, .cavity = 2, .rabi_angle = std::numbers::pi};
  for (auto _ : st) benchmark::DoNotOptimize(dynamics::jc_apply(psi, p));
}
BENCHMARK(BM_JCApply);

void BM_JCEnvelope(benchmark::State& st) {
  const PureState psi = sample_state();
  const dynamics::JCPulse p{.atom = 1,
                            .cavity = 2,
                            .rabi_angle = std::numbers::pi,
                            .mode = dynamics::PulseMode::envelope,
                            .duration = 20e-6};
  for (auto _ : st) benchmark::DoNotOptimize(dynamics::jc_apply(psi, p));
}
BENCHMARK(BM_JCEnvelope)->Unit(benchmark::kMillisecond);

void BM_DecayInterval(benchmark::State& st) {
  trajectory::NoiseConfig noise;
  noise.t_cav = 0.1;
  noise.t_atom = 0.03;
  const auto channels = trajectory::build_jump_channels(noise);
  const PureState psi = sample_state();
  trajectory::Rng rng(1);
  for (auto _ : st) benchmark::DoNotOptimize(trajectory::decay_interval(psi, 20e-6, channels, rng));
}
BENCHMARK(BM_DecayInterval);

void BM_SingleTrajectory(benchmark::State& st) {
  auto cfg = protocol::ProtocolConfig::from_alpha_sq(0.7);
  cfg.noise.phi_max = 6.0;
  cfg.noise.t_cav = 0.1;
  cfg.noise.t_atom = 0.03;
  const auto schedule = protocol::build_schedule(cfg);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(trajectory::run_trajectory(schedule, cfg.noise, ++seed));
}
BENCHMARK(BM_SingleTrajectory)->Unit(benchmark::kMicrosecond);

void BM_Ensemble(benchmark::State& st) {
  auto cfg = protocol::ProtocolConfig::from_alpha_sq(0.7);
  cfg.noise.phi_max = 6.0;
  cfg.noise.t_cav = 0.1;
  cfg.noise.t_atom = 0.03;
  protocol::RunOptions opts;
  opts.n_traj = static_cast<std::size_t>(st.range(0));
  opts.workers = static_cast<unsigned>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(protocol::run_protocol(cfg, opts));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Ensemble)->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
