#include "cqed/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cqed::trajectory {

namespace {

using dynamics::Gate;
using dynamics::JCPulse;
using dynamics::PulseMode;

bool is_envelope(const Gate& g) {
  const auto* jc = std::get_if<JCPulse>(&g);
  return jc != nullptr && jc->mode == PulseMode::envelope;
}

void check_lifetime(double t, const char* name) {
  if (!(t > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive or infinite");
}

// diag(L^dag L) of a channel; throws if it has off-diagonal entries.
std::vector<double> number_diagonal(const JumpChannel& ch) {
  const SparseMatrix ldl = SparseMatrix(ch.op.matrix().adjoint()) * ch.op.matrix();
  std::vector<double> d(kDim, 0.0);
  for (int k = 0; k < ldl.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(ldl, k); it; ++it) {
      if (it.row() != it.col()) {
        if (std::abs(it.value()) > 1e-14) {
          throw std::invalid_argument("jump channel " + ch.label + ": L^dag L must be diagonal");
        }
        continue;
      }
      d[static_cast<std::size_t>(it.row())] = it.value().real();
    }
  }
  return d;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) c += (sum - t) + x;
    else c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

// Schedule with gate operators and channel diagonals prebuilt; shared
// read-only between workers.
class CompiledSchedule {
 public:
  CompiledSchedule(const Schedule& schedule, const NoiseConfig& noise)
      : schedule_(schedule), noise_(noise), channels_(build_jump_channels(noise)) {
    schedule_.validate();
    noise_.validate();
    for (const auto& ch : channels_) diagonals_.push_back(number_diagonal(ch));
    for (const Event& ev : schedule_.events) {
      std::vector<std::optional<LinearOperator>> ops;
      if (const auto* g = std::get_if<GateEvent>(&ev.action)) {
        ops.push_back(compile(g->gate));
      } else if (const auto* f = std::get_if<FeedbackEvent>(&ev.action)) {
        for (const Gate& gate : f->gates) ops.push_back(compile(gate));
      } else if (const auto* m = std::get_if<MeasureEvent>(&ev.action)) {
        AtomMatrix plus = AtomMatrix::Zero();
        plus.block<2, 2>(0, 0).setConstant(0.5);
        const AtomMatrix minus = AtomMatrix::Identity() - plus;
        for (int atom : m->atoms) {
          ops.push_back(embed_atom_op(atom, plus));
          ops.push_back(embed_atom_op(atom, minus));
        }
      }
      ops_.push_back(std::move(ops));
    }
  }

  TrajectoryRecord run(std::uint64_t seed, const RunOptions& options) const;

 private:
  static std::optional<LinearOperator> compile(const Gate& g) {
    if (std::holds_alternative<JCPulse>(g) || std::holds_alternative<dynamics::RamseyPulse>(g)) {
      if (is_envelope(g)) return std::nullopt;
      return dynamics::gate_operator(g);
    }
    return std::nullopt;  // diagonal gates are applied directly
  }

  std::vector<double> damping(const std::vector<bool>& active) const {
    std::vector<double> d(kDim, 0.0);
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      if (!active[c]) continue;
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += 0.5 * diagonals_[c][k];
    }
    return d;
  }

  void apply_gate(PureState& psi, const Gate& gate, const std::optional<LinearOperator>& op, double t0,
                  const std::vector<bool>& active, Rng& rng, std::vector<Jump>& jumps) const;

  Schedule schedule_;
  NoiseConfig noise_;
  std::vector<JumpChannel> channels_;
  std::vector<std::vector<double>> diagonals_;
  std::vector<std::vector<std::optional<LinearOperator>>> ops_;

};

std::size_t pick_channel(const PureState& psi, const std::vector<JumpChannel>& channels,
                         const std::vector<bool>& active, Rng& rng, PureState& jumped) {
  std::vector<double> weights(channels.size(), 0.0);
  std::vector<PureState> candidates(channels.size());
  double total = 0.0;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (!active.empty() && !active[c]) continue;
    candidates[c] = channels[c].op.apply(psi);
    weights[c] = candidates[c].squared_norm();
    total += weights[c];
  }
  if (!(total > 0.0)) throw std::logic_error("quantum jump requested on a dark state");
  const double r = rng.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = channels.size();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (weights[c] == 0.0) continue;
    chosen = c;
    acc += weights[c];
    if (r < acc) break;
  }
  jumped = candidates[chosen].normalized();
  return chosen;
}

// No-jump evolution under H_eff = -(i/2) sum L^dag L is exactly exponential
// because every L^dag L is diagonal; `gamma` holds its diagonal.
void decay_with_rates(PureState& out, double dt, const std::vector<double>& gamma,
                      const std::vector<JumpChannel>& channels, const std::vector<bool>& active, Rng& rng,
                      std::vector<Jump>& jumps, double t0) {
  if (dt <= 0.0 || std::none_of(gamma.begin(), gamma.end(), [](double g) { return g > 0.0; })) {
    out.normalize();
    return;
  }
  auto survival = [&](double tau) {
    double n = 0.0;
    for (int k = 0; k < kDim; ++k) n += std::norm(out[k]) * std::exp(-gamma[static_cast<std::size_t>(k)] * tau);
    return n;
  };
  auto damp = [&](double tau) {
    for (int k = 0; k < kDim; ++k) out[k] *= std::exp(-0.5 * gamma[static_cast<std::size_t>(k)] * tau);
  };

  double t = 0.0;
  while (true) {
    const double u = rng.uniform();
    const double remaining = dt - t;
    if (survival(remaining) >= u) {
      damp(remaining);
      out.normalize();
      return;
    }
    // survival() is monotone decreasing: bisect for the crossing time.
    double lo = 0.0, hi = remaining;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * remaining; ++it) {
      const double mid = 0.5 * (lo + hi);
      (survival(mid) >= u ? lo : hi) = mid;
    }
    damp(hi);
    PureState jumped;
    const std::size_t c = pick_channel(out, channels, active, rng, jumped);
    jumps.push_back({t0 + t + hi, channels[c].label});
    out = jumped;
    t += hi;
  }
}

void CompiledSchedule::apply_gate(PureState& psi, const Gate& gate, const std::optional<LinearOperator>& op,
                                  double t0, const std::vector<bool>& active, Rng& rng,
                                  std::vector<Jump>& jumps) const {
  if (op) {
    psi = op->apply(psi);
    return;
  }
  if (!is_envelope(gate)) {
    psi = dynamics::apply(psi, gate);
    return;
  }
  // Coupling and decay integrated together; jumps by norm threshold at step
  // resolution.
  const auto& pulse = std::get<JCPulse>(gate);
  const std::vector<double> d = damping(active);
  const bool any_decay = std::any_of(d.begin(), d.end(), [](double x) { return x > 0.0; });
  if (!any_decay) {
    dynamics::integrate_envelope(psi, pulse, {});
    psi.normalize();
    return;
  }
  double threshold = rng.uniform();
  dynamics::integrate_envelope(psi, pulse, d, [&](double t, PureState& state) {
    if (state.squared_norm() < threshold) {
      PureState jumped;
      const std::size_t c = pick_channel(state, channels_, active, rng, jumped);
      jumps.push_back({t0 + t, channels_[c].label});
      state = jumped;
      threshold = rng.uniform();
    }
    return false;
  });
  psi.normalize();
}

TrajectoryRecord CompiledSchedule::run(std::uint64_t seed, const RunOptions& options) const {
  Rng rng(seed);
  TrajectoryRecord rec;
  rec.rng_seed = seed;

  // Random phases are drawn first so every variant sees the same values.
  std::array<double, kNumAtoms> phi{};
  if (noise_.phi_mode == PhiMode::shared) {
    const double p = noise_.phi_max * rng.uniform();
    phi.fill(p);
    rec.phi_drawn = {p};
  } else {
    for (double& p : phi) p = noise_.phi_max * rng.uniform();
    rec.phi_drawn.assign(phi.begin(), phi.end());
  }

  std::vector<bool> active(channels_.size(), false);
  for (std::size_t c = 0; c < channels_.size(); ++c) active[c] = !channels_[c].atom.has_value();

  PureState psi = schedule_.initial.normalized();
  double now = 0.0;
  auto advance = [&](double until) {
    if (until > now) {
      std::vector<double> gamma = damping(active);
      for (double& g : gamma) g *= 2.0;
      decay_with_rates(psi, until - now, gamma, channels_, active, rng, rec.jumps, now);
    }
    now = std::max(now, until);
  };

  for (std::size_t e = 0; e < schedule_.events.size(); ++e) {
    const Event& ev = schedule_.events[e];
    advance(ev.time);
    const auto& ops = ops_[e];
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, GateEvent>) {
            apply_gate(psi, a.gate, ops[0], now, active, rng, rec.jumps);
            if (is_envelope(a.gate)) now += std::get<JCPulse>(a.gate).duration;
          } else if constexpr (std::is_same_v<T, RandomKickEvent>) {
            for (int atom : a.atoms) {
              dynamics::StarkKick kick{{atom}, phi[static_cast<std::size_t>(atom_subsystem(atom))], noise_.betas};
              psi = dynamics::stark_kick_apply(psi, kick);
            }
          } else if constexpr (std::is_same_v<T, MeasureEvent>) {
            // ops holds (P+, P-) per measured atom.
            const std::size_t n = a.atoms.size();
            auto proj = [&](std::size_t k, bool plus) -> const LinearOperator& { return *ops[2 * k + (plus ? 0 : 1)]; };
            rec.outcome_probabilities.assign(std::size_t{1} << n, 0.0);
            for (std::size_t pattern = 0; pattern < rec.outcome_probabilities.size(); ++pattern) {
              PureState b = psi;
              for (std::size_t k = 0; k < n; ++k) b = proj(k, (pattern >> k) & 1U).apply(b);
              rec.outcome_probabilities[pattern] = b.squared_norm();
            }
            // Sequential sampling, atom by atom, as a detector would.
            unsigned outcome = 0;
            for (std::size_t k = 0; k < n; ++k) {
              PureState b = proj(k, true).apply(psi);
              const double p = b.squared_norm() / psi.squared_norm();
              if (rng.uniform() < p) {
                outcome |= 1U << k;
                psi = b.normalized();
              } else {
                psi = proj(k, false).apply(psi).normalized();
              }
            }
            rec.outcome = outcome;
          } else if constexpr (std::is_same_v<T, FeedbackEvent>) {
            if (options.feedback && rec.outcome == a.outcome) {
              for (std::size_t g = 0; g < a.gates.size(); ++g) {
                apply_gate(psi, a.gates[g], ops[g], now, active, rng, rec.jumps);
              }
            }
          } else {
            for (std::size_t c = 0; c < channels_.size(); ++c) {
              if (channels_[c].atom == a.atom) active[c] = true;
            }
          }
        },
        ev.action);
    if (options.observer) options.observer(ev, psi);
  }
  advance(schedule_.total_duration);
  rec.final_state = psi.normalized();
  return rec;
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(phi_max >= 0.0) || std::isinf(phi_max)) throw std::invalid_argument("phi_max must be finite and >= 0");
  check_lifetime(t_cav, "t_cav");
  check_lifetime(t_atom, "t_atom");
}

std::vector<JumpChannel> build_jump_channels(const NoiseConfig& cfg) {
  check_lifetime(cfg.t_cav, "t_cav");
  check_lifetime(cfg.t_atom, "t_atom");
  std::vector<JumpChannel> out;
  if (!std::isinf(cfg.t_cav)) {
    const double rate = 1.0 / cfg.t_cav;
    for (int c = 1; c <= kNumCavities; ++c) {
      out.push_back({std::sqrt(rate) * embed_cavity_op(c, local::annihilation()), rate,
                     "cavity" + std::to_string(c), std::nullopt});
    }
  }
  if (!std::isinf(cfg.t_atom)) {
    const double rate = 1.0 / cfg.t_atom;
    for (int a = 1; a <= kNumAtoms; ++a) {
      const std::string n = std::to_string(a);
      out.push_back({std::sqrt(rate) * embed_atom_op(a, local::transition(Level::g, Level::e)), rate,
                     "atom" + n + ":e->g", a});
      out.push_back({std::sqrt(rate) * embed_atom_op(a, local::transition(Level::i, Level::g)), rate,
                     "atom" + n + ":g->i", a});
    }
  }
  return out;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

void Schedule::validate() const {
  double earliest = 0.0;  // first time the next event may start
  double last = 0.0;
  for (const Event& ev : events) {
    if (!(ev.time >= earliest) || !std::isfinite(ev.time)) {
      throw std::invalid_argument("schedule: event '" + ev.tag + "' starts before the previous event ends");
    }
    earliest = ev.time;
    auto occupy = [&](const Gate& g) {
      if (is_envelope(g)) {
        const double d = std::get<JCPulse>(g).duration;
        if (!(d > 0.0)) throw std::invalid_argument("schedule: envelope pulse needs a positive duration");
        earliest += d;
      }
    };
    if (const auto* g = std::get_if<GateEvent>(&ev.action)) occupy(g->gate);
    if (const auto* f = std::get_if<FeedbackEvent>(&ev.action)) {
      for (const Gate& gate : f->gates) occupy(gate);
    }
    if (const auto* m = std::get_if<MeasureEvent>(&ev.action)) {
      if (m->atoms.empty() || m->atoms.size() > 2) {
        throw std::invalid_argument("schedule: a measurement covers one or two atoms");
      }
    }
    last = earliest;
  }
  if (!(total_duration >= last)) throw std::invalid_argument("schedule: total_duration precedes the last event");
}

PureState decay_interval(const PureState& psi, double dt, const std::vector<JumpChannel>& channels, Rng& rng,
                         std::vector<Jump>* jumps, double t0, const std::vector<bool>& active) {
  if (dt < 0.0) throw std::invalid_argument("decay_interval: dt must be >= 0");
  if (!active.empty() && active.size() != channels.size()) {
    throw std::invalid_argument("decay_interval: mask size does not match channels");
  }
  std::vector<double> gamma(kDim, 0.0);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (!active.empty() && !active[c]) continue;
    const auto d = number_diagonal(channels[c]);
    for (std::size_t k = 0; k < gamma.size(); ++k) gamma[k] += d[k];
  }
  PureState out = psi.normalized();
  std::vector<Jump> local;
  decay_with_rates(out, dt, gamma, channels, active, rng, jumps ? *jumps : local, t0);
  return out;
}

TrajectoryRecord run_trajectory(const Schedule& schedule, const NoiseConfig& noise, std::uint64_t seed,
                                const RunOptions& options) {
  return CompiledSchedule(schedule, noise).run(seed, options);
}

FidelityEstimate fidelity_from_overlaps(const std::vector<double>& overlaps) {
  if (overlaps.empty()) throw std::invalid_argument("fidelity: empty ensemble");
  const auto n = static_cast<double>(overlaps.size());
  CompensatedSum total;
  for (double x : overlaps) total.add(x);
  const double mean = std::clamp(total.value() / n, 0.0, 1.0);
  FidelityEstimate est{std::sqrt(mean), 0.0};
  if (overlaps.size() < 2) return est;

  // Jackknife over leave-one-out means.
  std::vector<double> loo(overlaps.size());
  CompensatedSum loo_sum;
  for (std::size_t j = 0; j < overlaps.size(); ++j) {
    loo[j] = std::sqrt(std::max(0.0, (total.value() - overlaps[j]) / (n - 1.0)));
    loo_sum.add(loo[j]);
  }
  const double loo_mean = loo_sum.value() / n;
  CompensatedSum sq;
  for (double f : loo) sq.add((f - loo_mean) * (f - loo_mean));
  est.standard_error = std::sqrt((n - 1.0) / n * sq.value());
  return est;
}

EnsembleStats run_ensemble(const Schedule& schedule, const NoiseConfig& noise, const Overlap& overlap,
                           const EnsembleOptions& options) {
  if (options.n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  if (!overlap) throw std::invalid_argument("run_ensemble: overlap functional is empty");
  const CompiledSchedule compiled(schedule, noise);
  const std::size_t n = options.n_traj;

  std::vector<double> ov_corr(n), ov_uncorr(n);
  std::vector<unsigned> outcomes(n);
  std::vector<std::optional<std::pair<TrajectoryRecord, TrajectoryRecord>>> kept;
  if (options.sink) kept.resize(n);

  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t j = first; j < n; j += step) {
      const std::uint64_t seed = stream_seed(options.master_seed, j);
      TrajectoryRecord corr = compiled.run(seed, RunOptions{true, {}});
      TrajectoryRecord uncorr = compiled.run(seed, RunOptions{false, {}});
      ov_corr[j] = overlap(corr.final_state);
      ov_uncorr[j] = overlap(uncorr.final_state);
      outcomes[j] = corr.outcome;
      if (options.sink) kept[j].emplace(std::move(corr), std::move(uncorr));
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, n);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EnsembleStats stats;
  stats.n_traj = n;
  const auto fc = fidelity_from_overlaps(ov_corr);
  const auto fu = fidelity_from_overlaps(ov_uncorr);
  stats.fidelity_corrected = fc.fidelity;
  stats.stderr_corrected = fc.standard_error;
  stats.fidelity_uncorrected = fu.fidelity;
  stats.stderr_uncorrected = fu.standard_error;
  for (unsigned o : outcomes) ++stats.syndrome_counts[o & 3U];
  if (options.sink) {
    for (std::size_t j = 0; j < n; ++j) options.sink(j, kept[j]->first, kept[j]->second);
  }
  return stats;
}

}  // namespace cqed::trajectory
