#pragma once

// Monte Carlo wave-function engine: free decay under the non-Hermitian
// effective Hamiltonian with quantum jumps, timed gate schedules, seeded
// per-trajectory RNG streams and ensemble statistics.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/hilbert.hpp"

namespace cqed::trajectory {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class PhiMode { shared, independent };

struct NoiseConfig {
  double phi_max = 0.0;  // rad
  PhiMode phi_mode = PhiMode::shared;
  double t_cav = kInfinity;   // s
  double t_atom = kInfinity;  // s, per ladder step e->g and g->i
  dynamics::StarkBetas betas = dynamics::StarkBetas::normalized();

  void validate() const;
};

struct JumpChannel {
  LinearOperator op;  // already scaled by sqrt(rate)
  double rate = 0.0;
  std::string label;
  std::optional<int> atom;  // atomic channels are gated by the atom's Enter event
};

std::vector<JumpChannel> build_jump_channels(const NoiseConfig& cfg);

// --- RNG ------------------------------------------------------------------

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Per-trajectory seed, independent of worker count and scheduling.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Deterministic 64-bit stream with a portable uniform [0,1) draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// --- Schedule -------------------------------------------------------------

struct GateEvent {
  dynamics::Gate gate;
};

/// Stark kick with the trajectory's random phase(s).
struct RandomKickEvent {
  std::vector<int> atoms;
};

/// Projective measurement of each listed atom, in order, onto |+> = (|i>+|g>)/sqrt2
/// versus its complement. Outcome bit k is 1 for "+".
struct MeasureEvent {
  std::vector<int> atoms;
};

/// Gates applied only when feedback is enabled and the last measurement
/// outcome equals `outcome`.
struct FeedbackEvent {
  unsigned outcome = 0;
  std::vector<dynamics::Gate> gates;
};

/// Atom enters the apparatus; its decay channels become active.
struct EnterEvent {
  int atom = 1;
};

using Action = std::variant<GateEvent, RandomKickEvent, MeasureEvent, FeedbackEvent, EnterEvent>;

struct Event {
  double time = 0.0;  // s
  Action action;
  std::string tag;
};

/// Events are processed in order; the state decays freely between
/// consecutive event times and from the last event to total_duration.
struct Schedule {
  PureState initial;
  std::vector<Event> events;
  double total_duration = 0.0;

  /// Throws std::invalid_argument on decreasing times, a total shorter than
  /// the last event, or an envelope pulse overrunning the next event.
  void validate() const;
};

// --- Trajectories ---------------------------------------------------------

struct Jump {
  double time = 0.0;
  std::string channel;
};

struct TrajectoryRecord {
  PureState final_state;
  std::vector<Jump> jumps;
  unsigned outcome = 0;  // last measurement outcome bits
  /// Born probability of every outcome pattern at the last measurement.
  std::vector<double> outcome_probabilities;
  std::vector<double> phi_drawn;  // one entry (shared) or one per atom A1..A4
  std::uint64_t rng_seed = 0;
};

struct RunOptions {
  bool feedback = true;
  /// Called after each event with the (normalized) state.
  std::function<void(const Event&, const PureState&)> observer;
};

/// Free evolution over dt with the norm-threshold jump method. The returned
/// state is normalized. `active` (may be empty = all) masks channels.
PureState decay_interval(const PureState& psi, double dt, const std::vector<JumpChannel>& channels,
                         Rng& rng, std::vector<Jump>* jumps = nullptr, double t0 = 0.0,
                         const std::vector<bool>& active = {});

TrajectoryRecord run_trajectory(const Schedule& schedule, const NoiseConfig& noise, std::uint64_t seed,
                                const RunOptions& options = {});

// --- Ensembles ------------------------------------------------------------

struct EnsembleStats {
  std::size_t n_traj = 0;
  double fidelity_corrected = 0.0;
  double fidelity_uncorrected = 0.0;
  double stderr_corrected = 0.0;
  double stderr_uncorrected = 0.0;
  std::array<std::size_t, 4> syndrome_counts{};  // indexed by outcome bits

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

struct EnsembleOptions {
  std::size_t n_traj = 1000;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  /// Called in trajectory-index order with the paired records.
  std::function<void(std::size_t, const TrajectoryRecord&, const TrajectoryRecord&)> sink;
};

/// Per-trajectory figure of merit in [0, 1] (e.g. a target overlap).
using Overlap = std::function<double(const PureState&)>;

/// sqrt of the mean overlap with a jackknife standard error.
struct FidelityEstimate {
  double fidelity = 0.0;
  double standard_error = 0.0;
};
FidelityEstimate fidelity_from_overlaps(const std::vector<double>& overlaps);

/// Runs every trajectory twice on the same seed, with and without feedback.
EnsembleStats run_ensemble(const Schedule& schedule, const NoiseConfig& noise, const Overlap& overlap,
                           const EnsembleOptions& options);

}  // namespace cqed::trajectory
