#pragma once

// Three-qubit repetition code in the two-cavity setup: state preparation in
// C1, encoding onto two ancilla atoms, the Stark-noise channel, decoding in
// C2 with the readout atom A4, syndrome measurement and feedback.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/trajectory.hpp"

namespace cqed::protocol {

/// Ancilla outcome pattern for (A2, A3) in the |+-> = (|i> +- |g>)/sqrt2 basis.
struct Syndrome {
  bool a2_plus = false;
  bool a3_plus = false;

  static Syndrome from_bits(unsigned bits) noexcept { return {(bits & 1U) != 0, (bits & 2U) != 0}; }
  unsigned bits() const noexcept { return (a2_plus ? 1U : 0U) | (a3_plus ? 2U : 0U); }
  /// "mm", "pm", "mp" or "pp" (A2 first).
  std::string_view name() const noexcept;

  friend bool operator==(const Syndrome&, const Syndrome&) = default;
};

inline constexpr Syndrome kNoError{false, false};
inline constexpr Syndrome kA1Flip{true, true};

/// Slot layout of the default timeline. Each protocol step occupies one
/// interaction window; `stage_gap` is added between the encoding, channel,
/// decoding and readout stages.
struct ProtocolTiming {
  double window = 20e-6;  // s
  double stage_gap = 0.0;  // s

  /// Stage gaps stretched so the whole protocol lasts 1.2 ms.
  static ProtocolTiming transit();
  void validate() const;
};

/// Deterministic flip injected in place of the random channel.
struct InjectedError {
  std::vector<int> atoms;  // subset of {1, 2, 3}
  double phi = 0.0;
};

struct ProtocolConfig {
  Complex alpha{0.83666002653407556, 0.0};  // sqrt(0.7)
  Complex beta{0.54772255750516607, 0.0};   // sqrt(0.3)
  bool correction_enabled = true;
  trajectory::NoiseConfig noise{};
  ProtocolTiming timing{};
  dynamics::PulseMode gate_mode = dynamics::PulseMode::instantaneous;
  dynamics::GaussianEnvelope envelope{};
  std::optional<InjectedError> injected_error;
  /// Atoms exposed to the random field.
  std::vector<int> noisy_atoms{1, 2, 3};

  /// Real, nonnegative amplitudes (sqrt(alpha_sq), sqrt(1 - alpha_sq)).
  static ProtocolConfig from_alpha_sq(double alpha_sq);
  void validate() const;
};

// --- Protocol steps (noise-free unitary algebra) ----------------------------

/// A1 in |e>, A2 and A3 in |i>, A4 in |g>, both cavities empty.
PureState initial_state();

std::vector<dynamics::Gate> preparation_gates(const ProtocolConfig& cfg);
std::vector<dynamics::Gate> ancilla_ramsey_gates();
std::vector<dynamics::Gate> encoding_cavity_gates();
std::vector<dynamics::Gate> channel_open_gates();
std::vector<dynamics::Gate> channel_close_gates();
std::vector<dynamics::Gate> decoding_gates();
std::vector<dynamics::Gate> feedback_gates();
std::vector<dynamics::Gate> phase_fix_gates();

/// alpha|e_A1,0_C1> + beta|g_A1,1_C1> with A2, A3 in |i>, A4 in |g>.
PureState prepare_qubit(const ProtocolConfig& cfg);
/// Ramsey pi/2 on A2, A3 then 2pi cycles of A2 and A3 in C1.
PureState encode(const PureState& psi);
/// pi/2 on A1, Stark kick on `atoms`, inverse pi/2 on A1.
PureState noisy_channel(const PureState& psi, double phi, std::span<const int> atoms = std::array{1, 2, 3},
                        const dynamics::StarkBetas& betas = dynamics::StarkBetas::normalized());
/// Phase that flips `atom` exactly (A1: pi; ancillas: pi / stark_ratio()).
double flip_phase(int atom);
PureState decode(const PureState& psi);

/// Projector onto one syndrome outcome (unnormalized result).
PureState project_syndrome(const PureState& psi, Syndrome s);
std::array<double, 4> syndrome_probabilities(const PureState& psi);
std::pair<Syndrome, PureState> measure_syndrome(const PureState& psi, trajectory::Rng& rng);

/// Phase-fix 2pi pulse on A4 always; the pi flip on A4 first when
/// correction is enabled and the syndrome flags A1.
PureState correct(const PureState& psi, Syndrome syndrome, bool correction_enabled);

// --- Fidelity ---------------------------------------------------------------

/// Target alpha|0_C1,e_A4> + beta|1_C1,g_A4> in the (C1, A4) basis (index n*3 + level).
Eigen::Vector<Complex, 6> target_vector(Complex alpha, Complex beta);

/// <t| rho_(C1,A4) |t> of a normalized state.
double target_overlap(const PureState& psi, Complex alpha, Complex beta);

/// sqrt of the ensemble-mean target overlap. Throws on an empty ensemble.
double fidelity(std::span<const PureState> finals, const ProtocolConfig& cfg);

// --- Schedules ----------------------------------------------------------------

trajectory::Schedule build_schedule(const ProtocolConfig& cfg);

struct RunOptions {
  std::size_t n_traj = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::function<void(std::size_t, const trajectory::TrajectoryRecord&, const trajectory::TrajectoryRecord&)> sink;
};

/// Paired corrected/uncorrected ensembles on identical seeds and phase
/// draws. With correction disabled both variants skip the feedback.
trajectory::EnsembleStats run_protocol(const ProtocolConfig& cfg, const RunOptions& options);

}  // namespace cqed::protocol
