#pragma once

// Unitary primitives: resonant Jaynes-Cummings pulses, classical Ramsey
// pulses and quadratic-Stark phase kicks.

#include <array>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed::dynamics {

enum class PulseMode { instantaneous, envelope };

/// Gaussian mode profile crossed at constant velocity.
struct GaussianEnvelope {
  double velocity = 500.0;  // m/s
  double waist = 6e-3;      // m
};

struct JCPulse {
  int atom = 1;
  int cavity = 1;
  double rabi_angle = 0.0;  // accumulated angle; |e,0> -> cos(angle/2)|e,0> + sin(angle/2)|g,1>
  double detuning = 0.0;    // rad/s, only 0 is supported
  PulseMode mode = PulseMode::instantaneous;
  double duration = 0.0;  // s, envelope mode only
  GaussianEnvelope envelope{};
};

enum class Transition { ig, ge };

/// exp(-i (area/2)(cos(axis) X + sin(axis) Y)) on the (lower, upper) pair of
/// the transition; identity on the third level. axis = pi/2 is the real
/// rotation lower -> cos*lower + sin*upper.
struct RamseyPulse {
  int atom = 1;
  Transition transition = Transition::ig;
  double area = 0.0;
  double axis_phase = 0.0;
};

/// Per-level Stark coefficients in units of (alpha_51 - alpha_50).
struct StarkBetas {
  double i = 0.0;
  double g = 0.0;
  double e = 1.0;

  static StarkBetas normalized();
  double of(Level l) const noexcept { return l == Level::i ? i : (l == Level::g ? g : e); }
};

/// Multiplies level k of every listed atom by exp(-i phi beta_k).
struct StarkKick {
  std::vector<int> atoms;
  double phi = 0.0;
  StarkBetas betas = StarkBetas::normalized();
};

/// Multiplies level k of one atom by exp(i phases[k]).
struct LevelPhase {
  int atom = 1;
  std::array<double, 3> phases{0.0, 0.0, 0.0};
};

using Gate = std::variant<JCPulse, RamseyPulse, StarkKick, LevelPhase>;

// --- Jaynes-Cummings ------------------------------------------------------

/// Exact block rotation for an instantaneous resonant pulse.
PureState jc_apply(const PureState& psi, const JCPulse& pulse);

LinearOperator jc_unitary(int atom, int cavity, double rabi_angle);

/// Coupling generator K with H(t) = Omega(t) K, K = (i/2)(a^dag |g><e| - |e><g| a).
LinearOperator jc_coupling(int atom, int cavity);

/// Instantaneous coupling rate Omega(t) for t in [0, duration]; the Gaussian is
/// centred on the window and scaled so its integral over the window equals
/// the pulse's rabi_angle.
double envelope_rate(const JCPulse& pulse, double t);

/// (Omega0/2) * integral_{-inf}^{t_int} exp(-v^2 t^2 / w0^2) dt.
double rabi_angle_from_envelope(double t_int, double omega0, double velocity, double waist);

/// Fixed-step RK4 over the pulse window of d psi/dt = -i (Omega(t) K - i D) psi,
/// with D = diag(damping) (empty = no damping). Steps = max(2000, min_steps).
/// `on_step(t_end_of_step, psi)` may modify psi; returning true stops early.
void integrate_envelope(PureState& psi, const JCPulse& pulse, std::span<const double> damping,
                        const std::function<bool(double, PureState&)>& on_step = {},
                        int min_steps = 2000);

// --- Ramsey ---------------------------------------------------------------

AtomMatrix ramsey_matrix(const RamseyPulse& pulse);
PureState ramsey_apply(const PureState& psi, const RamseyPulse& pulse);

// --- Stark ----------------------------------------------------------------

/// Bracket of the second-order Stark shift in parabolic quantum numbers,
/// so that Delta E = -(1/8) * bracket * n^4 |E|^2 (atomic units).
double stark_bracket_parabolic(int n, int n1, int abs_m);

/// Unnormalized circular-state coefficient alpha_n (a.u. per |E|^2), n in {49, 50, 51}.
double stark_coefficient(int n);

/// (alpha_50 - alpha_49) / (alpha_51 - alpha_50): the i-g phase per unit e-g phase.
double stark_ratio();

PureState stark_kick_apply(const PureState& psi, const StarkKick& kick);
PureState level_phase_apply(const PureState& psi, const LevelPhase& gate);

/// Applies any gate in instantaneous form.
PureState apply(const PureState& psi, const Gate& gate);

/// Unitary operator of a gate (envelope JC pulses use their exact angle).
LinearOperator gate_operator(const Gate& gate);

}  // namespace cqed::dynamics
