#include "cqed/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cqed::dynamics {

namespace {

using std::numbers::pi;

void check_resonant(const JCPulse& pulse) {
  if (pulse.detuning != 0.0) {
    throw std::invalid_argument("JC pulse: only resonant pulses (detuning = 0) are supported");
  }
}

void check_envelope(const JCPulse& pulse) {
  if (!(pulse.duration > 0.0)) {
    throw std::invalid_argument("JC pulse: envelope mode needs a positive duration");
  }
  if (!(pulse.envelope.velocity > 0.0) || !(pulse.envelope.waist > 0.0)) {
    throw std::invalid_argument("JC pulse: envelope velocity and waist must be positive");
  }
}

// alpha_n * 16 = -(14 n^2 + 21 n + 7) n^4, exact in 64-bit integers.
long long stark_coefficient_x16(int n) {
  const long long nn = n;
  return -(14 * nn * nn + 21 * nn + 7) * nn * nn * nn * nn;
}

std::pair<int, int> transition_levels(Transition t) {
  return t == Transition::ig ? std::pair{0, 1} : std::pair{1, 2};
}

}  // namespace

// --- Jaynes-Cummings ------------------------------------------------------

LinearOperator jc_unitary(int atom, int cavity, double rabi_angle) {
  const double c = std::cos(rabi_angle / 2.0);
  const double s = std::sin(rabi_angle / 2.0);
  AtomCavityMatrix u = AtomCavityMatrix::Identity();
  // local index = level*2 + n; |e,0> = 4, |g,1> = 3
  u(4, 4) = c;
  u(3, 4) = s;
  u(4, 3) = -s;
  u(3, 3) = c;
  return embed_atom_cavity_op(atom, cavity, u);
}

LinearOperator jc_coupling(int atom, int cavity) {
  AtomCavityMatrix k = AtomCavityMatrix::Zero();
  // (i/2)(a^dag |g><e| - |e><g| a): |e,0> -> (i/2)|g,1>, |g,1> -> -(i/2)|e,0>
  k(3, 4) = Complex{0.0, 0.5};
  k(4, 3) = Complex{0.0, -0.5};
  return embed_atom_cavity_op(atom, cavity, k);
}

double envelope_rate(const JCPulse& pulse, double t) {
  check_envelope(pulse);
  const double v = pulse.envelope.velocity;
  const double w0 = pulse.envelope.waist;
  const double half = pulse.duration / 2.0;
  const double window_integral = w0 * std::sqrt(pi) / v * std::erf(v * half / w0);
  const double x = v * (t - half) / w0;
  return pulse.rabi_angle * std::exp(-x * x) / window_integral;
}

double rabi_angle_from_envelope(double t_int, double omega0, double velocity, double waist) {
  if (!(velocity > 0.0) || !(waist > 0.0)) {
    throw std::invalid_argument("rabi_angle_from_envelope: velocity and waist must be positive");
  }
  const double scale = waist / velocity;
  if (std::isinf(t_int)) return t_int > 0 ? omega0 / 2.0 * scale * std::sqrt(pi) : 0.0;
  // integral_{-inf}^{t} exp(-t'^2/scale^2) dt' = scale*sqrt(pi)/2 * erfc(-t/scale)
  return omega0 / 2.0 * scale * std::sqrt(pi) / 2.0 * std::erfc(-t_int / scale);
}

void integrate_envelope(PureState& psi, const JCPulse& pulse, std::span<const double> damping,
                        const std::function<bool(double, PureState&)>& on_step, int min_steps) {
  check_resonant(pulse);
  check_envelope(pulse);
  if (!damping.empty() && damping.size() != static_cast<std::size_t>(kDim)) {
    throw std::invalid_argument("integrate_envelope: damping must have 324 entries");
  }
  const LinearOperator coupling = jc_coupling(pulse.atom, pulse.cavity);
  const SparseMatrix& k = coupling.matrix();
  const int steps = std::max(2000, min_steps);
  const double h = pulse.duration / steps;

  auto rhs = [&](double t, const StateVector& y) {
    StateVector out = k * y;
    out *= Complex{0.0, -envelope_rate(pulse, t)};
    if (!damping.empty()) {
      for (int j = 0; j < kDim; ++j) out(j) -= damping[static_cast<std::size_t>(j)] * y(j);
    }
    return out;
  };

  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    StateVector& y = psi.amplitudes();
    const StateVector k1 = rhs(t, y);
    const StateVector k2 = rhs(t + h / 2, y + (h / 2) * k1);
    const StateVector k3 = rhs(t + h / 2, y + (h / 2) * k2);
    const StateVector k4 = rhs(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (on_step && on_step(t + h, psi)) return;
  }
}

PureState jc_apply(const PureState& psi, const JCPulse& pulse) {
  check_resonant(pulse);
  if (pulse.mode == PulseMode::envelope) {
    PureState out = psi;
    integrate_envelope(out, pulse, {});
    return out;
  }
  return jc_unitary(pulse.atom, pulse.cavity, pulse.rabi_angle).apply(psi);
}

// --- Ramsey ---------------------------------------------------------------

AtomMatrix ramsey_matrix(const RamseyPulse& pulse) {
  const auto [lo, up] = transition_levels(pulse.transition);
  const double c = std::cos(pulse.area / 2.0);
  const double s = std::sin(pulse.area / 2.0);
  const Complex minus_i{0.0, -1.0};
  AtomMatrix u = AtomMatrix::Identity();
  u(lo, lo) = c;
  u(up, up) = c;
  u(lo, up) = minus_i * s * std::polar(1.0, -pulse.axis_phase);
  u(up, lo) = minus_i * s * std::polar(1.0, pulse.axis_phase);
  return u;
}

PureState ramsey_apply(const PureState& psi, const RamseyPulse& pulse) {
  return embed_atom_op(pulse.atom, ramsey_matrix(pulse)).apply(psi);
}

// --- Stark ----------------------------------------------------------------

double stark_bracket_parabolic(int n, int n1, int abs_m) {
  const double nd = n, n1d = n1, m = abs_m;
  return 7.0 * nd * nd - 6.0 * (m + n1d) * (m + n1d) + 6.0 * n1d * (m - 1.0) + 6.0 * nd * (m + 1.0) -
         1.5 * m + 8.0;
}

double stark_coefficient(int n) {
  if (n < 49 || n > 51) {
    throw std::invalid_argument("stark_coefficient: n must be 49, 50 or 51, got " + std::to_string(n));
  }
  return static_cast<double>(stark_coefficient_x16(n)) / 16.0;
}

double stark_ratio() {
  const long long d_gi = stark_coefficient_x16(50) - stark_coefficient_x16(49);
  const long long d_eg = stark_coefficient_x16(51) - stark_coefficient_x16(50);
  return static_cast<double>(d_gi) / static_cast<double>(d_eg);
}

StarkBetas StarkBetas::normalized() {
  const double unit = static_cast<double>(stark_coefficient_x16(51) - stark_coefficient_x16(50));
  StarkBetas b;
  b.i = static_cast<double>(stark_coefficient_x16(49)) / unit;
  b.g = static_cast<double>(stark_coefficient_x16(50)) / unit;
  // unit e-g difference up to rounding
  b.e = b.g + 1.0;
  return b;
}

PureState stark_kick_apply(const PureState& psi, const StarkKick& kick) {
  std::array<Complex, 3> phase{std::polar(1.0, -kick.phi * kick.betas.i),
                               std::polar(1.0, -kick.phi * kick.betas.g),
                               std::polar(1.0, -kick.phi * kick.betas.e)};
  std::vector<Subsystem> subs;
  subs.reserve(kick.atoms.size());
  for (int a : kick.atoms) subs.push_back(atom_subsystem(a));
  PureState out = psi;
  for (int idx = 0; idx < kDim; ++idx) {
    Complex f{1.0, 0.0};
    for (Subsystem s : subs) f *= phase[static_cast<std::size_t>(digit(idx, s))];
    out[idx] *= f;
  }
  return out;
}

PureState level_phase_apply(const PureState& psi, const LevelPhase& gate) {
  const Subsystem s = atom_subsystem(gate.atom);
  PureState out = psi;
  for (int idx = 0; idx < kDim; ++idx) {
    out[idx] *= std::polar(1.0, gate.phases[static_cast<std::size_t>(digit(idx, s))]);
  }
  return out;
}

PureState apply(const PureState& psi, const Gate& gate) {
  return std::visit(
      [&](const auto& g) -> PureState {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, JCPulse>) return jc_apply(psi, g);
        else if constexpr (std::is_same_v<T, RamseyPulse>) return ramsey_apply(psi, g);
        else if constexpr (std::is_same_v<T, StarkKick>) return stark_kick_apply(psi, g);
        else return level_phase_apply(psi, g);
      },
      gate);
}

LinearOperator gate_operator(const Gate& gate) {
  return std::visit(
      [](const auto& g) -> LinearOperator {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, JCPulse>) {
          check_resonant(g);
          return jc_unitary(g.atom, g.cavity, g.rabi_angle);
        } else if constexpr (std::is_same_v<T, RamseyPulse>) {
          return embed_atom_op(g.atom, ramsey_matrix(g));
        } else {
          SparseMatrix m(kDim, kDim);
          std::vector<Eigen::Triplet<Complex>> diag;
          diag.reserve(kDim);
          const PureState ones = [] {
            PureState s;
            s.amplitudes().setOnes();
            return s;
          }();
          PureState phased;
          if constexpr (std::is_same_v<T, StarkKick>) phased = stark_kick_apply(ones, g);
          else phased = level_phase_apply(ones, g);
          for (int idx = 0; idx < kDim; ++idx) diag.emplace_back(idx, idx, phased[idx]);
          m.setFromTriplets(diag.begin(), diag.end());
          return LinearOperator(std::move(m));
        }
      },
      gate);
}

}  // namespace cqed::dynamics
