#include "cqed/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqed::protocol {

namespace {

using dynamics::Gate;
using dynamics::JCPulse;
using dynamics::RamseyPulse;
using dynamics::Transition;
using std::numbers::pi;

constexpr double kNormTol = 1e-12;

PureState apply_all(PureState psi, const std::vector<Gate>& gates) {
  for (const Gate& g : gates) psi = dynamics::apply(psi, g);
  return psi;
}

const LinearOperator& plus_projector(int atom) {
  static const std::array<LinearOperator, 2> ops = [] {
    AtomMatrix plus = AtomMatrix::Zero();
    plus.block<2, 2>(0, 0).setConstant(0.5);
    return std::array<LinearOperator, 2>{embed_atom_op(2, plus), embed_atom_op(3, plus)};
  }();
  return ops[static_cast<std::size_t>(atom - 2)];
}

PureState project(const PureState& psi, int atom, bool plus) {
  PureState p = plus_projector(atom).apply(psi);
  if (plus) return p;
  PureState rest = psi;
  rest.amplitudes() -= p.amplitudes();
  return rest;
}

}  // namespace

std::string_view Syndrome::name() const noexcept {
  static constexpr std::array<std::string_view, 4> names{"mm", "pm", "mp", "pp"};
  return names[bits()];
}

ProtocolTiming ProtocolTiming::transit() {
  ProtocolTiming t;
  t.stage_gap = (1.2e-3 - 8 * t.window) / 3.0;
  return t;
}

void ProtocolTiming::validate() const {
  if (!(window > 0.0) || !std::isfinite(window)) throw std::invalid_argument("timing: window must be positive");
  if (!(stage_gap >= 0.0) || !std::isfinite(stage_gap)) throw std::invalid_argument("timing: stage_gap must be >= 0");
}

ProtocolConfig ProtocolConfig::from_alpha_sq(double alpha_sq) {
  if (!(alpha_sq >= 0.0 && alpha_sq <= 1.0)) {
    throw std::invalid_argument("alpha_sq must lie in [0, 1]");
  }
  ProtocolConfig cfg;
  cfg.alpha = std::sqrt(alpha_sq);
  cfg.beta = std::sqrt(1.0 - alpha_sq);
  return cfg;
}

void ProtocolConfig::validate() const {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol) {
    throw std::invalid_argument("|alpha|^2 + |beta|^2 must equal 1");
  }
  noise.validate();
  timing.validate();
  if (gate_mode == dynamics::PulseMode::envelope &&
      (!(envelope.velocity > 0.0) || !(envelope.waist > 0.0))) {
    throw std::invalid_argument("envelope velocity and waist must be positive");
  }
  for (int a : noisy_atoms) {
    if (a < 1 || a > 3) throw std::invalid_argument("noisy atoms must be among A1, A2, A3");
  }
  if (injected_error) {
    for (int a : injected_error->atoms) {
      if (a < 1 || a > 3) throw std::invalid_argument("injected errors must target A1, A2 or A3");
    }
  }
}

PureState initial_state() {
  BasisLabel l;
  l.atoms = {Level::e, Level::i, Level::i, Level::g};
  return PureState::basis(l);
}

std::vector<Gate> preparation_gates(const ProtocolConfig& cfg) {
  std::vector<Gate> gates;
  const double angle = 2.0 * std::atan2(std::abs(cfg.beta), std::abs(cfg.alpha));
  if (angle != 0.0) gates.push_back(JCPulse{.atom = 1, .cavity = 1, .rabi_angle = angle});
  const double pe = std::abs(cfg.alpha) > 0.0 ? std::arg(cfg.alpha) : 0.0;
  const double pg = std::abs(cfg.beta) > 0.0 ? std::arg(cfg.beta) : 0.0;
  if (pe != 0.0 || pg != 0.0) gates.push_back(dynamics::LevelPhase{1, {0.0, pg, pe}});
  return gates;
}

std::vector<Gate> ancilla_ramsey_gates() {
  return {RamseyPulse{2, Transition::ig, pi / 2, pi / 2}, RamseyPulse{3, Transition::ig, pi / 2, pi / 2}};
}

std::vector<Gate> encoding_cavity_gates() {
  return {JCPulse{.atom = 2, .cavity = 1, .rabi_angle = 2 * pi}, JCPulse{.atom = 3, .cavity = 1, .rabi_angle = 2 * pi}};
}

// e -> (g+e)/sqrt2, g -> (g-e)/sqrt2
std::vector<Gate> channel_open_gates() { return {RamseyPulse{1, Transition::ge, pi / 2, -pi / 2}}; }

std::vector<Gate> channel_close_gates() { return {RamseyPulse{1, Transition::ge, pi / 2, pi / 2}}; }

std::vector<Gate> decoding_gates() {
  return {JCPulse{.atom = 1, .cavity = 2, .rabi_angle = pi}, JCPulse{.atom = 2, .cavity = 2, .rabi_angle = 2 * pi},
          JCPulse{.atom = 3, .cavity = 2, .rabi_angle = 2 * pi}, JCPulse{.atom = 4, .cavity = 2, .rabi_angle = pi}};
}

std::vector<Gate> feedback_gates() { return {RamseyPulse{4, Transition::ge, pi, 0.0}}; }

std::vector<Gate> phase_fix_gates() { return {RamseyPulse{4, Transition::ig, 2 * pi, 0.0}}; }

PureState prepare_qubit(const ProtocolConfig& cfg) {
  if (std::abs(std::norm(cfg.alpha) + std::norm(cfg.beta) - 1.0) > kNormTol) {
    throw std::invalid_argument("prepare_qubit: |alpha|^2 + |beta|^2 must equal 1");
  }
  return apply_all(initial_state(), preparation_gates(cfg));
}

PureState encode(const PureState& psi) {
  return apply_all(apply_all(psi, ancilla_ramsey_gates()), encoding_cavity_gates());
}

PureState noisy_channel(const PureState& psi, double phi, std::span<const int> atoms,
                        const dynamics::StarkBetas& betas) {
  if (phi < 0.0) throw std::invalid_argument("noisy_channel: phi must be >= 0");
  PureState out = apply_all(psi, channel_open_gates());
  out = dynamics::stark_kick_apply(out, {std::vector<int>(atoms.begin(), atoms.end()), phi, betas});
  return apply_all(out, channel_close_gates());
}

double flip_phase(int atom) {
  if (atom == 1) return pi;
  if (atom == 2 || atom == 3) return pi / dynamics::stark_ratio();
  throw std::invalid_argument("flip_phase: atom must be 1, 2 or 3");
}

PureState decode(const PureState& psi) { return apply_all(psi, decoding_gates()); }

PureState project_syndrome(const PureState& psi, Syndrome s) {
  return project(project(psi, 2, s.a2_plus), 3, s.a3_plus);
}

std::array<double, 4> syndrome_probabilities(const PureState& psi) {
  std::array<double, 4> p{};
  const double n = psi.squared_norm();
  for (unsigned b = 0; b < 4; ++b) p[b] = project_syndrome(psi, Syndrome::from_bits(b)).squared_norm() / n;
  return p;
}

std::pair<Syndrome, PureState> measure_syndrome(const PureState& psi, trajectory::Rng& rng) {
  Syndrome s;
  PureState cur = psi.normalized();
  for (int atom : {2, 3}) {
    PureState plus = project(cur, atom, true);
    const bool is_plus = rng.uniform() < plus.squared_norm();
    (atom == 2 ? s.a2_plus : s.a3_plus) = is_plus;
    cur = is_plus ? plus.normalized() : project(cur, atom, false).normalized();
  }
  return {s, cur};
}

PureState correct(const PureState& psi, Syndrome syndrome, bool correction_enabled) {
  PureState out = psi;
  if (correction_enabled && syndrome == kA1Flip) out = apply_all(out, feedback_gates());
  return apply_all(out, phase_fix_gates());
}

Eigen::Vector<Complex, 6> target_vector(Complex alpha, Complex beta) {
  Eigen::Vector<Complex, 6> t = Eigen::Vector<Complex, 6>::Zero();
  t(0 * 3 + static_cast<int>(Level::e)) = alpha;
  t(1 * 3 + static_cast<int>(Level::g)) = beta;
  return t;
}

double target_overlap(const PureState& psi, Complex alpha, Complex beta) {
  static constexpr std::array keep{Subsystem::C1, Subsystem::A4};
  const Eigen::MatrixXcd rho = reduced_density(psi, keep);
  const Eigen::Vector<Complex, 6> t = target_vector(alpha, beta);
  return std::clamp((t.adjoint() * rho * t)(0, 0).real(), 0.0, 1.0);
}

double fidelity(std::span<const PureState> finals, const ProtocolConfig& cfg) {
  if (finals.empty()) throw std::invalid_argument("fidelity: empty ensemble");
  std::vector<double> overlaps;
  overlaps.reserve(finals.size());
  for (const PureState& f : finals) overlaps.push_back(target_overlap(f.normalized(), cfg.alpha, cfg.beta));
  return trajectory::fidelity_from_overlaps(overlaps).fidelity;
}

trajectory::Schedule build_schedule(const ProtocolConfig& cfg) {
  cfg.validate();
  using namespace trajectory;
  Schedule s;
  s.initial = initial_state();
  const double w = cfg.timing.window;
  const double gap = cfg.timing.stage_gap;
  // slot -> start time; stages: encoding 0-2, channel 3, decoding 4-7, readout 8
  auto at = [&](int slot) {
    const int stage = slot <= 2 ? 0 : slot == 3 ? 1 : slot <= 7 ? 2 : 3;
    return slot * w + stage * gap;
  };
  auto shaped = [&](Gate g) {
    if (auto* jc = std::get_if<JCPulse>(&g); jc && cfg.gate_mode == dynamics::PulseMode::envelope) {
      jc->mode = dynamics::PulseMode::envelope;
      jc->duration = w;
      jc->envelope = cfg.envelope;
    }
    return g;
  };
  auto gate = [&](int slot, Gate g, std::string tag) {
    s.events.push_back({at(slot), GateEvent{shaped(std::move(g))}, std::move(tag)});
  };

  for (int a : {1, 2, 3}) s.events.push_back({at(0), EnterEvent{a}, "enter A" + std::to_string(a)});
  for (const Gate& g : ancilla_ramsey_gates()) gate(0, g, "R1");
  for (const Gate& g : preparation_gates(cfg)) gate(0, g, "prepare");
  const auto enc = encoding_cavity_gates();
  gate(1, enc[0], "A2-C1");
  gate(2, enc[1], "A3-C1");

  s.events.push_back({at(3), EnterEvent{4}, "enter A4"});
  for (const Gate& g : channel_open_gates()) gate(3, g, "R2 open");
  if (cfg.injected_error) {
    gate(3, dynamics::StarkKick{cfg.injected_error->atoms, cfg.injected_error->phi, cfg.noise.betas}, "R2 kick");
  } else {
    s.events.push_back({at(3), RandomKickEvent{cfg.noisy_atoms}, "R2 kick"});
  }
  for (const Gate& g : channel_close_gates()) gate(3, g, "R2 close");

  const auto dec = decoding_gates();
  gate(4, dec[0], "A1-C2");
  gate(5, dec[1], "A2-C2");
  gate(6, dec[2], "A3-C2");
  s.events.push_back({at(7), MeasureEvent{{2, 3}}, "measure"});
  gate(7, dec[3], "A4-C2");

  if (cfg.correction_enabled) {
    s.events.push_back({at(8), FeedbackEvent{kA1Flip.bits(), feedback_gates()}, "R3 feedback"});
  }
  for (const Gate& g : phase_fix_gates()) gate(8, g, "R3 phase");
  s.total_duration = at(8);
  return s;
}

trajectory::EnsembleStats run_protocol(const ProtocolConfig& cfg, const RunOptions& options) {
  const trajectory::Schedule schedule = build_schedule(cfg);
  const Complex alpha = cfg.alpha, beta = cfg.beta;
  trajectory::EnsembleOptions eo;
  eo.n_traj = options.n_traj;
  eo.master_seed = options.seed;
  eo.workers = options.workers;
  eo.sink = options.sink;
  return trajectory::run_ensemble(
      schedule, cfg.noise, [alpha, beta](const PureState& psi) { return target_overlap(psi, alpha, beta); }, eo);
}

}  // namespace cqed::protocol
