#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <numbers>
#include <random>

#include "cqed/dynamics.hpp"
#include "fixtures.hpp"

using namespace cqed;
using namespace cqed::dynamics;
using namespace cqed::testing;
using std::numbers::pi;

namespace {

BasisLabel label(Level a1, Level a2, Level a3, Level a4, int n1, int n2) {
  BasisLabel l;
  l.atoms = {a1, a2, a3, a4};
  l.photons = {n1, n2};
  return l;
}

PureState ket(Level a1, Level a2, Level a3, Level a4, int n1, int n2) {
  return PureState::basis(label(a1, a2, a3, a4, n1, n2));
}

std::vector<Gate> sample_gates() {
  return {JCPulse{.atom = 1, .cavity = 1, .rabi_angle = 0.7},
          JCPulse{.atom = 4, .cavity = 2, .rabi_angle = pi},
          RamseyPulse{2, Transition::ig, pi / 2, pi / 2},
          RamseyPulse{4, Transition::ge, pi, 0.3},
          StarkKick{{1, 2, 3}, 2.2},
          LevelPhase{3, {0.1, -0.4, 1.3}}};
}

}  // namespace

// --- Jaynes-Cummings ------------------------------------------------------

TEST(JC, PiPulseTransfersExcitation) {
  const PureState out = jc_apply(ket(Level::e, Level::i, Level::i, Level::g, 0, 0), {.rabi_angle = pi});
  EXPECT_LT(max_distance(out, ket(Level::g, Level::i, Level::i, Level::g, 1, 0)), 1e-15);
}

TEST(JC, TwoPiCycleFlipsSign) {
  const PureState in = ket(Level::e, Level::g, Level::i, Level::g, 1, 0);
  const PureState out = jc_apply(in, {.atom = 2, .cavity = 1, .rabi_angle = 2 * pi});
  EXPECT_LT(max_distance(out, -1.0 * in), 1e-15);
}

TEST(JC, PiPulseFromPhotonSideGivesMinus) {
  const PureState out =
      jc_apply(ket(Level::g, Level::i, Level::i, Level::g, 0, 1), {.atom = 4, .cavity = 2, .rabi_angle = pi});
  EXPECT_LT(max_distance(out, -1.0 * ket(Level::g, Level::i, Level::i, Level::e, 0, 0)), 1e-15);
}

TEST(JC, GeneralAngleRotation) {
  const double th = 1.234;
  const PureState out = jc_apply(ket(Level::e, Level::i, Level::i, Level::g, 0, 0), {.rabi_angle = th});
  EXPECT_NEAR(out[label(Level::e, Level::i, Level::i, Level::g, 0, 0)].real(), std::cos(th / 2), 1e-15);
  EXPECT_NEAR(out[label(Level::g, Level::i, Level::i, Level::g, 1, 0)].real(), std::sin(th / 2), 1e-15);
}

TEST(JC, SpectatorStatesUntouched) {
  for (auto [lvl, n] : {std::pair{Level::i, 0}, {Level::i, 1}, {Level::g, 0}, {Level::e, 1}}) {
    const PureState in = ket(Level::i, lvl, Level::i, Level::g, 1, n);
    const PureState out = jc_apply(in, {.atom = 2, .cavity = 2, .rabi_angle = 1.1});
    EXPECT_LT(max_distance(out, in), 1e-15);
  }
}

TEST(JC, AnglesCompose) {
  std::mt19937_64 rng(21);
  const PureState psi = random_state(rng);
  const JCPulse a{.atom = 3, .cavity = 2, .rabi_angle = 0.8}, b{.atom = 3, .cavity = 2, .rabi_angle = 2.9};
  const PureState lhs = jc_apply(jc_apply(psi, a), b);
  const PureState rhs = jc_apply(psi, {.atom = 3, .cavity = 2, .rabi_angle = 3.7});
  EXPECT_LT(max_distance(lhs, rhs), 1e-12);
}

TEST(JC, TwoPiOperatorIsSignedDiagonal) {
  const SparseMatrix u = jc_unitary(2, 1, 2 * pi).matrix();
  for (int k = 0; k < kDim; ++k) {
    const int lvl = digit(k, Subsystem::A2), n = digit(k, Subsystem::C1);
    const bool in_block = (lvl == 2 && n == 0) || (lvl == 1 && n == 1);
    EXPECT_NEAR(u.coeff(k, k).real(), in_block ? -1.0 : 1.0, 1e-15);
  }
  EXPECT_NEAR(SparseMatrix(u).cwiseAbs().sum(), 324.0, 1e-12);
}

TEST(JC, DetuningRejected) {
  const PureState psi = PureState::basis(0);
  EXPECT_THROW(jc_apply(psi, {.rabi_angle = pi, .detuning = 1.0}), std::invalid_argument);
}

TEST(JC, EnvelopeNeedsPositiveDuration) {
  const PureState psi = ket(Level::e, Level::i, Level::i, Level::g, 0, 0);
  JCPulse p{.rabi_angle = pi, .mode = PulseMode::envelope, .duration = 0.0};
  EXPECT_THROW(jc_apply(psi, p), std::invalid_argument);
  p.duration = -1e-6;
  EXPECT_THROW(jc_apply(psi, p), std::invalid_argument);
}

TEST(JC, EnvelopeMatchesInstantaneous) {
  std::mt19937_64 rng(23);
  const PureState psi = random_state(rng);
  for (double th : {pi / 2, pi, 2 * pi, 1.3}) {
    for (double duration : {20e-6, 200e-6}) {
      JCPulse env{.atom = 1, .cavity = 2, .rabi_angle = th, .mode = PulseMode::envelope, .duration = duration};
      JCPulse inst{.atom = 1, .cavity = 2, .rabi_angle = th};
      EXPECT_LT(max_distance(jc_apply(psi, env), jc_apply(psi, inst)), 1e-8) << th << " " << duration;
    }
  }
}

TEST(JC, EnvelopeRateIntegratesToAngle) {
  const JCPulse p{.rabi_angle = pi, .mode = PulseMode::envelope, .duration = 30e-6};
  boost::math::quadrature::tanh_sinh<double> ts;
  const double area = ts.integrate([&](double t) { return envelope_rate(p, t); }, 0.0, p.duration);
  EXPECT_NEAR(area, pi, 1e-10);
}

TEST(RabiEnvelope, ClosedFormAgainstQuadrature) {
  const double v = 500.0, w0 = 6e-3, omega0 = 3.1e5;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [&](double t) { return std::exp(-v * v * t * t / (w0 * w0)); };
  for (double t_int : {-20e-6, -3e-6, 0.0, 5e-6, 12e-6, 40e-6}) {
    const double q = omega0 / 2 * ts.integrate(integrand, -std::numeric_limits<double>::infinity(), t_int);
    EXPECT_NEAR(rabi_angle_from_envelope(t_int, omega0, v, w0), q, 1e-10 * q) << t_int;
  }
}

TEST(RabiEnvelope, FullAndHalfPassage) {
  const double v = 500.0, w0 = 6e-3, omega0 = 2.0e5;
  const double full = omega0 * w0 * std::sqrt(pi) / (2 * v);
  EXPECT_NEAR(rabi_angle_from_envelope(std::numeric_limits<double>::infinity(), omega0, v, w0), full, 1e-12 * full);
  EXPECT_NEAR(rabi_angle_from_envelope(0.0, omega0, v, w0), full / 2, 1e-12 * full);
  EXPECT_NEAR(rabi_angle_from_envelope(1.0, omega0, v, w0), full, 1e-12 * full);
}

TEST(RabiEnvelope, TwoPiPassageRate) {
  const double v = 500.0, w0 = 6e-3;
  const double omega0 = 4 * pi * v / (w0 * std::sqrt(pi));
  EXPECT_NEAR(omega0, 5.908e5, 5e1);
  EXPECT_NEAR(rabi_angle_from_envelope(std::numeric_limits<double>::infinity(), omega0, v, w0), 2 * pi, 1e-12);
}

TEST(RabiEnvelope, RejectsBadGeometry) {
  EXPECT_THROW(rabi_angle_from_envelope(0.0, 1.0, 0.0, 6e-3), std::invalid_argument);
  EXPECT_THROW(rabi_angle_from_envelope(0.0, 1.0, 500.0, -1.0), std::invalid_argument);
}

// --- Ramsey ---------------------------------------------------------------

TEST(Ramsey, HalfPulseMakesPlus) {
  const PureState out = ramsey_apply(ket(Level::i, Level::i, Level::i, Level::g, 0, 0),
                                     {1, Transition::ig, pi / 2, pi / 2});
  const PureState want = term(1.0, anc_plus(), lvl_i(), lvl_i(), lvl_g(), n0(), n0());
  EXPECT_LT(max_distance(out, want), 1e-15);
}

TEST(Ramsey, TwoPiFlipsOnlyTheDrivenPair) {
  const Complex gm{0.6, 0.1}, dl{-0.3, 0.7};
  const PureState in = term(1.0, lvl_g(), lvl_i(), lvl_i(), {0, dl, gm}, n0(), n0());
  const PureState want = term(1.0, lvl_g(), lvl_i(), lvl_i(), {0, -dl, gm}, n0(), n0());
  for (double axis : {0.0, 0.4, pi / 2}) {
    EXPECT_LT(max_distance(ramsey_apply(in, {4, Transition::ig, 2 * pi, axis}), want), 1e-15);
  }
}

TEST(Ramsey, PiPulseTwiceIsMinusOneOnPair) {
  std::mt19937_64 rng(29);
  const AtomVec v = random_atom(rng);
  const PureState in = term(1.0, v, lvl_i(), lvl_i(), lvl_g(), n0(), n0());
  const RamseyPulse p{1, Transition::ge, pi, 0.9};
  const PureState want = term(1.0, {v[0], -v[1], -v[2]}, lvl_i(), lvl_i(), lvl_g(), n0(), n0());
  EXPECT_LT(max_distance(ramsey_apply(ramsey_apply(in, p), p), want), 1e-15);
}

TEST(Ramsey, PiPulseFlipsUpToPhase) {
  const PureState g = ket(Level::g, Level::i, Level::i, Level::g, 0, 0);
  const PureState e = ket(Level::e, Level::i, Level::i, Level::g, 0, 0);
  EXPECT_LT(distance_up_to_phase(ramsey_apply(g, {1, Transition::ge, pi, 0.0}), e), 1e-15);
  EXPECT_LT(distance_up_to_phase(ramsey_apply(e, {1, Transition::ge, pi, 1.0}), g), 1e-15);
}

TEST(Ramsey, MatrixIsUnitary) {
  for (double area : {pi / 2, pi, 2 * pi, 0.77})
    for (double axis : {0.0, -pi / 2, 1.9}) {
      const AtomMatrix u = ramsey_matrix({1, Transition::ge, area, axis});
      EXPECT_LT((u.adjoint() * u - AtomMatrix::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    }
}

// --- Stark ----------------------------------------------------------------

TEST(Stark, CoefficientsAreExact) {
  // -(1/8)(7n^2 + 21n/2 + 7/2) n^4 for n = 50: 18028.5 * 6.25e6 / 8
  EXPECT_EQ(stark_coefficient(50), -1.4084765625e10);
  for (int n : {49, 50, 51}) EXPECT_EQ(stark_coefficient(n), static_cast<double>(stark_x16(n)) / 16.0);
}

TEST(Stark, RejectsOtherLevels) {
  EXPECT_THROW(stark_coefficient(48), std::invalid_argument);
  EXPECT_THROW(stark_coefficient(52), std::invalid_argument);
}

TEST(Stark, ParabolicBracketReducesForCircularStates) {
  for (int n : {49, 50, 51}) {
    const double reduced = -stark_bracket_parabolic(n, 0, n - 1) * std::pow(n, 4) / 8.0;
    EXPECT_NEAR(reduced, stark_coefficient(n), 1e-15 * std::abs(stark_coefficient(n))) << n;
  }
}

TEST(Stark, RatioFromIntegerDifferences) {
  EXPECT_DOUBLE_EQ(stark_ratio(), stark_ratio_oracle());
  EXPECT_NEAR(stark_ratio(), 0.9053, 5e-5);
}

TEST(Stark, NormalizedBetas) {
  const StarkBetas b = StarkBetas::normalized();
  EXPECT_NEAR(b.e - b.g, 1.0, 1e-14);
  EXPECT_NEAR((b.g - b.i) / (b.e - b.g), stark_ratio_oracle(), 1e-9);
}

TEST(Stark, ZeroPhaseIsIdentity) {
  std::mt19937_64 rng(31);
  const PureState psi = random_state(rng);
  EXPECT_LT(max_distance(stark_kick_apply(psi, {{1, 2, 3, 4}, 0.0}), psi), 1e-15);
}

TEST(Stark, CoherencePhases) {
  const double phi = 1.37;
  const PureState in = term(1.0, {kInvSqrt2, 0, kInvSqrt2}, {0, kInvSqrt2, kInvSqrt2}, lvl_i(), lvl_g(), n0(), n0());
  const PureState out = stark_kick_apply(in, {{1, 2}, phi});
  const std::array keep1{Subsystem::A1};
  const std::array keep2{Subsystem::A2};
  const Eigen::MatrixXcd r1 = reduced_density(out, keep1), r2 = reduced_density(out, keep2);
  // rho_{e,g} of A2 gets exp(-i phi), rho_{g,i}-type coherence of A1 (e vs i) exp(-i phi (1 + r))
  EXPECT_LT(std::abs(r2(2, 1) - 0.5 * std::polar(1.0, -phi)), 1e-14);
  EXPECT_LT(std::abs(r1(2, 0) - 0.5 * std::polar(1.0, -phi * (1 + stark_ratio_oracle()))), 1e-9);

  const PureState gi = term(1.0, lvl_i(), anc_plus(), lvl_i(), lvl_g(), n0(), n0());
  const Eigen::MatrixXcd rg = reduced_density(stark_kick_apply(gi, {{2}, phi}), keep2);
  EXPECT_LT(std::abs(rg(1, 0) - 0.5 * std::polar(1.0, -phi * stark_ratio_oracle())), 1e-9);
}

TEST(Stark, KickPreservesModuliAndCommutesWithDiagonal) {
  std::mt19937_64 rng(37);
  const PureState psi = random_state(rng);
  const StarkKick k{{1, 3}, 4.4};
  const PureState out = stark_kick_apply(psi, k);
  EXPECT_LT((out.amplitudes().cwiseAbs() - psi.amplitudes().cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
  const LevelPhase d{3, {0.2, -1.0, 0.5}};
  EXPECT_LT(max_distance(level_phase_apply(out, d), stark_kick_apply(level_phase_apply(psi, d), k)), 1e-15);
}

// --- all gates ---------------------------------------------------------------

TEST(Gates, PreserveNormOnRandomStates) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const PureState psi = random_state(rng);
    for (const Gate& g : sample_gates()) EXPECT_NEAR(apply(psi, g).norm(), 1.0, 1e-12);
  }
}

TEST(Gates, OperatorMatchesApplyAndIsUnitary) {
  std::mt19937_64 rng(43);
  const PureState psi = random_state(rng);
  for (const Gate& g : sample_gates()) {
    const LinearOperator op = gate_operator(g);
    EXPECT_TRUE(op.is_unitary());
    EXPECT_LT(max_distance(op.apply(psi), apply(psi, g)), 1e-13);
  }
}
