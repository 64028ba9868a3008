#pragma once

// Test-side state algebra: states assembled as sums of tensor products of
// local vectors, independent of the library's gate code.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed::testing {

using C = std::complex<double>;
using AtomVec = std::array<C, 3>;  // (i, g, e)
using CavVec = std::array<C, 2>;   // (0, 1)

inline const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

inline AtomVec lvl_i() { return {1, 0, 0}; }
inline AtomVec lvl_g() { return {0, 1, 0}; }
inline AtomVec lvl_e() { return {0, 0, 1}; }
/// (|i> +- |g>)/sqrt2
inline AtomVec anc_plus() { return {kInvSqrt2, kInvSqrt2, 0}; }
inline AtomVec anc_minus() { return {kInvSqrt2, -kInvSqrt2, 0}; }
/// (|g> +- |e>)/sqrt2
inline AtomVec ge_plus() { return {0, kInvSqrt2, kInvSqrt2}; }
inline AtomVec ge_minus() { return {0, kInvSqrt2, -kInvSqrt2}; }
inline CavVec n0() { return {1, 0}; }
inline CavVec n1() { return {0, 1}; }

struct Product {
  std::array<AtomVec, 4> atoms;
  std::array<CavVec, 2> cavities;
};

/// Kronecker product in the fixed order (A1, A2, A3, A4, C1, C2).
inline PureState kron(const Product& p) {
  PureState s;
  int idx = 0;
  for (int a1 = 0; a1 < 3; ++a1)
    for (int a2 = 0; a2 < 3; ++a2)
      for (int a3 = 0; a3 < 3; ++a3)
        for (int a4 = 0; a4 < 3; ++a4)
          for (int c1 = 0; c1 < 2; ++c1)
            for (int c2 = 0; c2 < 2; ++c2) {
              s[idx++] = p.atoms[0][a1] * p.atoms[1][a2] * p.atoms[2][a3] * p.atoms[3][a4] *
                         p.cavities[0][c1] * p.cavities[1][c2];
            }
  return s;
}

inline PureState term(C coeff, AtomVec a1, AtomVec a2, AtomVec a3, AtomVec a4, CavVec c1, CavVec c2) {
  PureState s = kron({{a1, a2, a3, a4}, {c1, c2}});
  s *= coeff;
  return s;
}

/// max_k |a_k - e^{i theta} b_k| with theta aligning the largest amplitude of b.
inline double distance_up_to_phase(const PureState& a, const PureState& b) {
  int k = 0;
  for (int j = 1; j < kDim; ++j) {
    if (std::abs(b[j]) > std::abs(b[k])) k = j;
  }
  if (std::abs(b[k]) == 0.0 || std::abs(a[k]) == 0.0) return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
  const C phase = (a[k] / std::abs(a[k])) / (b[k] / std::abs(b[k]));
  return (a.amplitudes() - phase * b.amplitudes()).cwiseAbs().maxCoeff();
}

inline double max_distance(const PureState& a, const PureState& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

inline PureState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  PureState s;
  for (int j = 0; j < kDim; ++j) s[j] = C{n(rng), n(rng)};
  s.normalize();
  return s;
}

inline AtomVec random_atom(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  AtomVec v{C{n(rng), n(rng)}, C{n(rng), n(rng)}, C{n(rng), n(rng)}};
  double norm = 0;
  for (auto& x : v) norm += std::norm(x);
  for (auto& x : v) x /= std::sqrt(norm);
  return v;
}

inline CavVec random_cavity(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CavVec v{C{n(rng), n(rng)}, C{n(rng), n(rng)}};
  const double norm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  for (auto& x : v) x /= norm;
  return v;
}

/// Exact Stark coefficients alpha_n * 16 from the closed bracket, in integers.
inline std::int64_t stark_x16(std::int64_t n) { return -(14 * n * n + 21 * n + 7) * n * n * n * n; }

/// (alpha_50 - alpha_49) / (alpha_51 - alpha_50) from integer differences.
inline double stark_ratio_oracle() {
  return static_cast<double>(stark_x16(50) - stark_x16(49)) / static_cast<double>(stark_x16(51) - stark_x16(50));
}

// Success probabilities of one noise-free protocol run at Stark phase phi,
// obtained by enumerating the eight flip branches of (A1, A2, A3): A1 keeps
// its state with amplitude cos(phi/2), each ancilla with cos(r phi/2). The
// syndrome is (A1 xor A2, A1 xor A3); feedback fires on (+,+) only, and a
// branch succeeds iff A1's net flip count after feedback is even.
struct BranchProbabilities {
  double corrected = 0.0;
  double uncorrected = 0.0;
};

inline BranchProbabilities enumerate_branches(double phi, double r) {
  const double p1 = std::pow(std::sin(phi / 2), 2);
  const double pa = std::pow(std::sin(r * phi / 2), 2);
  BranchProbabilities out;
  for (int f1 = 0; f1 < 2; ++f1)
    for (int f2 = 0; f2 < 2; ++f2)
      for (int f3 = 0; f3 < 2; ++f3) {
        const double w = (f1 ? p1 : 1 - p1) * (f2 ? pa : 1 - pa) * (f3 ? pa : 1 - pa);
        const bool feedback = (f1 ^ f2) && (f1 ^ f3);
        if (f1 == 0) out.uncorrected += w;
        if ((f1 ^ static_cast<int>(feedback)) == 0) out.corrected += w;
      }
  return out;
}

}  // namespace cqed::testing
