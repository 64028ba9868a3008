#pragma once

// Composite Hilbert space of four three-level atoms and two single-mode
// cavities truncated to {0, 1} photons.
//
// Subsystem order is fixed as (A1, A2, A3, A4, C1, C2) and atomic levels
// are ordered i=0, g=1, e=2. The flat index of a basis label is
//
//   index = (((a1*3 + a2)*3 + a3)*3 + a4)*4 + n1*2 + n2
//
// which makes state dumps reproducible bit-for-bit across implementations.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cqed {

using Complex = std::complex<double>;

inline constexpr int kNumAtoms = 4;
inline constexpr int kNumCavities = 2;
inline constexpr int kAtomLevels = 3;
inline constexpr int kCavityLevels = 2;
inline constexpr int kDim = 324;

enum class Level : std::uint8_t { i = 0, g = 1, e = 2 };

enum class Subsystem : std::uint8_t { A1, A2, A3, A4, C1, C2 };

/// Subsystem handle for atom 1..4 / cavity 1..2. Throws on a bad index.
Subsystem atom_subsystem(int atom);
Subsystem cavity_subsystem(int cavity);

/// Local dimension of one factor (3 for atoms, 2 for cavities).
constexpr int local_dim(Subsystem s) noexcept {
  return static_cast<int>(s) < kNumAtoms ? kAtomLevels : kCavityLevels;
}

struct BasisLabel {
  std::array<Level, kNumAtoms> atoms{Level::i, Level::i, Level::i, Level::i};
  std::array<int, kNumCavities> photons{0, 0};

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

int basis_index(const BasisLabel& label);
BasisLabel basis_label(int index);

/// Local coordinate (level or photon number) of `s` in basis state `index`.
constexpr int digit(int index, Subsystem s) noexcept {
  constexpr std::array<int, 6> stride{108, 36, 12, 4, 2, 1};
  const auto k = static_cast<std::size_t>(s);
  return (index / stride[k]) % local_dim(s);
}

constexpr int stride_of(Subsystem s) noexcept {
  constexpr std::array<int, 6> stride{108, 36, 12, 4, 2, 1};
  return stride[static_cast<std::size_t>(s)];
}

using StateVector = Eigen::Matrix<Complex, kDim, 1>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

class PureState {
 public:
  PureState() : amps_(StateVector::Zero()) {}
  explicit PureState(const StateVector& amps) : amps_(amps) {}

  static PureState basis(const BasisLabel& label);
  static PureState basis(int index);

  const StateVector& amplitudes() const noexcept { return amps_; }
  StateVector& amplitudes() noexcept { return amps_; }

  Complex operator[](int index) const { return amps_(index); }
  Complex& operator[](int index) { return amps_(index); }
  Complex operator[](const BasisLabel& label) const { return amps_(basis_index(label)); }

  double squared_norm() const noexcept { return amps_.squaredNorm(); }
  double norm() const noexcept { return amps_.norm(); }

  /// Throws std::domain_error on the zero vector.
  PureState normalized() const;
  void normalize();

  PureState& operator+=(const PureState& other) {
    amps_ += other.amps_;
    return *this;
  }
  PureState& operator*=(Complex c) {
    amps_ *= c;
    return *this;
  }
  friend PureState operator+(PureState a, const PureState& b) { return a += b; }
  friend PureState operator*(Complex c, PureState a) { return a *= c; }

 private:
  StateVector amps_;
};

/// Sparse operator on the full 324-dim space. Hermitian/unitary flags are
/// established numerically (1e-12) at construction.
class LinearOperator {
 public:
  LinearOperator();
  explicit LinearOperator(SparseMatrix m);

  static LinearOperator identity();

  const SparseMatrix& matrix() const noexcept { return m_; }
  bool is_hermitian() const noexcept { return hermitian_; }
  bool is_unitary() const noexcept { return unitary_; }

  PureState apply(const PureState& psi) const;
  LinearOperator adjoint() const;

  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);
  friend PureState operator*(const LinearOperator& a, const PureState& psi) { return a.apply(psi); }
  friend LinearOperator operator*(Complex c, const LinearOperator& a);

 private:
  SparseMatrix m_;
  bool hermitian_ = true;
  bool unitary_ = true;
};

using AtomMatrix = Eigen::Matrix<Complex, 3, 3>;
using CavityMatrix = Eigen::Matrix<Complex, 2, 2>;
/// Local (atom, cavity) operator; local index = level*2 + photons.
using AtomCavityMatrix = Eigen::Matrix<Complex, 6, 6>;

LinearOperator embed_atom_op(int atom, const AtomMatrix& local);
LinearOperator embed_cavity_op(int cavity, const CavityMatrix& local);
LinearOperator embed_atom_cavity_op(int atom, int cavity, const AtomCavityMatrix& local);

namespace local {

/// |to><from| on one atom.
AtomMatrix transition(Level to, Level from);
CavityMatrix annihilation();
CavityMatrix creation();
CavityMatrix number();

}  // namespace local

/// <psi|chi>, conjugate-linear in the first argument.
Complex inner(const PureState& psi, const PureState& chi);

/// Density matrix of the kept factors, in the order they are listed (first
/// listed factor is the most significant digit). Throws on an empty or
/// repeated keep set.
Eigen::MatrixXcd reduced_density(const PureState& psi, std::span<const Subsystem> keep);

/// Debug text dump: one line "a1 a2 a3 a4 n1 n2 re im" per amplitude with
/// modulus >= 1e-12, in index order. Levels are written as i/g/e.
std::string dump_state(const PureState& psi);

char level_name(Level l) noexcept;

}  // namespace cqed
