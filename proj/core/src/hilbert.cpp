#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cqed {

namespace {

constexpr double kFlagTol = 1e-12;

using Triplet = Eigen::Triplet<Complex>;

bool hermitian_check(const SparseMatrix& m) {
  const SparseMatrix diff = m - SparseMatrix(m.adjoint());
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > kFlagTol) return false;
    }
  }
  return true;
}

bool unitary_check(const SparseMatrix& m) {
  SparseMatrix prod = SparseMatrix(m.adjoint()) * m;
  std::vector<bool> diag_seen(kDim, false);
  for (int k = 0; k < prod.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(prod, k); it; ++it) {
      const Complex expected = it.row() == it.col() ? Complex{1.0, 0.0} : Complex{};
      if (std::abs(it.value() - expected) > kFlagTol) return false;
      if (it.row() == it.col()) diag_seen[static_cast<std::size_t>(it.row())] = true;
    }
  }
  return std::all_of(diag_seen.begin(), diag_seen.end(), [](bool b) { return b; });
}

// Builds the full operator for a local matrix acting on the listed factors.
// `local_index(idx)` returns the local coordinate of a full basis index and
// `replace(idx, loc)` the full index with those factors set to `loc`.
template <class LocalMatrix, class LocalIndex, class Replace>
SparseMatrix embed(const LocalMatrix& local, LocalIndex local_index, Replace replace) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(kDim) * static_cast<std::size_t>(local.rows()));
  for (int col = 0; col < kDim; ++col) {
    const int from = local_index(col);
    for (int to = 0; to < local.rows(); ++to) {
      const Complex v = local(to, from);
      if (v != Complex{}) triplets.emplace_back(replace(col, to), col, v);
    }
  }
  SparseMatrix m(kDim, kDim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

int replace_digit(int index, Subsystem s, int value) {
  const int stride = stride_of(s);
  return index + (value - digit(index, s)) * stride;
}

}  // namespace

Subsystem atom_subsystem(int atom) {
  if (atom < 1 || atom > kNumAtoms) {
    throw std::out_of_range("atom index must be in 1..4, got " + std::to_string(atom));
  }
  return static_cast<Subsystem>(atom - 1);
}

Subsystem cavity_subsystem(int cavity) {
  if (cavity < 1 || cavity > kNumCavities) {
    throw std::out_of_range("cavity index must be in 1..2, got " + std::to_string(cavity));
  }
  return static_cast<Subsystem>(kNumAtoms + cavity - 1);
}

int basis_index(const BasisLabel& label) {
  int idx = 0;
  for (Level a : label.atoms) idx = idx * kAtomLevels + static_cast<int>(a);
  for (int n : label.photons) {
    if (n < 0 || n > 1) throw std::out_of_range("photon number must be 0 or 1");
    idx = idx * kCavityLevels + n;
  }
  return idx;
}

BasisLabel basis_label(int index) {
  if (index < 0 || index >= kDim) {
    throw std::out_of_range("basis index out of range: " + std::to_string(index));
  }
  BasisLabel label;
  for (int k = 0; k < kNumAtoms; ++k) {
    label.atoms[static_cast<std::size_t>(k)] = static_cast<Level>(digit(index, static_cast<Subsystem>(k)));
  }
  label.photons[0] = digit(index, Subsystem::C1);
  label.photons[1] = digit(index, Subsystem::C2);
  return label;
}

PureState PureState::basis(const BasisLabel& label) { return basis(basis_index(label)); }

PureState PureState::basis(int index) {
  if (index < 0 || index >= kDim) throw std::out_of_range("basis index out of range");
  PureState s;
  s.amps_(index) = 1.0;
  return s;
}

PureState PureState::normalized() const {
  PureState s = *this;
  s.normalize();
  return s;
}

void PureState::normalize() {
  const double n = amps_.norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero state");
  amps_ /= n;
}

LinearOperator::LinearOperator() : m_(kDim, kDim) {}

LinearOperator::LinearOperator(SparseMatrix m) : m_(std::move(m)) {
  if (m_.rows() != kDim || m_.cols() != kDim) {
    throw std::invalid_argument("operator must be 324x324");
  }
  m_.makeCompressed();
  hermitian_ = hermitian_check(m_);
  unitary_ = unitary_check(m_);
}

LinearOperator LinearOperator::identity() {
  SparseMatrix m(kDim, kDim);
  m.setIdentity();
  return LinearOperator(std::move(m));
}

PureState LinearOperator::apply(const PureState& psi) const {
  PureState out;
  out.amplitudes().noalias() = m_ * psi.amplitudes();
  return out;
}

LinearOperator LinearOperator::adjoint() const { return LinearOperator(SparseMatrix(m_.adjoint())); }

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  return LinearOperator(SparseMatrix(a.m_ * b.m_));
}

LinearOperator operator*(Complex c, const LinearOperator& a) { return LinearOperator(SparseMatrix(c * a.m_)); }

LinearOperator embed_atom_op(int atom, const AtomMatrix& local) {
  const Subsystem s = atom_subsystem(atom);
  return LinearOperator(embed(
      local, [s](int idx) { return digit(idx, s); },
      [s](int idx, int to) { return replace_digit(idx, s, to); }));
}

LinearOperator embed_cavity_op(int cavity, const CavityMatrix& local) {
  const Subsystem s = cavity_subsystem(cavity);
  return LinearOperator(embed(
      local, [s](int idx) { return digit(idx, s); },
      [s](int idx, int to) { return replace_digit(idx, s, to); }));
}

LinearOperator embed_atom_cavity_op(int atom, int cavity, const AtomCavityMatrix& local) {
  const Subsystem a = atom_subsystem(atom);
  const Subsystem c = cavity_subsystem(cavity);
  return LinearOperator(embed(
      local, [a, c](int idx) { return digit(idx, a) * 2 + digit(idx, c); },
      [a, c](int idx, int to) { return replace_digit(replace_digit(idx, a, to / 2), c, to % 2); }));
}

namespace local {

AtomMatrix transition(Level to, Level from) {
  AtomMatrix m = AtomMatrix::Zero();
  m(static_cast<int>(to), static_cast<int>(from)) = 1.0;
  return m;
}

CavityMatrix annihilation() {
  CavityMatrix m = CavityMatrix::Zero();
  m(0, 1) = 1.0;
  return m;
}

CavityMatrix creation() { return annihilation().adjoint(); }

CavityMatrix number() {
  CavityMatrix m = CavityMatrix::Zero();
  m(1, 1) = 1.0;
  return m;
}

}  // namespace local

Complex inner(const PureState& psi, const PureState& chi) {
  return psi.amplitudes().dot(chi.amplitudes());
}

Eigen::MatrixXcd reduced_density(const PureState& psi, std::span<const Subsystem> keep) {
  if (keep.empty()) throw std::invalid_argument("reduced_density: keep set is empty");
  std::array<bool, 6> kept{};
  int dim = 1;
  for (Subsystem s : keep) {
    auto& flag = kept[static_cast<std::size_t>(s)];
    if (flag) throw std::invalid_argument("reduced_density: repeated subsystem in keep set");
    flag = true;
    dim *= local_dim(s);
  }

  auto kept_index = [&](int idx) {
    int k = 0;
    for (Subsystem s : keep) k = k * local_dim(s) + digit(idx, s);
    return k;
  };
  // Environment index: digits of the traced factors, mixed radix in
  // subsystem order.
  auto env_index = [&](int idx) {
    int k = 0;
    for (int f = 0; f < 6; ++f) {
      if (kept[static_cast<std::size_t>(f)]) continue;
      const auto s = static_cast<Subsystem>(f);
      k = k * local_dim(s) + digit(idx, s);
    }
    return k;
  };

  const int env_dim = kDim / dim;
  Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(dim, env_dim);
  for (int idx = 0; idx < kDim; ++idx) amp(kept_index(idx), env_index(idx)) = psi[idx];
  return amp * amp.adjoint();
}

char level_name(Level l) noexcept {
  switch (l) {
    case Level::i: return 'i';
    case Level::g: return 'g';
    case Level::e: return 'e';
  }
  return '?';
}

std::string dump_state(const PureState& psi) {
  std::ostringstream os;
  char buf[64];
  for (int idx = 0; idx < kDim; ++idx) {
    const Complex a = psi[idx];
    if (std::abs(a) < 1e-12) continue;
    const BasisLabel l = basis_label(idx);
    for (Level lv : l.atoms) os << level_name(lv) << ' ';
    os << l.photons[0] << ' ' << l.photons[1];
    std::snprintf(buf, sizeof buf, " %.17g %.17g\n", a.real(), a.imag());
    os << buf;
  }
  return os.str();
}

}  // namespace cqed
