#include "pulsega/spin_system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pulsega {

HermitianOperator::HermitianOperator(CMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix is not square");
  }
  const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (m_.size() > 0 && dev > tol) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

void SpinSystem::validate(std::size_t max_spins) const {
  if (n_spins == 0) throw std::invalid_argument("spin system: n_spins must be positive");
  if (n_spins > max_spins) {
    throw std::invalid_argument("spin system: n_spins " + std::to_string(n_spins) +
                                " exceeds the dense-matrix limit " + std::to_string(max_spins));
  }
  if (chemical_shifts.size() != n_spins) {
    throw std::invalid_argument("spin system: nu_hz has " + std::to_string(chemical_shifts.size()) +
                                " entries, expected " + std::to_string(n_spins));
  }
  if (frame_freqs.size() != n_spins) {
    throw std::invalid_argument("spin system: nu_rf_hz has " + std::to_string(frame_freqs.size()) +
                                " entries, expected " + std::to_string(n_spins));
  }
  const auto n = static_cast<Eigen::Index>(n_spins);
  if (couplings.rows() != n || couplings.cols() != n) {
    throw std::invalid_argument("spin system: j_hz must be n_spins x n_spins");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (couplings(i, i) != 0.0) throw std::invalid_argument("spin system: j_hz diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (couplings(i, j) != couplings(j, i)) {
        throw std::invalid_argument("spin system: j_hz must be symmetric");
      }
    }
  }
  if (!(rf_amplitude > 0.0) || !std::isfinite(rf_amplitude)) {
    throw std::invalid_argument("spin system: omega_rad_s must be positive");
  }
}

SpinSystem make_uncoupled_system(std::size_t n_spins, double rf_amplitude) {
  SpinSystem sys;
  sys.n_spins = n_spins;
  sys.chemical_shifts.assign(n_spins, 0.0);
  sys.frame_freqs.assign(n_spins, 0.0);
  sys.couplings = RMatrix::Zero(static_cast<Eigen::Index>(n_spins), static_cast<Eigen::Index>(n_spins));
  sys.rf_amplitude = rf_amplitude;
  return sys;
}

namespace {

// Bit of `spin` in basis index `b` for an n-spin register, qubit 0 first.
inline int spin_bit(std::size_t b, std::size_t spin, std::size_t n) {
  return static_cast<int>((b >> (n - 1 - spin)) & 1U);
}

}  // namespace

CMatrix pauli_embed(PauliAxis axis, std::size_t spin_index, std::size_t n) {
  if (n == 0 || spin_index >= n) {
    throw std::out_of_range("pauli_embed: spin index " + std::to_string(spin_index) +
                            " out of range for " + std::to_string(n) + " spins");
  }
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = std::size_t{1} << (n - 1 - spin_index);
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const int bit = spin_bit(col, spin_index, n);
    const auto c = static_cast<Eigen::Index>(col);
    switch (axis) {
      case PauliAxis::Z:
        out(c, c) = bit ? -1.0 : 1.0;
        break;
      case PauliAxis::X:
        out(static_cast<Eigen::Index>(col ^ mask), c) = 1.0;
        break;
      case PauliAxis::Y:
        // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
        out(static_cast<Eigen::Index>(col ^ mask), c) = bit ? Complex(0, -1) : Complex(0, 1);
        break;
    }
  }
  return out;
}

Eigen::VectorXd drift_diagonal(const SpinSystem& sys) {
  const std::size_t n = sys.n_spins;
  const std::size_t dim = sys.dim();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  constexpr double pi = std::numbers::pi;
  for (std::size_t b = 0; b < dim; ++b) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zi = spin_bit(b, i, n) ? -1.0 : 1.0;
      e += -pi * (sys.chemical_shifts[i] - sys.frame_freqs[i]) * zi;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double zj = spin_bit(b, j, n) ? -1.0 : 1.0;
        e += 0.5 * pi * sys.couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * zi * zj;
      }
    }
    d(static_cast<Eigen::Index>(b)) = e;
  }
  return d;
}

HermitianOperator drift_hamiltonian(const SpinSystem& sys) {
  return HermitianOperator(drift_diagonal(sys).cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianOperator rf_hamiltonian(const SpinSystem& sys, double phase) {
  const auto dim = static_cast<Eigen::Index>(sys.dim());
  CMatrix h = CMatrix::Zero(dim, dim);
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  for (std::size_t k = 0; k < sys.n_spins; ++k) {
    h += (0.5 * c) * pauli_embed(PauliAxis::X, k, sys.n_spins) +
         (0.5 * s) * pauli_embed(PauliAxis::Y, k, sys.n_spins);
  }
  h *= sys.rf_amplitude;
  return HermitianOperator(std::move(h));
}

}  // namespace pulsega
