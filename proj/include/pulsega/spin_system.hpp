#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace pulsega {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Largest register handled by the dense propagators unless overridden.
inline constexpr std::size_t kDefaultMaxSpins = 6;

enum class PauliAxis { X, Y, Z };

/// Dense Hermitian operator in rad/s.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Throws std::invalid_argument if `m` is not square or deviates from its
  /// adjoint by more than `tol` in any entry.
  explicit HermitianOperator(CMatrix m, double tol = 1e-12);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  CMatrix m_;
};

/// Homonuclear coupled spin-1/2 system in the rotating frame.
///
/// Frequencies are in Hz, the rf amplitude in rad/s. Only the upper triangle
/// of `couplings` enters the Hamiltonian; the full matrix must nevertheless be
/// symmetric with a zero diagonal.
struct SpinSystem {
  std::size_t n_spins = 0;
  std::vector<double> chemical_shifts;  // nu_i, Hz
  std::vector<double> frame_freqs;      // nu_rf^i, Hz
  RMatrix couplings;                    // J_ij, Hz
  double rf_amplitude = 0.0;            // Omega, rad/s

  std::size_t dim() const { return std::size_t{1} << n_spins; }

  /// Throws std::invalid_argument when an invariant is broken.
  void validate(std::size_t max_spins = kDefaultMaxSpins) const;
};

/// Builds an on-resonance system (nu_i == nu_rf^i) with no couplings.
SpinSystem make_uncoupled_system(std::size_t n_spins, double rf_amplitude);

/// Pauli matrix on `spin_index` tensored with identities; qubit 0 is the most
/// significant bit of the basis index. Dimensionless.
CMatrix pauli_embed(PauliAxis axis, std::size_t spin_index, std::size_t n);

/// Diagonal of the rotating-frame drift Hamiltonian, rad/s.
Eigen::VectorXd drift_diagonal(const SpinSystem& sys);

HermitianOperator drift_hamiltonian(const SpinSystem& sys);

/// Omega * sum_k (cos(phase) Sx_k + sin(phase) Sy_k), with S = sigma / 2.
HermitianOperator rf_hamiltonian(const SpinSystem& sys, double phase);

}  // namespace pulsega
