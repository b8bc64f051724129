#include "pulsega/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pulsega {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUsToS = 1e-6;

CMatrix total_spin(PauliAxis axis, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  CMatrix s = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < n; ++k) s += 0.5 * pauli_embed(axis, k, n);
  return s;
}

CMatrix exp_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("matrix_exp: eigendecomposition failed");
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::int64_t max_pulse_us(double rf_amplitude, double max_flip) {
  if (!(rf_amplitude > 0.0)) throw std::invalid_argument("max_pulse_us: rf amplitude must be positive");
  return std::llround(max_flip / rf_amplitude / kUsToS);
}

void validate_segment(const PulseSegment& seg) {
  if (seg.tau_us < 0) throw std::invalid_argument("pulse width must be nonnegative");
  if (seg.delay_us < 0) throw std::invalid_argument("delay must be nonnegative");
  if (seg.sign_bit != 0 && seg.sign_bit != 1) throw std::invalid_argument("sign bit must be 0 or 1");
  if (seg.phase_centideg < 0 || seg.phase_centideg >= kCentidegPerTurn) {
    throw std::invalid_argument("phase must lie in [0, 36000) centidegrees");
  }
}

void validate_sequence(const PulseSequence& seq, const SpinSystem& sys) {
  if (seq.empty()) throw std::invalid_argument("pulse sequence must contain at least one segment");
  const std::int64_t tau_max = max_pulse_us(sys.rf_amplitude);
  for (std::size_t l = 0; l < seq.size(); ++l) {
    const auto& seg = seq.segments[l];
    try {
      validate_segment(seg);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("segment " + std::to_string(l + 1) + ": " + e.what());
    }
    if (seg.tau_us > tau_max) {
      throw std::invalid_argument("segment " + std::to_string(l + 1) + ": pulse width " +
                                  std::to_string(seg.tau_us) + " us exceeds the flip-angle limit of " +
                                  std::to_string(tau_max) + " us");
    }
  }
}

std::int32_t resolved_phase_centideg(const PulseSegment& seg) {
  if (seg.sign_bit == 0) return seg.phase_centideg;
  return (seg.phase_centideg + kCentidegPerTurn / 2) % kCentidegPerTurn;
}

double effective_phase(const PulseSegment& seg) {
  return static_cast<double>(resolved_phase_centideg(seg)) / 100.0 * kPi / 180.0;
}

std::int64_t total_duration(const PulseSequence& seq) {
  std::int64_t total = 0;
  for (const auto& s : seq.segments) total += s.tau_us + s.delay_us;
  return total;
}

// --- Unitary ----------------------------------------------------------------

Unitary::Unitary(CMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("Unitary: matrix is not square");
  const double r = unitarity_residual();
  if (!(r <= tol)) {
    throw std::invalid_argument("Unitary: matrix is not unitary (residual " + std::to_string(r) + ")");
  }
}

Unitary Unitary::identity(Eigen::Index dim) { return trusted(CMatrix::Identity(dim, dim)); }

Unitary Unitary::trusted(CMatrix m) {
  Unitary u;
  u.m_ = std::move(m);
  return u;
}

double Unitary::unitarity_residual() const {
  if (m_.size() == 0) return 0.0;
  return (m_ * m_.adjoint() - CMatrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
}

Unitary Unitary::then(const Unitary& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("Unitary::then: dimension mismatch");
  return trusted(other.m_ * m_);
}

// --- DensityOperator --------------------------------------------------------

DensityOperator::DensityOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw std::invalid_argument("DensityOperator: matrix must be square and nonempty");
  }
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
  }
  if (std::abs(m_.trace() - Complex(1.0, 0.0)) > 1e-12) {
    throw std::invalid_argument("DensityOperator: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("DensityOperator: matrix has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::basis_state(std::size_t index, std::size_t dim) {
  if (index >= dim) throw std::out_of_range("basis_state: index out of range");
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityOperator(std::move(m));
}

// --- propagation ------------------------------------------------------------

Unitary matrix_exp(const HermitianOperator& h, double t) {
  if (t == 0.0) return Unitary::identity(h.dim());
  return Unitary::trusted(exp_hermitian(h.matrix(), t));
}

PropagatorModel::PropagatorModel(const SpinSystem& sys)
    : sys_(sys),
      drift_(drift_diagonal(sys)),
      sx_(total_spin(PauliAxis::X, sys.n_spins)),
      sy_(total_spin(PauliAxis::Y, sys.n_spins)) {
  sys_.validate();
}

CMatrix PropagatorModel::segment(const PulseSegment& seg, double rf_scale) const {
  const auto dim = drift_.size();
  CMatrix pulse;
  if (seg.tau_us > 0) {
    const double phi = effective_phase(seg);
    const double amp = sys_.rf_amplitude * rf_scale;
    CMatrix h = (amp * std::cos(phi)) * sx_ + (amp * std::sin(phi)) * sy_;
    h.diagonal() += drift_.cast<Complex>();
    pulse = exp_hermitian(h, static_cast<double>(seg.tau_us) * kUsToS);
  } else {
    pulse = CMatrix::Identity(dim, dim);
  }
  if (seg.delay_us > 0) {
    const double t = static_cast<double>(seg.delay_us) * kUsToS;
    for (Eigen::Index r = 0; r < dim; ++r) pulse.row(r) *= std::polar(1.0, -drift_(r) * t);
  }
  return pulse;
}

CMatrix PropagatorModel::sequence(const PulseSequence& seq, std::span<const double> rf_scales) const {
  if (!rf_scales.empty() && rf_scales.size() != seq.size()) {
    throw std::invalid_argument("PropagatorModel::sequence: rf_scales size mismatch");
  }
  const auto dim = drift_.size();
  CMatrix u = CMatrix::Identity(dim, dim);
  for (std::size_t l = 0; l < seq.size(); ++l) {
    const double scale = rf_scales.empty() ? 1.0 : rf_scales[l];
    u = segment(seq.segments[l], scale) * u;
  }
  return u;
}

Unitary segment_propagator(const SpinSystem& sys, const PulseSegment& seg) {
  validate_segment(seg);
  return Unitary::trusted(PropagatorModel(sys).segment(seg));
}

Unitary sequence_propagator(const SpinSystem& sys, const PulseSequence& seq) {
  for (const auto& s : seq.segments) validate_segment(s);
  return Unitary::trusted(PropagatorModel(sys).sequence(seq));
}

double gate_fidelity(const CMatrix& u_tgt, const CMatrix& u_opt) {
  if (u_tgt.rows() != u_opt.rows() || u_tgt.cols() != u_opt.cols()) {
    throw std::invalid_argument("gate_fidelity: dimension mismatch");
  }
  // Tr(A B^dagger) = sum_ij A_ij conj(B_ij)
  const double overlap = std::abs((u_tgt.array() * u_opt.conjugate().array()).sum());
  const double na = u_tgt.squaredNorm();
  const double nb = u_opt.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("gate_fidelity: zero operator");
  return std::min(1.0, overlap / std::sqrt(na * nb));
}

double gate_fidelity(const Unitary& u_tgt, const Unitary& u_opt) {
  return gate_fidelity(u_tgt.matrix(), u_opt.matrix());
}

DensityOperator apply_to_state(const Unitary& u, const DensityOperator& rho) {
  if (u.dim() != rho.dim()) throw std::invalid_argument("apply_to_state: dimension mismatch");
  CMatrix out = u.matrix() * rho.matrix() * u.matrix().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out));
}

namespace {

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double state_fidelity(const DensityOperator& rho_th, const DensityOperator& rho_exp) {
  if (rho_th.dim() != rho_exp.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  const CMatrix s = psd_sqrt(rho_th.matrix());
  CMatrix inner = s * rho_exp.matrix() * s;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(inner, Eigen::EigenvaluesOnly);
  const double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

double pure_state_fidelity(const Eigen::VectorXcd& psi, const DensityOperator& rho) {
  if (psi.size() != rho.dim()) throw std::invalid_argument("pure_state_fidelity: dimension mismatch");
  const double p = std::real(psi.dot(rho.matrix() * psi));
  return std::sqrt(std::clamp(p, 0.0, 1.0));
}

DensityOperator pseudopure_state(std::string_view label, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("pseudopure_state: epsilon must lie in [0, 1]");
  }
  if (label.empty() || label.size() > kDefaultMaxSpins) {
    throw std::invalid_argument("pseudopure_state: label length must be 1.." +
                                std::to_string(kDefaultMaxSpins));
  }
  std::size_t index = 0;
  for (char c : label) {
    if (c != '0' && c != '1') throw std::invalid_argument("pseudopure_state: label must be a bitstring");
    index = (index << 1) | static_cast<std::size_t>(c - '0');
  }
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << label.size());
  CMatrix m = CMatrix::Identity(dim, dim) * ((1.0 - epsilon) / static_cast<double>(dim));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) += epsilon;
  return DensityOperator(std::move(m));
}

}  // namespace pulsega
