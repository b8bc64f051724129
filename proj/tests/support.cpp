#include "support.hpp"

#include <cmath>

namespace pulsega::testing {

CMatrix taylor_expm(const CMatrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.125) {
    scaled /= 2.0;
    ++squarings;
  }
  const CMatrix a = m / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(m.rows(), m.cols());
  CMatrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix pauli2(PauliAxis axis) {
  CMatrix p(2, 2);
  switch (axis) {
    case PauliAxis::X: p << 0, 1, 1, 0; break;
    case PauliAxis::Y: p << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case PauliAxis::Z: p << 1, 0, 0, -1; break;
  }
  return p;
}

CMatrix kron_pauli(PauliAxis axis, std::size_t spin, std::size_t n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = kron(out, k == spin ? pauli2(axis) : CMatrix::Identity(2, 2));
  return out;
}

CMatrix random_hermitian(Eigen::Index dim, Stream& rng, double scale) {
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  }
  return scale * (m + m.adjoint());
}

SpinSystem random_system(Stream& rng, std::size_t max_spins) {
  SpinSystem s;
  s.n_spins = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_spins)));
  s.rf_amplitude = 120.88e3;
  s.couplings = RMatrix::Zero(static_cast<Eigen::Index>(s.n_spins), static_cast<Eigen::Index>(s.n_spins));
  for (std::size_t i = 0; i < s.n_spins; ++i) {
    s.chemical_shifts.push_back(40000.0 * (rng.uniform01() - 0.5));
    s.frame_freqs.push_back(0.0);
    for (std::size_t j = i + 1; j < s.n_spins; ++j) {
      const double jij = 400.0 * (rng.uniform01() - 0.5);
      s.couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jij;
      s.couplings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = jij;
    }
  }
  return s;
}

PulseSequence random_sequence(const SpinSystem& sys, Stream& rng, int max_rows, std::int64_t max_delay) {
  PulseSequence seq;
  const auto rows = rng.uniform_int(1, max_rows);
  const auto tau_max = max_pulse_us(sys.rf_amplitude);
  for (std::int64_t r = 0; r < rows; ++r) {
    seq.segments.push_back({rng.uniform_int(0, tau_max), static_cast<int>(rng.uniform_int(0, 1)),
                            static_cast<std::int32_t>(rng.uniform_int(0, kCentidegPerTurn - 1)),
                            rng.uniform_int(0, max_delay)});
  }
  return seq;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::string data_path(const std::string& name) { return std::string(PULSEGA_DATA_DIR) + "/" + name; }

}  // namespace pulsega::testing
