#include "pulsega/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace pulsega {

double FidelityGrid::at(double flip, double offset) const {
  const auto fi = std::find(flip_errors.begin(), flip_errors.end(), flip);
  const auto oi = std::find(offsets.begin(), offsets.end(), offset);
  if (fi == flip_errors.end() || oi == offsets.end()) throw std::out_of_range("FidelityGrid::at: point not on grid");
  return values(fi - flip_errors.begin(), oi - offsets.begin());
}

std::vector<double> AxisRange::values() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("range step must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("range is empty (lo > hi)");
  std::vector<double> v;
  const double slack = 1e-9 * std::max(1.0, std::abs(step));
  for (long k = 0;; ++k) {
    double x = lo + static_cast<double>(k) * step;
    if (x > hi + slack) break;
    if (std::abs(x) < slack) x = 0.0;
    v.push_back(x);
  }
  if (lo <= 0.0 && hi >= 0.0 && std::find(v.begin(), v.end(), 0.0) == v.end()) {
    v.insert(std::upper_bound(v.begin(), v.end(), 0.0), 0.0);
  }
  return v;
}

SpinSystem apply_offset_error(const SpinSystem& sys, double d_nu) {
  SpinSystem out = sys;
  for (auto& nu : out.chemical_shifts) nu += d_nu;
  return out;
}

SpinSystem apply_flip_error(const SpinSystem& sys, double d_theta) {
  const double scale = (90.0 + d_theta) / 90.0;
  if (!(scale > 0.0)) throw std::invalid_argument("flip error must exceed -90 degrees");
  SpinSystem out = sys;
  out.rf_amplitude *= scale;
  return out;
}

double perturbed_fidelity(const SpinSystem& sys, const PulseSequence& seq, const Unitary& target, double d_theta,
                          double d_nu, FlipErrorModel model) {
  if (model == FlipErrorModel::Multiplicative) {
    const PropagatorModel m(apply_flip_error(apply_offset_error(sys, d_nu), d_theta));
    return gate_fidelity(target.matrix(), m.sequence(seq));
  }
  const PropagatorModel m(apply_offset_error(sys, d_nu));
  std::vector<double> scales(seq.size(), 1.0);
  const double extra = d_theta * std::numbers::pi / 180.0;
  for (std::size_t l = 0; l < seq.size(); ++l) {
    const double nominal = sys.rf_amplitude * static_cast<double>(seq.segments[l].tau_us) * 1e-6;
    if (nominal > 0.0) scales[l] = (nominal + extra) / nominal;
  }
  return gate_fidelity(target.matrix(), m.sequence(seq, scales));
}

FidelityGrid scan(const SpinSystem& sys, const PulseSequence& seq, const Unitary& target, const AxisRange& flip,
                  const AxisRange& offset, FlipErrorModel model, int threads) {
  if (seq.empty()) throw std::invalid_argument("scan: empty pulse sequence");
  FidelityGrid grid;
  grid.flip_errors = flip.values();
  grid.offsets = offset.values();
  for (double f : grid.flip_errors) {
    if (model == FlipErrorModel::Multiplicative && !(f > -90.0)) {
      throw std::invalid_argument("scan: flip errors must exceed -90 degrees");
    }
  }
  const auto nf = static_cast<Eigen::Index>(grid.flip_errors.size());
  const auto no = static_cast<Eigen::Index>(grid.offsets.size());
  grid.values.resize(nf, no);

  const Eigen::Index total = nf * no;
  auto work = [&](Eigen::Index begin, Eigen::Index stride) {
    for (Eigen::Index k = begin; k < total; k += stride) {
      const Eigen::Index i = k / no;
      const Eigen::Index j = k % no;
      grid.values(i, j) = perturbed_fidelity(sys, seq, target, grid.flip_errors[static_cast<std::size_t>(i)],
                                             grid.offsets[static_cast<std::size_t>(j)], model);
    }
  };
  const Eigen::Index workers = std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(1, total));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (Eigen::Index w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  return grid;
}

}  // namespace pulsega
