#pragma once

#include <vector>

#include "pulsega/propagator.hpp"

namespace pulsega {

/// How a flip-angle error is injected into a sequence.
enum class FlipErrorModel {
  /// Omega scaled by (90 + d_theta) / 90 for every pulse.
  Multiplicative,
  /// Every nonzero pulse rotates by d_theta degrees more than nominal.
  Additive,
};

/// Fidelity sampled on a (flip error, offset error) lattice.
struct FidelityGrid {
  std::vector<double> flip_errors;  // degrees
  std::vector<double> offsets;      // Hz
  RMatrix values;                   // [flip][offset]

  double at(double flip, double offset) const;
};

/// lo, lo + step, ... up to hi; an exact 0 is inserted when lo <= 0 <= hi.
struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  /// Throws std::invalid_argument for nonpositive step or lo > hi.
  std::vector<double> values() const;
};

/// Copy with every chemical shift moved by d_nu Hz.
SpinSystem apply_offset_error(const SpinSystem& sys, double d_nu);

/// Copy with Omega scaled by (90 + d_theta) / 90; requires d_theta > -90.
SpinSystem apply_flip_error(const SpinSystem& sys, double d_theta);

/// Gate fidelity of `seq` against `target` under both errors at once.
double perturbed_fidelity(const SpinSystem& sys, const PulseSequence& seq, const Unitary& target, double d_theta,
                          double d_nu, FlipErrorModel model = FlipErrorModel::Multiplicative);

FidelityGrid scan(const SpinSystem& sys, const PulseSequence& seq, const Unitary& target, const AxisRange& flip,
                  const AxisRange& offset, FlipErrorModel model = FlipErrorModel::Multiplicative, int threads = 1);

}  // namespace pulsega
