#pragma once

#include <string>

#include "pulsega/ga.hpp"
#include "pulsega/spin_system.hpp"

namespace pulsega::testing {

/// exp(M) by scaling and squaring of a truncated Taylor series. Shares no code
/// with the library's eigendecomposition path.
CMatrix taylor_expm(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix pauli2(PauliAxis axis);
/// I x ... x sigma x ... x I with sigma in slot `spin`, slot 0 leftmost.
CMatrix kron_pauli(PauliAxis axis, std::size_t spin, std::size_t n);

CMatrix random_hermitian(Eigen::Index dim, Stream& rng, double scale = 1.0);

/// 1 to 3 spins, offsets within +-20 kHz, couplings within +-200 Hz.
SpinSystem random_system(Stream& rng, std::size_t max_spins = 3);

PulseSequence random_sequence(const SpinSystem& sys, Stream& rng, int max_rows = 8, std::int64_t max_delay = 500);

double max_abs(const CMatrix& m);

std::string data_path(const std::string& name);

}  // namespace pulsega::testing
