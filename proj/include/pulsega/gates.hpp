#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pulsega/propagator.hpp"

namespace pulsega {

enum class RotationAxis { X, Y };

enum class GateKind { Identity, Selective90, Cnot, Fredkin, Toffoli, PauliWord };

/// Parsed target-gate description, e.g. from `cnot:0:1` or `word:IIY`.
struct GateSpec {
  GateKind kind = GateKind::Identity;
  std::vector<std::size_t> qubits;  // selective90: {k}; cnot: {control, target}
  RotationAxis axis = RotationAxis::Y;
  std::string word;                 // PauliWord only

  /// Canonical CLI name, round-trips through parse_gate.
  std::string name() const;
};

/// Accepts `identity`, `selective90:<k>:<X|Y>`, `cnot:<c>:<t>`, `fredkin`,
/// `toffoli`, `word:<IXY string>`. Throws std::invalid_argument.
GateSpec parse_gate(std::string_view name);

/// Builds the target unitary on an n-qubit register; checks roles against n.
Unitary build_gate(const GateSpec& spec, std::size_t n);

/// One line per supported gate name pattern.
std::vector<std::string> gate_catalog();

/// +90 degree rotation exp(-i (pi/4) sigma_axis) on qubit k of n.
Unitary selective_90(std::size_t k, RotationAxis axis, std::size_t n);

Unitary cnot(std::size_t control, std::size_t target, std::size_t n);

/// Controlled swap of qubits 1 and 2 with control qubit 0; n must be 3.
Unitary fredkin(std::size_t n = 3);

/// Controlled-controlled NOT with controls 0, 1 and target 2; n must be 3.
Unitary toffoli(std::size_t n = 3);

/// Tensor product of 90 degree rotations: I identity, X and Y as in
/// selective_90. Word length sets n.
Unitary pauli_word(std::string_view word);

}  // namespace pulsega
