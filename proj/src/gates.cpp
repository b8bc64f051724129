#include "pulsega/gates.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace pulsega {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Eigen::Matrix2cd rotation_90(RotationAxis axis) {
  Eigen::Matrix2cd r;
  if (axis == RotationAxis::Y) {
    r << 1.0, -1.0, 1.0, 1.0;
  } else {
    r << 1.0, Complex(0, -1), Complex(0, -1), 1.0;
  }
  return r * kInvSqrt2;
}

// Permutation unitary sending basis state b to f(b).
template <typename F>
Unitary permutation(std::size_t n, F f) {
  const std::size_t dim = std::size_t{1} << n;
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) m(static_cast<Eigen::Index>(f(b)), static_cast<Eigen::Index>(b)) = 1.0;
  return Unitary::trusted(std::move(m));
}

inline std::size_t bit_mask(std::size_t q, std::size_t n) { return std::size_t{1} << (n - 1 - q); }

std::size_t parse_index(std::string_view s, std::string_view full) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end) {
    throw std::invalid_argument("gate '" + std::string(full) + "': bad qubit index '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string GateSpec::name() const {
  switch (kind) {
    case GateKind::Identity: return "identity";
    case GateKind::Selective90:
      return "selective90:" + std::to_string(qubits.at(0)) + ":" + (axis == RotationAxis::X ? "X" : "Y");
    case GateKind::Cnot: return "cnot:" + std::to_string(qubits.at(0)) + ":" + std::to_string(qubits.at(1));
    case GateKind::Fredkin: return "fredkin";
    case GateKind::Toffoli: return "toffoli";
    case GateKind::PauliWord: return "word:" + word;
  }
  return {};
}

GateSpec parse_gate(std::string_view name) {
  const auto parts = split_colon(name);
  const auto head = parts.front();
  GateSpec g;
  auto want = [&](std::size_t count) {
    if (parts.size() != count) {
      throw std::invalid_argument("gate '" + std::string(name) + "': expected " + std::to_string(count - 1) +
                                  " argument(s)");
    }
  };
  if (head == "identity") {
    want(1);
    g.kind = GateKind::Identity;
  } else if (head == "selective90") {
    want(3);
    g.kind = GateKind::Selective90;
    g.qubits = {parse_index(parts[1], name)};
    if (parts[2] == "X") g.axis = RotationAxis::X;
    else if (parts[2] == "Y") g.axis = RotationAxis::Y;
    else throw std::invalid_argument("gate '" + std::string(name) + "': axis must be X or Y");
  } else if (head == "cnot") {
    want(3);
    g.kind = GateKind::Cnot;
    g.qubits = {parse_index(parts[1], name), parse_index(parts[2], name)};
    if (g.qubits[0] == g.qubits[1]) {
      throw std::invalid_argument("gate '" + std::string(name) + "': control and target must differ");
    }
  } else if (head == "fredkin") {
    want(1);
    g.kind = GateKind::Fredkin;
  } else if (head == "toffoli") {
    want(1);
    g.kind = GateKind::Toffoli;
  } else if (head == "word") {
    want(2);
    g.kind = GateKind::PauliWord;
    g.word = std::string(parts[1]);
    if (g.word.empty() || g.word.find_first_not_of("IXY") != std::string::npos) {
      throw std::invalid_argument("gate '" + std::string(name) + "': word must be a nonempty string over I, X, Y");
    }
  } else {
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
  }
  return g;
}

Unitary build_gate(const GateSpec& spec, std::size_t n) {
  switch (spec.kind) {
    case GateKind::Identity:
      return Unitary::identity(static_cast<Eigen::Index>(std::size_t{1} << n));
    case GateKind::Selective90: return selective_90(spec.qubits.at(0), spec.axis, n);
    case GateKind::Cnot: return cnot(spec.qubits.at(0), spec.qubits.at(1), n);
    case GateKind::Fredkin: return fredkin(n);
    case GateKind::Toffoli: return toffoli(n);
    case GateKind::PauliWord:
      if (spec.word.size() != n) {
        throw std::invalid_argument("gate word '" + spec.word + "' has length " + std::to_string(spec.word.size()) +
                                    " but the system has " + std::to_string(n) + " spins");
      }
      return pauli_word(spec.word);
  }
  throw std::invalid_argument("build_gate: unknown gate kind");
}

std::vector<std::string> gate_catalog() {
  return {
      "identity                 identity on all qubits",
      "selective90:<k>:<X|Y>    +90 degree rotation of qubit k (0-based, qubit 0 = leftmost bit)",
      "cnot:<c>:<t>             controlled NOT, control c, target t",
      "fredkin                  controlled swap of qubits 1 and 2, control qubit 0 (3 qubits)",
      "toffoli                  controlled-controlled NOT, controls 0 and 1, target 2 (3 qubits)",
      "word:<IXY...>            tensor product of 90 degree X/Y rotations, one letter per qubit",
  };
}

Unitary selective_90(std::size_t k, RotationAxis axis, std::size_t n) {
  if (k >= n) {
    throw std::out_of_range("selective_90: qubit " + std::to_string(k) + " out of range for " +
                            std::to_string(n) + " qubits");
  }
  std::string word(n, 'I');
  word[k] = axis == RotationAxis::X ? 'X' : 'Y';
  return pauli_word(word);
}

Unitary cnot(std::size_t control, std::size_t target, std::size_t n) {
  if (control >= n || target >= n || control == target) {
    throw std::invalid_argument("cnot: control and target must be distinct indices below " + std::to_string(n));
  }
  const std::size_t cm = bit_mask(control, n);
  const std::size_t tm = bit_mask(target, n);
  return permutation(n, [&](std::size_t b) { return (b & cm) ? (b ^ tm) : b; });
}

Unitary fredkin(std::size_t n) {
  if (n != 3) throw std::invalid_argument("fredkin: only defined for 3 qubits");
  return permutation(3, [](std::size_t b) {
    if (b == 0b101) return std::size_t{0b110};
    if (b == 0b110) return std::size_t{0b101};
    return b;
  });
}

Unitary toffoli(std::size_t n) {
  if (n != 3) throw std::invalid_argument("toffoli: only defined for 3 qubits");
  return permutation(3, [](std::size_t b) { return (b & 0b110) == 0b110 ? (b ^ 0b001) : b; });
}

Unitary pauli_word(std::string_view word) {
  if (word.empty() || word.size() > kDefaultMaxSpins) {
    throw std::invalid_argument("pauli_word: word length must be 1.." + std::to_string(kDefaultMaxSpins));
  }
  CMatrix u = CMatrix::Identity(1, 1);
  for (char c : word) {
    Eigen::Matrix2cd f;
    switch (c) {
      case 'I': f = Eigen::Matrix2cd::Identity(); break;
      case 'X': f = rotation_90(RotationAxis::X); break;
      case 'Y': f = rotation_90(RotationAxis::Y); break;
      default: throw std::invalid_argument(std::string("pauli_word: invalid character '") + c + "'");
    }
    u = Eigen::kroneckerProduct(u, f).eval();
  }
  return Unitary::trusted(std::move(u));
}

}  // namespace pulsega
