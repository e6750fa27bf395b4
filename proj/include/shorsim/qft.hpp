// qft.hpp
// Fourier transform over q = 2^l as a gate sequence of single-wire R gates
// and two-wire conditional phase gates S_{j,k} with angle pi/2^{k-j}, applied
// in the order R_{l-1} S_{l-2,l-1} R_{l-2} ... R_0.  The sequence leaves the
// output bit-reversed; callers either read the register in reverse order or
// ask for an explicit relabeling permutation.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "shorsim/gates.hpp"
#include "shorsim/state_vector.hpp"

namespace shorsim {

struct QftGate {
  enum class Kind { R, S };
  Kind kind;
  int j;  // R acts on register bit j; S acts on bits j < k
  int k;  // unused for R
};

enum class BitReversalPolicy { ReversedReadout, RelabelWires };

struct QftCircuit {
  int bits;        // l: register width, q = 2^l
  int cutoff;      // S gates with k - j > cutoff are omitted; l-1 means exact
  BitReversalPolicy policy;
  std::vector<QftGate> gates;

  std::size_t r_gate_count() const {
    std::size_t n = 0;
    for (const auto& g : gates) n += g.kind == QftGate::Kind::R;
    return n;
  }
  std::size_t s_gate_count() const { return gates.size() - r_gate_count(); }
};

inline uint64_t bit_reverse(uint64_t v, int bits) {
  uint64_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

namespace detail {
inline QftCircuit build_transform_circuit(int l, int cutoff,
                                          BitReversalPolicy policy) {
  if (l < 1 || l > kDefaultMaxWires)
    throw std::invalid_argument("qft_circuit: register width out of range");
  const bool cutoff_ok = l == 1 ? cutoff == 0 : (cutoff >= 1 && cutoff <= l - 1);
  if (!cutoff_ok)
    throw std::invalid_argument("qft_circuit: phase cutoff out of range");
  QftCircuit circuit{l, cutoff, policy, {}};
  for (int j = l - 1; j >= 0; --j) {
    circuit.gates.push_back({QftGate::Kind::R, j, -1});
    if (j >= 1) {
      const int jj = j - 1;
      for (int k = l - 1; k > jj; --k)
        if (k - jj <= cutoff)
          circuit.gates.push_back({QftGate::Kind::S, jj, k});
    }
  }
  return circuit;
}
}  // namespace detail

inline QftCircuit qft_circuit(int l, BitReversalPolicy policy =
                                         BitReversalPolicy::ReversedReadout) {
  return detail::build_transform_circuit(l, l == 1 ? 0 : l - 1, policy);
}

// Approximate variant: drops the conditional phase gates with k - j > cutoff,
// whose angles pi/2^{k-j} are the hardest to realize and matter least.
inline QftCircuit aqft_circuit(int l, int cutoff,
                               BitReversalPolicy policy =
                                   BitReversalPolicy::ReversedReadout) {
  if (l < 2) throw std::invalid_argument("aqft_circuit: need at least 2 bits");
  if (cutoff < 1 || cutoff > l - 1)
    throw std::invalid_argument("aqft_circuit: cutoff must be in [1, l-1]");
  return detail::build_transform_circuit(l, cutoff, policy);
}

// Configuration default, not a derived quantity: ceil(log2 l) + 2, clamped.
inline int default_aqft_cutoff(int l) {
  int lg = 0;
  while ((1 << lg) < l) ++lg;
  const int m = lg + 2;
  return m > l - 1 ? (l - 1 < 1 ? 1 : l - 1) : m;
}

// Dense transform matrix: entry (a,c) = exp(2 pi i a c / q) / sqrt(q).
// Serves as the oracle the gate sequence is checked against.
inline std::vector<Complex> qft_matrix(uint64_t q) {
  if (q == 0 || (q & (q - 1)) != 0)
    throw std::invalid_argument("qft_matrix: q must be a power of two");
  if (q > (uint64_t{1} << 12))
    throw std::invalid_argument("qft_matrix: dense form limited to q <= 4096");
  std::vector<Complex> m(q * q);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  for (uint64_t a = 0; a < q; ++a)
    for (uint64_t c = 0; c < q; ++c) {
      const uint64_t e = a * c % q;  // keep the angle small and exact
      m[a * q + c] = std::polar(scale, 2.0 * std::numbers::pi *
                                           static_cast<double>(e) /
                                           static_cast<double>(q));
    }
  return m;
}

// Applies the circuit to the register whose bit j sits on wire reg_wires[j]
// (least significant first).  With RelabelWires the bit-reversal permutation
// is applied afterwards so the register reads naturally; with ReversedReadout
// the caller is expected to read the register wires in reverse order.
inline StateVector apply_qft(const StateVector& s, const QftCircuit& circuit,
                             std::span<const int> reg_wires) {
  if (reg_wires.size() != static_cast<std::size_t>(circuit.bits))
    throw std::invalid_argument("apply_qft: register width mismatch");
  StateVector state = s;
  const Gate r = r_gate();
  for (const auto& g : circuit.gates) {
    if (g.kind == QftGate::Kind::R) {
      const int w[] = {reg_wires[g.j]};
      state = apply_unitary(state, r, w);
    } else {
      // S is diagonal, so the wire order within the pair is immaterial.
      const int w[] = {reg_wires[g.k], reg_wires[g.j]};
      state = apply_unitary(state, s_gate(g.k - g.j), w);
    }
  }
  if (circuit.policy == BitReversalPolicy::RelabelWires) {
    const int l = circuit.bits;
    std::vector<uint64_t> map(uint64_t{1} << l);
    for (uint64_t v = 0; v < map.size(); ++v) map[v] = bit_reverse(v, l);
    std::vector<int> msb_first(reg_wires.rbegin(), reg_wires.rend());
    state = apply_permutation(state, ReversiblePermutation(l, std::move(map)),
                              msb_first);
  }
  return state;
}

// Exact inverse of apply_qft for the same circuit, policy resolution included.
inline StateVector apply_inverse_qft(const StateVector& s,
                                     const QftCircuit& circuit,
                                     std::span<const int> reg_wires) {
  if (reg_wires.size() != static_cast<std::size_t>(circuit.bits))
    throw std::invalid_argument("apply_inverse_qft: register width mismatch");
  StateVector state = s;
  if (circuit.policy == BitReversalPolicy::RelabelWires) {
    const int l = circuit.bits;
    std::vector<uint64_t> map(uint64_t{1} << l);
    for (uint64_t v = 0; v < map.size(); ++v) map[v] = bit_reverse(v, l);
    std::vector<int> msb_first(reg_wires.rbegin(), reg_wires.rend());
    state = apply_permutation(state, ReversiblePermutation(l, std::move(map)),
                              msb_first);
  }
  const Gate r = r_gate();  // real symmetric, its own adjoint
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    if (it->kind == QftGate::Kind::R) {
      const int w[] = {reg_wires[it->j]};
      state = apply_unitary(state, r, w);
    } else {
      const int w[] = {reg_wires[it->k], reg_wires[it->j]};
      state = apply_unitary(state, s_gate(it->k - it->j).adjoint(), w);
    }
  }
  return state;
}

// Dense operator realized by the circuit after bit-reversal resolution,
// row = input basis state, column = output basis state.
inline std::vector<Complex> circuit_operator(const QftCircuit& circuit) {
  const int l = circuit.bits;
  if (l > 12)
    throw std::invalid_argument("circuit_operator: dense form limited to 12 bits");
  const uint64_t q = uint64_t{1} << l;
  std::vector<int> reg(l);
  for (int j = 0; j < l; ++j) reg[j] = j;
  std::vector<Complex> op(q * q);
  for (uint64_t a = 0; a < q; ++a) {
    const StateVector out = apply_qft(StateVector(l, a), circuit, reg);
    for (uint64_t c = 0; c < q; ++c) {
      const uint64_t readout =
          circuit.policy == BitReversalPolicy::ReversedReadout
              ? bit_reverse(c, l)
              : c;
      op[a * q + c] = out.amplitude(readout);
    }
  }
  return op;
}

}  // namespace shorsim
