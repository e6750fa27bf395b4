// state_vector.hpp
// Dense pure-state simulation over w wires: a flat table of 2^w complex
// amplitudes with wire i stored as bit i of the basis index.  Operations are
// value-in value-out; norm drift is checked after every operation and never
// silently repaired (the only renormalization happens at measurement collapse).

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shorsim/gates.hpp"

namespace shorsim {

inline constexpr int kDefaultMaxWires = 24;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kMassTolerance = 1e-9;

class StateVector {
 public:
  // Basis state |index> on `wire_count` wires.
  StateVector(int wire_count, uint64_t index, int max_wires = kDefaultMaxWires)
      : wire_count_(check_wire_count(wire_count, max_wires)),
        amplitudes_(uint64_t{1} << wire_count, Complex{0.0}) {
    if (index >= amplitudes_.size())
      throw std::invalid_argument("StateVector: basis index out of range");
    amplitudes_[index] = 1.0;
  }

  static StateVector from_amplitudes(int wire_count, std::vector<Complex> amps,
                                     int max_wires = kDefaultMaxWires) {
    StateVector s(wire_count, 0, max_wires);
    if (amps.size() != s.amplitudes_.size())
      throw std::invalid_argument("StateVector: amplitude count mismatch");
    s.amplitudes_ = std::move(amps);
    s.check_norm();
    return s;
  }

  int wire_count() const noexcept { return wire_count_; }
  uint64_t dimension() const noexcept { return amplitudes_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  Complex amplitude(uint64_t index) const { return amplitudes_.at(index); }

  double norm_squared() const noexcept {
    double acc = 0.0;
    for (const Complex& a : amplitudes_) acc += std::norm(a);
    return acc;
  }

  void check_norm() const {
    const double n2 = norm_squared();
    if (std::abs(n2 - 1.0) > kNormTolerance)
      throw std::runtime_error("StateVector: norm drifted to " + std::to_string(n2));
  }

 private:
  static int check_wire_count(int wire_count, int max_wires) {
    if (wire_count < 1)
      throw std::invalid_argument("StateVector: wire count must be >= 1");
    if (wire_count > max_wires)
      throw std::invalid_argument("StateVector: wire count exceeds the configured maximum");
    return wire_count;
  }

  friend StateVector apply_unitary(const StateVector&, const Gate&,
                                   std::span<const int>);
  friend StateVector apply_permutation(const StateVector&,
                                       const ReversiblePermutation&,
                                       std::span<const int>);
  friend StateVector apply_controlled_permutation(const StateVector&,
                                                  const ReversiblePermutation&,
                                                  int, std::span<const int>);
  struct Unchecked {};
  StateVector(Unchecked, int wire_count, std::vector<Complex> amps)
      : wire_count_(wire_count), amplitudes_(std::move(amps)) {}

  int wire_count_;
  std::vector<Complex> amplitudes_;
};

// Exact probability mass over the values of a wire subset.
struct Distribution {
  std::vector<double> probabilities;  // indexed by subset value

  double probability(uint64_t value) const { return probabilities.at(value); }
  double total_mass() const {
    double acc = 0.0;
    for (double p : probabilities) acc += p;
    return acc;
  }
};

struct MeasurementOutcome {
  uint64_t observed;
  StateVector collapsed;
};

namespace detail {

// Wire convention throughout: the FIRST listed wire is the highest-order bit
// of the local (gate / permutation / observed) value.
inline void check_wires(std::span<const int> wires, int wire_count,
                        std::size_t expected) {
  if (expected != 0 && wires.size() != expected)
    throw std::invalid_argument("wire list length does not match operand arity");
  if (wires.empty()) throw std::invalid_argument("wire list must not be empty");
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i] < 0 || wires[i] >= wire_count)
      throw std::invalid_argument("wire index out of range");
    for (std::size_t j = i + 1; j < wires.size(); ++j)
      if (wires[i] == wires[j])
        throw std::invalid_argument("duplicate wire in wire list");
  }
}

inline uint64_t gather_bits(uint64_t index, std::span<const int> wires) {
  uint64_t v = 0;
  for (int w : wires) v = (v << 1) | ((index >> w) & 1);
  return v;
}

inline uint64_t scatter_bits(uint64_t index, uint64_t value,
                             std::span<const int> wires) {
  const std::size_t k = wires.size();
  for (std::size_t t = 0; t < k; ++t) {
    const uint64_t bit = (value >> (k - 1 - t)) & 1;
    index = (index & ~(uint64_t{1} << wires[t])) | (bit << wires[t]);
  }
  return index;
}

}  // namespace detail

// Tensor-product action of the gate on the named wires, identity elsewhere.
inline StateVector apply_unitary(const StateVector& s, const Gate& g,
                                 std::span<const int> wires) {
  detail::check_wires(wires, s.wire_count(), static_cast<std::size_t>(g.arity()));
  const uint64_t dim = s.dimension();
  const std::size_t gdim = g.dim();
  uint64_t gate_mask = 0;
  for (int w : wires) gate_mask |= uint64_t{1} << w;

  std::vector<Complex> out(dim, Complex{0.0});
  const auto& in = s.amplitudes();
  for (uint64_t base = 0; base < dim; ++base) {
    if ((base & gate_mask) != 0) continue;  // visit each block once
    uint64_t idx[8];
    for (std::size_t v = 0; v < gdim; ++v)
      idx[v] = detail::scatter_bits(base, v, wires);
    for (std::size_t vin = 0; vin < gdim; ++vin) {
      const Complex a = in[idx[vin]];
      if (a == Complex{0.0}) continue;
      for (std::size_t vout = 0; vout < gdim; ++vout)
        out[idx[vout]] += a * g.entry(vin, vout);
    }
  }
  StateVector result(StateVector::Unchecked{}, s.wire_count(), std::move(out));
  result.check_norm();
  return result;
}

// Relabels basis states: the amplitude at the image index equals the
// amplitude at the preimage.  Exactly norm preserving.
inline StateVector apply_permutation(const StateVector& s,
                                     const ReversiblePermutation& p,
                                     std::span<const int> wires) {
  detail::check_wires(wires, s.wire_count(), static_cast<std::size_t>(p.width()));
  const uint64_t dim = s.dimension();
  std::vector<Complex> out(dim);
  const auto& in = s.amplitudes();
  for (uint64_t i = 0; i < dim; ++i) {
    const uint64_t v = detail::gather_bits(i, wires);
    out[detail::scatter_bits(i, p.image(v), wires)] = in[i];
  }
  return StateVector(StateVector::Unchecked{}, s.wire_count(), std::move(out));
}

// Applies the permutation on the named wires only where the control wire is 1.
inline StateVector apply_controlled_permutation(const StateVector& s,
                                                const ReversiblePermutation& p,
                                                int control,
                                                std::span<const int> wires) {
  detail::check_wires(wires, s.wire_count(), static_cast<std::size_t>(p.width()));
  for (int w : wires)
    if (w == control)
      throw std::invalid_argument("control wire overlaps permutation wires");
  if (control < 0 || control >= s.wire_count())
    throw std::invalid_argument("control wire out of range");
  const uint64_t dim = s.dimension();
  std::vector<Complex> out(dim);
  const auto& in = s.amplitudes();
  for (uint64_t i = 0; i < dim; ++i) {
    if (((i >> control) & 1) == 0) {
      out[i] = in[i];
      continue;
    }
    const uint64_t v = detail::gather_bits(i, wires);
    out[detail::scatter_bits(i, p.image(v), wires)] = in[i];
  }
  return StateVector(StateVector::Unchecked{}, s.wire_count(), std::move(out));
}

// Marginal distribution of the subset value: sums |a_i|^2 over all full-basis
// indices consistent with each subset value.
inline Distribution exact_distribution(const StateVector& s,
                                       std::span<const int> wires) {
  detail::check_wires(wires, s.wire_count(), 0);
  Distribution dist;
  dist.probabilities.assign(uint64_t{1} << wires.size(), 0.0);
  for (uint64_t i = 0; i < s.dimension(); ++i)
    dist.probabilities[detail::gather_bits(i, wires)] += std::norm(s.amplitude(i));
  const double mass = dist.total_mass();
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw std::runtime_error("exact_distribution: mass drifted to " +
                             std::to_string(mass));
  return dist;
}

// Canonical-basis measurement of a wire subset: draws from the exact marginal,
// zeroes every inconsistent amplitude, renormalizes the survivor block.
inline MeasurementOutcome sample_measurement(const StateVector& s,
                                             std::mt19937_64& rng,
                                             std::span<const int> wires) {
  const Distribution dist = exact_distribution(s, wires);
  // Canonical double in [0,1) built directly from the generator output so the
  // draw is identical across standard library implementations.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  bool found = false;
  uint64_t observed = 0;
  double cumulative = 0.0;
  for (uint64_t v = 0; v < dist.probabilities.size(); ++v) {
    cumulative += dist.probabilities[v];
    if (u < cumulative) {
      observed = v;
      found = true;
      break;
    }
  }
  if (!found) {
    // u fell in the <=1e-9 rounding gap above the accumulated mass; take the
    // last outcome that actually carries probability.
    for (uint64_t v = dist.probabilities.size(); v-- > 0;) {
      if (dist.probabilities[v] > 0.0) {
        observed = v;
        found = true;
        break;
      }
    }
  }
  const double p_obs = found ? dist.probabilities[observed] : 0.0;
  if (p_obs <= 0.0)
    throw std::runtime_error("sample_measurement: zero-mass outcome; state corrupted");
  const double scale = 1.0 / std::sqrt(p_obs);
  std::vector<Complex> amps(s.dimension(), Complex{0.0});
  for (uint64_t i = 0; i < s.dimension(); ++i)
    if (detail::gather_bits(i, wires) == observed)
      amps[i] = s.amplitude(i) * scale;
  return MeasurementOutcome{observed,
                            StateVector::from_amplitudes(s.wire_count(), std::move(amps))};
}

// Wires of an l-bit register based at `base`, listed most significant first,
// matching the convention that the first listed wire is the top bit.
inline std::vector<int> register_wires_msb_first(int base, int bits) {
  std::vector<int> wires(bits);
  for (int j = 0; j < bits; ++j) wires[j] = base + bits - 1 - j;
  return wires;
}

}  // namespace shorsim
