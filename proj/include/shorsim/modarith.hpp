// modarith.hpp
// Reversible modular arithmetic as basis permutations: constant addition,
// constant multiplication (reversible precisely when gcd(c,n)=1, with the
// inverse-multiplication uncompute), and modular exponentiation with the
// exponent register in superposition.  Register values >= n are fixed points;
// the algorithms never populate them.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "shorsim/gates.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/state_vector.hpp"

namespace shorsim {

inline int bit_width(uint64_t n) {
  int w = 0;
  while (n != 0) {
    n >>= 1;
    ++w;
  }
  return w;
}

// b -> b + c (mod n) for b < n, identity for n <= b < 2^width.
inline ReversiblePermutation add_const_mod(uint64_t c, uint64_t n, int width) {
  if (n == 0 || c >= n)
    throw std::invalid_argument("add_const_mod: need 0 <= c < n");
  if (width < 1 || width > 24 || n > (uint64_t{1} << width))
    throw std::invalid_argument("add_const_mod: register too narrow for n");
  std::vector<uint64_t> map(uint64_t{1} << width);
  for (uint64_t b = 0; b < map.size(); ++b)
    map[b] = b < n ? (b + c) % n : b;
  return ReversiblePermutation(width, std::move(map));
}

// b -> b*c (mod n) for b < n, identity above.  Refused when gcd(c,n) != 1:
// two distinct b would then collide and the map could not be reversed.
inline ReversiblePermutation mul_const_mod(uint64_t c, uint64_t n, int width) {
  if (n == 0) throw std::invalid_argument("mul_const_mod: zero modulus");
  if (gcd_u64(c % n, n) != 1)
    throw std::invalid_argument(
        "mul_const_mod: gcd(c,n) != 1, multiplication is not reversible");
  if (width < 1 || width > 24 || n > (uint64_t{1} << width))
    throw std::invalid_argument("mul_const_mod: register too narrow for n");
  std::vector<uint64_t> map(uint64_t{1} << width);
  for (uint64_t b = 0; b < map.size(); ++b)
    map[b] = b < n ? b * (c % n) % n : b;
  return ReversiblePermutation(width, std::move(map));
}

// The two stages behind mul_const_mod, materialized on a (b, result) register
// pair of `width` bits each (value layout: b in the high half).  Stage one
// accumulates result += 2^i c for each set bit i of b; stage two erases b by
// subtracting 2^i c^{-1} for each set bit i of result.  Both are bijections
// on the full double register.
inline ReversiblePermutation mul_stage_one_permutation(uint64_t c, uint64_t n,
                                                       int width) {
  if (gcd_u64(c % n, n) != 1)
    throw std::invalid_argument("mul_stage_one: gcd(c,n) != 1");
  if (width < 1 || 2 * width > 24 || n > (uint64_t{1} << width))
    throw std::invalid_argument("mul_stage_one: register too narrow");
  const uint64_t half = uint64_t{1} << width;
  std::vector<uint64_t> map(half * half);
  for (uint64_t b = 0; b < half; ++b) {
    for (uint64_t t = 0; t < half; ++t) {
      uint64_t result = t;
      if (b < n && t < n) {
        for (int i = 0; i < width; ++i)
          if ((b >> i) & 1) result = (result + ((uint64_t{1} << i) * c) % n) % n;
      }
      map[(b << width) | t] = (b << width) | result;
    }
  }
  return ReversiblePermutation(2 * width, std::move(map));
}

inline ReversiblePermutation mul_stage_two_permutation(uint64_t c, uint64_t n,
                                                       int width) {
  const uint64_t cinv = modinv(c, n);
  if (width < 1 || 2 * width > 24 || n > (uint64_t{1} << width))
    throw std::invalid_argument("mul_stage_two: register too narrow");
  const uint64_t half = uint64_t{1} << width;
  std::vector<uint64_t> map(half * half);
  for (uint64_t b = 0; b < half; ++b) {
    for (uint64_t t = 0; t < half; ++t) {
      uint64_t bb = b;
      if (b < n && t < n) {
        for (int i = 0; i < width; ++i)
          if ((t >> i) & 1) {
            const uint64_t sub = ((uint64_t{1} << i) * cinv) % n;
            bb = (bb + n - sub) % n;
          }
      }
      map[(b << width) | t] = (bb << width) | t;
    }
  }
  return ReversiblePermutation(2 * width, std::move(map));
}

struct MulStagedResult {
  uint64_t b_after_stage_one;
  uint64_t result_after_stage_one;
  uint64_t b_after_stage_two;       // 0 for every b < n when the stages are right
  uint64_t result_after_stage_two;  // b*c mod n
};

inline MulStagedResult mul_const_mod_staged(uint64_t c, uint64_t n, int width,
                                            uint64_t b) {
  if (b >= n) throw std::invalid_argument("mul_const_mod_staged: b must be < n");
  const uint64_t cinv = modinv(c, n);
  if (n > (uint64_t{1} << width))
    throw std::invalid_argument("mul_const_mod_staged: register too narrow");
  MulStagedResult out{};
  uint64_t result = 0;
  for (int i = 0; i < width; ++i)
    if ((b >> i) & 1) result = (result + ((uint64_t{1} << i) * c) % n) % n;
  out.b_after_stage_one = b;
  out.result_after_stage_one = result;
  uint64_t bb = b;
  for (int i = 0; i < width; ++i)
    if ((result >> i) & 1) {
      const uint64_t sub = ((uint64_t{1} << i) * cinv) % n;
      bb = (bb + n - sub) % n;
    }
  out.b_after_stage_two = bb;
  out.result_after_stage_two = result;
  return out;
}

// Fixed data of a modular exponentiation circuit: modulus and base are baked
// into the permutations, with the squared powers x^{2^i} mod n precomputed
// classically.
struct ModExpSpec {
  uint64_t modulus;
  uint64_t base;
  int out_width;       // register bits holding values mod n
  int exponent_width;  // bits of the exponent register
  std::vector<uint64_t> squared_powers;

  ModExpSpec(uint64_t n, uint64_t x, int a_bits)
      : modulus(n), base(x % n), out_width(bit_width(n)), exponent_width(a_bits) {
    if (n < 2 || n % 2 == 0)
      throw std::invalid_argument("ModExpSpec: modulus must be odd and >= 3");
    if (gcd_u64(base, n) != 1)
      throw std::invalid_argument("ModExpSpec: base and modulus must be coprime");
    if (a_bits < 1 || a_bits > 24)
      throw std::invalid_argument("ModExpSpec: exponent width out of range");
    squared_powers.reserve(a_bits);
    uint64_t p = base;
    for (int i = 0; i < a_bits; ++i) {
      squared_powers.push_back(p);
      p = p * p % n;
    }
  }
};

// Takes sum_a |a>|1> to sum_a |a>|x^a mod n> by conditioning a multiplication
// by x^{2^i} on bit i of the exponent register.  The output register must
// start at |1> on the whole support.
inline StateVector modexp_apply(const StateVector& s, const ModExpSpec& spec,
                                std::span<const int> a_wires,
                                std::span<const int> out_wires) {
  if (a_wires.size() != static_cast<std::size_t>(spec.exponent_width) ||
      out_wires.size() != static_cast<std::size_t>(spec.out_width))
    throw std::invalid_argument(
        "modexp_apply: wire lists do not match the ModExpSpec widths");
  for (int aw : a_wires)
    for (int ow : out_wires)
      if (aw == ow)
        throw std::invalid_argument("modexp_apply: exponent and output wires overlap");
  // Support analysis: every populated basis state must carry |1> in the
  // output register (covers basis inputs and superpositions alike).
  const std::vector<int> out_msb(out_wires.rbegin(), out_wires.rend());
  for (uint64_t i = 0; i < s.dimension(); ++i) {
    if (std::norm(s.amplitude(i)) <= 1e-24) continue;
    if (detail::gather_bits(i, out_msb) != 1)
      throw std::invalid_argument("modexp_apply: output register is not |1>");
  }
  StateVector state = s;
  for (int i = 0; i < spec.exponent_width; ++i) {
    const auto mul =
        mul_const_mod(spec.squared_powers[i], spec.modulus, spec.out_width);
    state = apply_controlled_permutation(state, mul, a_wires[i], out_msb);
  }
  return state;
}

struct AncillaReport {
  double off_zero_mass;  // probability the checked register is nonzero
  bool clean;            // off_zero_mass <= 1e-12
};

// Measures how much amplitude sits off |0...0> in an ancilla register that a
// correct uncompute must have cleared.
inline AncillaReport watchdog_check(const StateVector& s,
                                    std::span<const int> wires) {
  const Distribution dist = exact_distribution(s, wires);
  const double off = dist.total_mass() - dist.probability(0);
  return AncillaReport{off < 0.0 ? 0.0 : off, off <= 1e-12};
}

// Strict variant: stop-and-restart semantics on a dirty ancilla register.
inline void watchdog_enforce(const StateVector& s, std::span<const int> wires) {
  const AncillaReport report = watchdog_check(s, wires);
  if (!report.clean)
    throw std::runtime_error("watchdog: ancilla register carries nonzero mass");
}

}  // namespace shorsim
