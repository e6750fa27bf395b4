#include "shorsim/modarith.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.hh"

using namespace shorsim;
using test_support::expect_complex_near;

TEST(AddConstMod, Examples) {
  const auto id = add_const_mod(0, 33, 6);
  for (uint64_t b = 0; b < 33; ++b) EXPECT_EQ(id.image(b), b);

  const auto add5 = add_const_mod(5, 33, 6);
  EXPECT_EQ(add5.image(30), 2u);
  EXPECT_EQ(add5.image(40), 40u);  // above n: fixed point

  const auto add28 = add_const_mod(28, 33, 6);
  for (uint64_t b = 0; b < 33; ++b) EXPECT_EQ(add28.image(add5.image(b)), b);
}

TEST(AddConstMod, Validation) {
  EXPECT_THROW(add_const_mod(33, 33, 6), std::invalid_argument);
  EXPECT_THROW(add_const_mod(0, 65, 6), std::invalid_argument);
}

TEST(MulConstMod, Examples) {
  const auto one = mul_const_mod(1, 33, 6);
  EXPECT_TRUE(one.is_identity());

  const auto mul5 = mul_const_mod(5, 33, 6);
  EXPECT_EQ(mul5.image(7), 2u);
  const auto mul20 = mul_const_mod(modinv(5, 33), 33, 6);
  for (uint64_t b = 0; b < 64; ++b) EXPECT_EQ(mul20.image(mul5.image(b)), b);

  EXPECT_THROW(mul_const_mod(3, 33, 6), std::invalid_argument);  // gcd = 3
}

TEST(MulConstMod, InverseCompositionExhaustiveSmallModuli) {
  for (uint64_t n = 3; n <= 35; n += 2) {
    const int width = bit_width(n);
    for (uint64_t c = 1; c < n; ++c) {
      if (std::gcd(c, n) != 1) continue;
      const auto mul = mul_const_mod(c, n, width);
      const auto inv = mul_const_mod(modinv(c, n), n, width);
      for (uint64_t b = 0; b < (uint64_t{1} << width); ++b) {
        EXPECT_EQ(mul.image(b), b < n ? b * c % n : b);
        EXPECT_EQ(inv.image(mul.image(b)), b);
      }
    }
  }
}

TEST(MulStaged, IntermediateRegisterIsErasedForEveryInput) {
  for (uint64_t n : {15u, 21u, 33u}) {
    const int width = bit_width(n);
    for (uint64_t c = 2; c < n; ++c) {
      if (std::gcd(c, n) != 1) continue;
      for (uint64_t b = 0; b < n; ++b) {
        const auto trace = mul_const_mod_staged(c, n, width, b);
        EXPECT_EQ(trace.result_after_stage_one, b * c % n);
        EXPECT_EQ(trace.b_after_stage_one, b);
        EXPECT_EQ(trace.b_after_stage_two, 0u) << "c=" << c << " n=" << n << " b=" << b;
        EXPECT_EQ(trace.result_after_stage_two, b * c % n);
      }
    }
  }
}

TEST(MulStagedPermutations, WatchdogSeesACleanAncillaAfterUncompute) {
  const uint64_t n = 33, c = 5;
  const int width = bit_width(n);
  // Uniform superposition over b in [1, n) on the high register, 0 in the low.
  std::vector<Complex> amps(uint64_t{1} << (2 * width), Complex{0.0});
  const double amp = 1.0 / std::sqrt(static_cast<double>(n - 1));
  for (uint64_t b = 1; b < n; ++b) amps[b << width] = amp;
  StateVector s = StateVector::from_amplitudes(2 * width, std::move(amps));

  const auto all_wires = register_wires_msb_first(0, 2 * width);
  const auto b_wires = register_wires_msb_first(width, width);
  s = apply_permutation(s, mul_stage_one_permutation(c, n, width), all_wires);
  const AncillaReport dirty = watchdog_check(s, b_wires);
  EXPECT_NEAR(dirty.off_zero_mass, 1.0, 1e-12);  // uncompute skipped
  EXPECT_FALSE(dirty.clean);
  EXPECT_THROW(watchdog_enforce(s, b_wires), std::runtime_error);

  s = apply_permutation(s, mul_stage_two_permutation(c, n, width), all_wires);
  const AncillaReport clean = watchdog_check(s, b_wires);
  EXPECT_LE(clean.off_zero_mass, 1e-12);
  EXPECT_TRUE(clean.clean);
  EXPECT_NO_THROW(watchdog_enforce(s, b_wires));

  // The low register now holds b*c mod n with the original uniform weights.
  const auto result_wires = register_wires_msb_first(0, width);
  const Distribution d = exact_distribution(s, result_wires);
  for (uint64_t b = 1; b < n; ++b)
    EXPECT_NEAR(d.probability(b * c % n), 1.0 / static_cast<double>(n - 1), 1e-12);
}

TEST(Watchdog, ZeroStateIsClean) {
  const StateVector s(4, 0);
  const auto wires = register_wires_msb_first(0, 4);
  const AncillaReport r = watchdog_check(s, wires);
  EXPECT_EQ(r.off_zero_mass, 0.0);
  EXPECT_TRUE(r.clean);
}

TEST(ModExpSpec, PrecomputedPowersAndValidation) {
  const ModExpSpec spec(33, 5, 8);
  EXPECT_EQ(spec.out_width, 6);
  for (int i = 0; i < 8; ++i)
    EXPECT_EQ(spec.squared_powers[i], pow_mod(5, uint64_t{1} << i, 33));
  EXPECT_THROW(ModExpSpec(32, 5, 4), std::invalid_argument);  // even modulus
  EXPECT_THROW(ModExpSpec(33, 3, 4), std::invalid_argument);  // shared factor
}

namespace {
StateVector modexp_on_basis(uint64_t n, uint64_t x, int a_bits, uint64_t a) {
  const ModExpSpec spec(n, x, a_bits);
  const int nw = spec.out_width;
  StateVector s(a_bits + nw, (a << nw) | 1);
  std::vector<int> a_wires(a_bits), out_wires(nw);
  for (int i = 0; i < a_bits; ++i) a_wires[i] = nw + i;
  for (int i = 0; i < nw; ++i) out_wires[i] = i;
  return modexp_apply(s, spec, a_wires, out_wires);
}
}  // namespace

TEST(ModExpApply, BasisExamples) {
  expect_complex_near(modexp_on_basis(15, 7, 3, 4).amplitude((4u << 4) | 1), {1, 0}, 0);
  expect_complex_near(modexp_on_basis(33, 5, 3, 5).amplitude((5u << 6) | 23), {1, 0}, 0);
  expect_complex_near(modexp_on_basis(33, 5, 3, 0).amplitude((0u << 6) | 1), {1, 0}, 0);
}

TEST(ModExpApply, MatchesPowModOnTheFullSuperposition) {
  const uint64_t n = 33, x = 5;
  const int a_bits = 4;
  const ModExpSpec spec(n, x, a_bits);
  const int nw = spec.out_width;
  std::vector<Complex> amps(uint64_t{1} << (a_bits + nw), Complex{0.0});
  for (uint64_t a = 0; a < (uint64_t{1} << a_bits); ++a)
    amps[(a << nw) | 1] = 0.25;
  StateVector s = StateVector::from_amplitudes(a_bits + nw, std::move(amps));
  std::vector<int> a_wires(a_bits), out_wires(nw);
  for (int i = 0; i < a_bits; ++i) a_wires[i] = nw + i;
  for (int i = 0; i < nw; ++i) out_wires[i] = i;

  const Distribution before = exact_distribution(
      s, std::vector<int>(a_wires.rbegin(), a_wires.rend()));
  s = modexp_apply(s, spec, a_wires, out_wires);
  for (uint64_t a = 0; a < (uint64_t{1} << a_bits); ++a)
    expect_complex_near(s.amplitude((a << nw) | pow_mod(x, a, n)), {0.25, 0}, 1e-12);
  // Controlled multiplication leaves the exponent-register marginal alone.
  const Distribution after = exact_distribution(
      s, std::vector<int>(a_wires.rbegin(), a_wires.rend()));
  for (uint64_t a = 0; a < before.probabilities.size(); ++a)
    EXPECT_EQ(before.probabilities[a], after.probabilities[a]);
}

TEST(ModExpApply, RejectsBadInputs) {
  const ModExpSpec spec(15, 7, 2);
  StateVector wrong(2 + 4, 0);  // output register |0>, not |1>
  std::vector<int> a_wires = {4, 5}, out_wires = {0, 1, 2, 3};
  EXPECT_THROW(modexp_apply(wrong, spec, a_wires, out_wires), std::invalid_argument);

  StateVector ok(2 + 4, 1);
  std::vector<int> overlap = {3, 5};
  EXPECT_THROW(modexp_apply(ok, spec, overlap, out_wires), std::invalid_argument);
}
