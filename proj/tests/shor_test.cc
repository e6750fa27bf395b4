#include "shorsim/shor.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "test_support.hh"

using namespace shorsim;

TEST(ChooseQ, Examples) {
  EXPECT_EQ(choose_q(33), 2048u);  // 1089 <= 2048 < 2178
  EXPECT_EQ(choose_q(15), 256u);   // 225 <= 256 < 450
  EXPECT_EQ(choose_q(2), 4u);
  for (uint64_t n = 2; n < 200; ++n) {
    const uint64_t q = choose_q(n);
    EXPECT_GE(q, n * n);
    EXPECT_LT(q, 2 * n * n);
    EXPECT_EQ(q & (q - 1), 0u);
  }
}

TEST(AnalyticCDistribution, FigureValuesForQ256R10) {
  const CDistribution dist = analytic_c_distribution(256, 10);
  // 6 residue classes of 26 terms and 4 of 25: (6*26^2 + 4*25^2)/65536.
  EXPECT_DOUBLE_EQ(dist.marginal(0), 6556.0 / 65536.0);
  EXPECT_DOUBLE_EQ(dist.marginal(128), 6556.0 / 65536.0);
  EXPECT_NEAR(dist.marginal(26), 0.0572951943126286, 1e-12);
  EXPECT_NEAR(dist.marginal(25), 0.0254733648910963, 1e-12);
  EXPECT_NEAR(dist.total_mass(), 1.0, 1e-9);
}

TEST(AnalyticCDistribution, OrderOneElementIsAPointMass) {
  const CDistribution dist = analytic_c_distribution(64, 1);
  EXPECT_DOUBLE_EQ(dist.marginal(0), 1.0);
  for (uint64_t c = 1; c < 64; ++c) EXPECT_LE(dist.marginal(c), 1e-15);
}

TEST(AnalyticCDistribution, StateProbabilitiesSumToTheMarginal) {
  const CDistribution dist = analytic_c_distribution(256, 10);
  for (uint64_t c : {0u, 25u, 26u, 128u, 200u}) {
    double acc = 0.0;
    for (uint64_t k = 0; k < 10; ++k) acc += dist.state_probability(c, k);
    EXPECT_NEAR(acc, dist.marginal(c), 1e-14);
  }
  EXPECT_THROW(dist.state_probability(0, 10), std::invalid_argument);
  EXPECT_THROW(dist.state_probability(256, 0), std::invalid_argument);
}

TEST(AnalyticCDistribution, Validation) {
  EXPECT_THROW(analytic_c_distribution(100, 3), std::invalid_argument);  // not 2^l
  EXPECT_THROW(analytic_c_distribution(64, 0), std::invalid_argument);
  EXPECT_THROW(analytic_c_distribution(64, 64), std::invalid_argument);
}

TEST(OrderBounds, PeakStatesAndGoodDMass) {
  const OrderBoundsReport big = check_order_bounds(2048, 10);
  EXPECT_TRUE(big.per_state_ok);
  EXPECT_GE(big.min_peak_state_probability, 1.0 / 300.0);
  EXPECT_TRUE(big.good_d_ok);
  EXPECT_NEAR(big.good_d_mass, 0.2895869868050238, 1e-9);
  EXPECT_GE(big.good_d_mass, 2.0 / 15.0);
  EXPECT_EQ(big.peak_state_count, 100u);  // 10 c values, 10 k's each

  const OrderBoundsReport fig = check_order_bounds(256, 10);
  EXPECT_TRUE(fig.per_state_ok);
  EXPECT_TRUE(fig.good_d_ok);
}

TEST(OrderExperiment, Validation) {
  EXPECT_NO_THROW(make_order_experiment(33, 5, std::nullopt, Backend::ClosedForm, 1));
  EXPECT_THROW(make_order_experiment(32, 5, std::nullopt, Backend::ClosedForm, 1),
               std::invalid_argument);  // even n
  EXPECT_THROW(make_order_experiment(33, 3, std::nullopt, Backend::ClosedForm, 1),
               std::invalid_argument);  // shared factor
  EXPECT_THROW(make_order_experiment(33, 5, 100, Backend::ClosedForm, 1),
               std::invalid_argument);  // q not a power of two
}

TEST(OrderBackends, GateLevelMatchesTheClosedFormPointwise) {
  const auto gate = order_c_distribution(
      make_order_experiment(33, 5, 256, Backend::GateLevel, 1));
  const auto closed = order_c_distribution(
      make_order_experiment(33, 5, 256, Backend::ClosedForm, 1));
  ASSERT_EQ(gate.size(), 256u);
  for (uint64_t c = 0; c < 256; ++c)
    EXPECT_NEAR(gate[c], closed[c], 1e-9) << "c=" << c;
}

TEST(OrderBackends, SupportConcentratesNearMultiplesOfQOverR) {
  // n=15, x=7 has r=4; with q=256 the peaks sit exactly on multiples of 64.
  const auto dist = order_c_distribution(
      make_order_experiment(15, 7, 256, Backend::ClosedForm, 1));
  std::vector<uint64_t> order(256);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + 4, order.end(),
                    [&](uint64_t a, uint64_t b) { return dist[a] > dist[b]; });
  const std::set<uint64_t> top(order.begin(), order.begin() + 4);
  EXPECT_EQ(top, (std::set<uint64_t>{0, 64, 128, 192}));
}

TEST(RunOrderOnce, FixedSeedIsReproducible) {
  const auto exp = make_order_experiment(33, 5, 256, Backend::ClosedForm, 7);
  std::mt19937_64 a(7), b(7);
  EXPECT_EQ(run_order_once(exp, a), run_order_once(exp, b));

  const auto gate_exp = make_order_experiment(33, 5, 256, Backend::GateLevel, 7);
  std::mt19937_64 c(7), d(7);
  EXPECT_EQ(run_order_once(gate_exp, c), run_order_once(gate_exp, d));
}

TEST(CandidatesFromC, RecoversTenFromTheWorkedTrace) {
  const auto cands = candidates_from_c(614, 2048, 33, 2, 12);
  const auto has = [&](uint64_t v, CandidateSource src) {
    return std::any_of(cands.begin(), cands.end(), [&](const OrderCandidate& c) {
      return c.value == v && c.source == src;
    });
  };
  EXPECT_TRUE(has(10, CandidateSource::Direct));  // 614/2048 rounds to 3/10
  for (std::size_t i = 1; i < cands.size(); ++i)
    EXPECT_LT(cands[i - 1].value, cands[i].value);  // ascending, deduplicated
}

TEST(CandidatesFromC, NeighborOffsetsReachTheFraction) {
  const auto cands = candidates_from_c(615, 2048, 33, 2, 12);
  const auto ten = std::find_if(cands.begin(), cands.end(),
                                [](const OrderCandidate& c) { return c.value == 10; });
  ASSERT_NE(ten, cands.end());
  EXPECT_EQ(ten->source, CandidateSource::Neighbor);
  EXPECT_EQ(ten->base, 10u);
}

TEST(CandidatesFromC, DegenerateZeroYieldsTheMultipleLadder) {
  const auto cands = candidates_from_c(0, 2048, 33, 0, 5);
  ASSERT_EQ(cands.size(), 5u);
  for (uint64_t m = 1; m <= 5; ++m) {
    EXPECT_EQ(cands[m - 1].value, m);
    EXPECT_EQ(cands[m - 1].base, 1u);
  }
}

TEST(CandidatesFromC, NearDOverTenWithUnitNumerator) {
  const auto cands = candidates_from_c(205, 2048, 33, 0, 12);
  EXPECT_TRUE(std::any_of(cands.begin(), cands.end(),
                          [](const OrderCandidate& c) { return c.value == 10; }));
}

TEST(FindOrder, WorkedExamples) {
  OrderPolicy policy;
  policy.seed = 11;
  const OrderOutcome a = find_order(33, 5, policy);
  ASSERT_EQ(a.status, RunStatus::Success);
  EXPECT_EQ(*a.order, 10u);
  EXPECT_EQ(a.q, 2048u);

  const OrderOutcome b = find_order(15, 7, policy);
  ASSERT_EQ(b.status, RunStatus::Success);
  EXPECT_EQ(*b.order, 4u);

  const OrderOutcome c = find_order(15, 4, policy);
  ASSERT_EQ(c.status, RunStatus::Success);
  EXPECT_EQ(*c.order, 2u);
}

TEST(FindOrder, GateBackendOnTheDemonstrationQ) {
  OrderPolicy policy;
  policy.backend = Backend::GateLevel;
  policy.q_override = 256;  // 14 wires
  policy.seed = 5;
  const OrderOutcome o = find_order(33, 5, policy);
  ASSERT_EQ(o.status, RunStatus::Success);
  EXPECT_EQ(*o.order, 10u);
}

TEST(FindOrder, ExhaustedBudgetIsReported) {
  OrderPolicy policy;
  policy.max_trials = 0;
  const OrderOutcome o = find_order(33, 5, policy);
  EXPECT_EQ(o.status, RunStatus::BudgetExhausted);
  EXPECT_FALSE(o.order.has_value());
}

TEST(FindOrder, EveryTrialRecordsItsCandidates) {
  OrderPolicy policy;
  policy.seed = 2;
  const OrderOutcome o = find_order(33, 5, policy);
  ASSERT_EQ(o.status, RunStatus::Success);
  ASSERT_FALSE(o.trials.empty());
  EXPECT_TRUE(o.trials.back().verified_order.has_value());
  EXPECT_TRUE(o.trials.back().verified_source.has_value());
  for (const auto& t : o.trials) {
    EXPECT_LT(t.observed_c, o.q);
    // No candidate below the reported order satisfies the congruence.
    for (const auto& cand : t.candidates) {
      if (cand.value > 0 && cand.value < *o.order) {
        EXPECT_NE(pow_mod(5, cand.value, 33), 1u);
      }
    }
  }
}

TEST(FindOrder, LcmCombinationRescuesComplementaryFailures) {
  // Order of 3 mod 119 is 48 = 16 * 3.  With neighbors and multiples turned
  // off, single trials only yield proper divisors of 48 when the sampled d
  // shares a factor with it; the lcm of two complementary failures wins.
  OrderPolicy policy;
  policy.seed = 3;
  policy.neighbor_radius = 0;
  policy.multiple_bound = 1;
  policy.max_trials = 50;
  const OrderOutcome o = find_order(119, 3, policy);
  ASSERT_EQ(o.status, RunStatus::Success);
  EXPECT_EQ(*o.order, 48u);
  ASSERT_TRUE(o.trials.back().verified_source.has_value());
  EXPECT_EQ(*o.trials.back().verified_source, CandidateSource::LcmCombination);
  EXPECT_EQ(brute_order(3, 119), 48u);
}

TEST(AqftOrderFinding, SuccessWithinAFactorTwoOfTheExactTransform) {
  // Post-processing success probability under the approximate transform with
  // cutoff 3 stays within a factor two of the exact transform's.
  const auto recovers = [](uint64_t c) {
    for (const auto& cand : candidates_from_c(c, 256, 33, 2, 12))
      if (cand.value > 0 && pow_mod(5, cand.value, 33) == 1) return true;
    return false;
  };
  const auto success_mass = [&](int cutoff) {
    const OrderFindingState ofs = order_finding_state(33, 5, 256, cutoff);
    const auto dist = exact_distribution(ofs.state, ofs.c_readout_wires);
    double mass = 0.0;
    for (uint64_t c = 0; c < 256; ++c)
      if (recovers(c)) mass += dist.probabilities[c];
    return mass;
  };
  const double exact = success_mass(0);
  const double approx = success_mass(3);
  EXPECT_GT(exact, 0.9);  // nearly every observation post-processes to r=10
  EXPECT_GE(approx, 0.5 * exact);
}

TEST(Factor, SmallComposites) {
  for (uint64_t n : {15u, 21u, 33u, 35u, 55u}) {
    FactorPolicy policy;
    policy.seed = 1;
    const FactorOutcome o = factor(n, policy);
    ASSERT_EQ(o.status, RunStatus::Success) << "n=" << n;
    ASSERT_TRUE(o.divisor.has_value());
    EXPECT_GT(*o.divisor, 1u);
    EXPECT_LT(*o.divisor, n);
    EXPECT_EQ(n % *o.divisor, 0u);
  }
}

TEST(Factor, ArithmeticTraces) {
  // n=15, x=7: r=4, gcd(7^2-1, 15) = 3 and gcd(7^2+1, 15) = 5.
  EXPECT_EQ(brute_order(7, 15), 4u);
  EXPECT_EQ(gcd_u64(pow_mod(7, 2, 15) - 1, 15), 3u);
  EXPECT_EQ(gcd_u64(pow_mod(7, 2, 15) + 1, 15), 5u);
  // n=33, x=5: r=10, 5^5 == 23 == -10, gcd(22, 33) = 11.
  EXPECT_EQ(pow_mod(5, 5, 33), 23u);
  EXPECT_EQ(gcd_u64(22, 33), 11u);
  // n=33, x=32: r=2 and 32 == -1 mod 33, the rejected branch.
  EXPECT_EQ(brute_order(32, 33), 2u);
  EXPECT_EQ(pow_mod(32, 1, 33), 32u);
}

TEST(Factor, RejectsNonComposites) {
  FactorPolicy policy;
  EXPECT_THROW(factor(16, policy), std::invalid_argument);  // even
  EXPECT_THROW(factor(17, policy), std::invalid_argument);  // prime
  EXPECT_THROW(factor(27, policy), std::invalid_argument);  // prime power
}

TEST(Factor, MillerReductionSuccessFractionOnThirtyThree) {
  // Enumerate every x coprime to 33: at least half must give a factor
  // directly (k = 2 distinct prime factors -> bound 1 - 1/2^{k-1} = 1/2).
  int good = 0, total = 0;
  for (uint64_t x = 1; x < 33; ++x) {
    if (std::gcd(x, 33ul) != 1) continue;
    ++total;
    const uint64_t r = brute_order(x, 33);
    if (r % 2 != 0) continue;
    if (pow_mod(x, r / 2, 33) == 32) continue;
    ++good;
  }
  EXPECT_EQ(total, 20);
  EXPECT_GE(2 * good, total);
  EXPECT_EQ(good, 10);  // exactly half for n=33
}

TEST(OrderOfPermutation, Examples) {
  const IterateOracle add3 = [](uint64_t e, uint64_t k) { return (e + 3 * k) % 9; };
  EXPECT_EQ(order_of_permutation(add3, 0, 9), 3u);

  const IterateOracle identity = [](uint64_t e, uint64_t) { return e; };
  EXPECT_EQ(order_of_permutation(identity, 4, 9), 1u);

  const IterateOracle mul5 = [](uint64_t e, uint64_t k) {
    return e * pow_mod(5, k, 33) % 33;
  };
  EXPECT_EQ(order_of_permutation(mul5, 1, 33), 10u);
  EXPECT_EQ(order_of_permutation(mul5, 1, 33), brute_order(5, 33));
}

TEST(OrderOfPermutation, InconsistentOracleIsRejected) {
  const IterateOracle broken = [](uint64_t e, uint64_t k) {
    return (e + k * k) % 9;  // not an iterate: f^{j+k} != f^j . f^k
  };
  EXPECT_THROW(order_of_permutation(broken, 1, 9), std::runtime_error);
}
