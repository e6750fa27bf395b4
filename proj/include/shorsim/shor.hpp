// shor.hpp
// Order finding and its reduction to factoring: the exact measurement
// distribution over the first register, a full gate-level pipeline and a
// closed-form backend that agree pointwise, continued-fraction candidate
// extraction with the neighbor / small-multiple / lcm refinements, and the
// generic permutation-order variant.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shorsim/modarith.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/qft.hpp"
#include "shorsim/state_vector.hpp"

namespace shorsim {

// The power of two q with n^2 <= q < 2 n^2.
inline uint64_t choose_q(uint64_t n) {
  if (n < 2) throw std::invalid_argument("choose_q: n must be >= 2");
  uint64_t q = 1;
  while (q < n * n) q <<= 1;
  return q;
}

// Exact measurement distribution of the first register after order finding:
//   P(c, k) = | (1/q) sum_{b=0}^{floor((q-k-1)/r)} exp(2 pi i b <rc>_q / q) |^2
// for k < r, with the signed residue <rc>_q in (-q/2, q/2].  The term count
// takes only two values: writing q = m r + s, it is m+1 for k < s and m for
// the rest, which keeps evaluation O(1) per c.
class CDistribution {
 public:
  CDistribution(uint64_t q, uint64_t r) : q_(q), r_(r) {
    if (q < 2 || (q & (q - 1)) != 0)
      throw std::invalid_argument("CDistribution: q must be a power of two");
    if (r < 1 || r >= q)
      throw std::invalid_argument("CDistribution: need 1 <= r < q");
    marginal_.resize(q);
    const uint64_t m = q / r;
    const uint64_t s = q % r;
    for (uint64_t c = 0; c < q; ++c) {
      const int64_t sr = signed_residue(static_cast<int64_t>(r * c),
                                        static_cast<int64_t>(q));
      if (sr == 0) {
        // Count-based closed form, exact in integers.
        const uint64_t num = s * (m + 1) * (m + 1) + (r - s) * m * m;
        marginal_[c] = static_cast<double>(num) /
                       (static_cast<double>(q) * static_cast<double>(q));
      } else {
        marginal_[c] = (static_cast<double>(s) * geometric_power(m + 1, sr) +
                        static_cast<double>(r - s) * geometric_power(m, sr)) /
                       (static_cast<double>(q) * static_cast<double>(q));
      }
    }
  }

  uint64_t q() const noexcept { return q_; }
  uint64_t r() const noexcept { return r_; }
  const std::vector<double>& marginal_vector() const noexcept { return marginal_; }
  double marginal(uint64_t c) const { return marginal_.at(c); }

  // Probability of the joint state (c, x^k mod n), 0 <= k < r.
  double state_probability(uint64_t c, uint64_t k) const {
    if (c >= q_ || k >= r_)
      throw std::invalid_argument("CDistribution: state out of range");
    const uint64_t count = (q_ - k - 1) / r_ + 1;
    const int64_t sr = signed_residue(static_cast<int64_t>(r_ * c),
                                      static_cast<int64_t>(q_));
    const double num = sr == 0 ? static_cast<double>(count) * static_cast<double>(count)
                               : geometric_power(count, sr);
    return num / (static_cast<double>(q_) * static_cast<double>(q_));
  }

  double total_mass() const {
    double acc = 0.0;
    for (double p : marginal_) acc += p;
    return acc;
  }

 private:
  // |sum_{b=0}^{count-1} exp(2 pi i b sr / q)|^2 = sin^2(pi count sr / q) /
  // sin^2(pi sr / q).  Angles are reduced in exact integers first so the
  // evaluation stays accurate for large counts, and the sum's exact zeros
  // (count * sr == 0 mod q) come out as exact zeros.
  double geometric_power(uint64_t count, int64_t sr) const {
    const uint64_t a = static_cast<uint64_t>(sr < 0 ? -sr : sr);
    const uint64_t top = count * a % (2 * q_);
    if (top % q_ == 0) return 0.0;
    const double num = std::sin(std::numbers::pi * static_cast<double>(top) /
                                static_cast<double>(q_));
    const double den = std::sin(std::numbers::pi * static_cast<double>(a) /
                                static_cast<double>(q_));
    return (num * num) / (den * den);
  }

  uint64_t q_;
  uint64_t r_;
  std::vector<double> marginal_;
};

inline CDistribution analytic_c_distribution(uint64_t q, uint64_t r) {
  return CDistribution(q, r);
}

enum class Backend { GateLevel, ClosedForm };

struct OrderExperiment {
  uint64_t n;
  uint64_t x;
  uint64_t q;
  Backend backend;
  uint64_t seed;
};

inline OrderExperiment make_order_experiment(uint64_t n, uint64_t x,
                                             std::optional<uint64_t> q_override,
                                             Backend backend, uint64_t seed) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("order experiment: n must be odd and >= 3");
  if (x % n == 0 || gcd_u64(x % n, n) != 1)
    throw std::invalid_argument("order experiment: x and n must be coprime");
  const uint64_t q = q_override.value_or(choose_q(n));
  if (q < 2 || (q & (q - 1)) != 0)
    throw std::invalid_argument("order experiment: q must be a power of two");
  return OrderExperiment{n, x % n, q, backend, seed};
}

// Gate-level pipeline state and how to read it out.
struct OrderFindingState {
  StateVector state;
  std::vector<int> c_readout_wires;  // msb-first wire list for the observed c
  std::vector<int> out_wires;        // msb-first wire list of the work register
};

// Uniform superposition via one R gate per exponent wire, reversible modular
// exponentiation, then the Fourier gate sequence with reversed readout.
// qft_cutoff = 0 runs the exact transform; otherwise the approximate variant
// with that phase cutoff is substituted.
inline OrderFindingState order_finding_state(uint64_t n, uint64_t x, uint64_t q,
                                             int qft_cutoff = 0) {
  const int l = bit_width(q) - 1;
  const int nw = bit_width(n);
  if (l + nw > kDefaultMaxWires)
    throw std::invalid_argument("order_finding_state: exceeds the wire budget");
  StateVector state(l + nw, 1);  // exponent register |0>, work register |1>
  const Gate r = r_gate();
  std::vector<int> a_wires(l);
  for (int j = 0; j < l; ++j) a_wires[j] = nw + j;
  for (int j = 0; j < l; ++j) {
    const int w[] = {a_wires[j]};
    state = apply_unitary(state, r, w);
  }
  std::vector<int> out_wires(nw);
  for (int j = 0; j < nw; ++j) out_wires[j] = j;
  const ModExpSpec spec(n, x, l);
  state = modexp_apply(state, spec, a_wires, out_wires);
  state = apply_qft(state,
                    qft_cutoff == 0 ? qft_circuit(l) : aqft_circuit(l, qft_cutoff),
                    a_wires);
  // Reversed readout: wire nw+j carries bit l-1-j of c, so ascending wire
  // order is exactly msb-first for c.
  std::vector<int> readout(l);
  for (int j = 0; j < l; ++j) readout[j] = nw + j;
  return OrderFindingState{std::move(state), std::move(readout),
                           register_wires_msb_first(0, nw)};
}

// Exact distribution of the observed c under either backend.  The two agree
// pointwise; the gate-level one exists to validate the circuits and the
// closed form to scale the statistics.
inline std::vector<double> order_c_distribution(const OrderExperiment& exp) {
  if (exp.backend == Backend::GateLevel) {
    const OrderFindingState ofs = order_finding_state(exp.n, exp.x, exp.q);
    return exact_distribution(ofs.state, ofs.c_readout_wires).probabilities;
  }
  return analytic_c_distribution(exp.q, brute_order(exp.x, exp.n)).marginal_vector();
}

namespace detail {
// Shared inverse-CDF draw so both backends consume the generator identically.
inline uint64_t sample_index(std::mt19937_64& rng, std::span<const double> probs) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  uint64_t last_nonzero = 0;
  for (uint64_t v = 0; v < probs.size(); ++v) {
    if (probs[v] > 0.0) last_nonzero = v;
    cumulative += probs[v];
    if (u < cumulative) return v;
  }
  return last_nonzero;
}

inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
  // Rejection sampling keeps the draw identical across platforms.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}
}  // namespace detail

// One experiment: returns the observed first-register value c.
inline uint64_t run_order_once(const OrderExperiment& exp, std::mt19937_64& rng) {
  if (exp.backend == Backend::GateLevel) {
    const OrderFindingState ofs = order_finding_state(exp.n, exp.x, exp.q);
    return sample_measurement(ofs.state, rng, ofs.c_readout_wires).observed;
  }
  const CDistribution dist = analytic_c_distribution(exp.q, brute_order(exp.x, exp.n));
  return detail::sample_index(rng, dist.marginal_vector());
}

enum class CandidateSource { Direct, Neighbor, Multiple, LcmCombination };

inline const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::Direct: return "direct";
    case CandidateSource::Neighbor: return "neighbor";
    case CandidateSource::Multiple: return "multiple";
    case CandidateSource::LcmCombination: return "lcm";
  }
  return "?";
}

struct OrderCandidate {
  uint64_t value;
  CandidateSource source;
  int64_t neighbor_delta;  // offset from the observed c
  uint64_t base;           // the recovered denominator r' this grew from
};

// Post-processing refinements: round c and its neighbors c +- delta to the
// nearest fraction with denominator below n, then consider small multiples of
// each recovered denominator.  Deduplicated, ascending by value.
inline std::vector<OrderCandidate> candidates_from_c(uint64_t c, uint64_t q,
                                                     uint64_t n,
                                                     int neighbor_radius,
                                                     uint64_t multiple_bound) {
  if (c >= q) throw std::invalid_argument("candidates_from_c: c out of range");
  std::vector<OrderCandidate> out;
  for (int64_t delta = -neighbor_radius; delta <= neighbor_radius; ++delta) {
    const int64_t cprime = static_cast<int64_t>(c) + delta;
    if (cprime < 0 || cprime >= static_cast<int64_t>(q)) continue;
    const auto frac = nearest_fraction(static_cast<uint64_t>(cprime), q, n);
    if (!frac) continue;
    const uint64_t base = static_cast<uint64_t>(frac->denominator);
    for (uint64_t mult = 1; mult <= multiple_bound; ++mult) {
      const CandidateSource source =
          mult > 1 ? CandidateSource::Multiple
                   : (delta == 0 ? CandidateSource::Direct
                                 : CandidateSource::Neighbor);
      out.push_back({base * mult, source, delta, base});
    }
  }
  const auto rank = [](CandidateSource s) {
    switch (s) {
      case CandidateSource::Direct: return 0;
      case CandidateSource::Neighbor: return 1;
      case CandidateSource::Multiple: return 2;
      case CandidateSource::LcmCombination: return 3;
    }
    return 4;
  };
  std::sort(out.begin(), out.end(),
            [&](const OrderCandidate& a, const OrderCandidate& b) {
              if (a.value != b.value) return a.value < b.value;
              return rank(a.source) < rank(b.source);
            });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const OrderCandidate& a, const OrderCandidate& b) {
                          return a.value == b.value;
                        }),
            out.end());
  return out;
}

inline uint64_t default_multiple_bound(uint64_t n) {
  const double lg = std::log2(static_cast<double>(n));
  return static_cast<uint64_t>(std::ceil(std::pow(lg, 1.5)));
}

struct OrderPolicy {
  int max_trials = 20;
  int neighbor_radius = 2;
  uint64_t multiple_bound = 0;  // 0 selects ceil((log2 n)^1.5)
  Backend backend = Backend::ClosedForm;
  uint64_t seed = 1;
  std::optional<uint64_t> q_override;
};

enum class RunStatus { Success, BudgetExhausted };

struct OrderTrial {
  uint64_t observed_c;
  std::vector<OrderCandidate> candidates;  // includes any lcm combinations tried
  std::optional<uint64_t> verified_order;
  std::optional<CandidateSource> verified_source;  // which refinement won
};

struct OrderOutcome {
  RunStatus status;
  std::optional<uint64_t> order;
  uint64_t q;
  uint64_t multiple_bound;
  std::vector<OrderTrial> trials;
};

// Repeats the experiment until some candidate verifies x^cand == 1 (mod n);
// the returned order is the verified candidate reduced to minimality (for
// every prime p | r, x^{r/p} != 1).  Failed denominators feed lcm
// combinations on later trials.
inline OrderOutcome find_order(uint64_t n, uint64_t x, const OrderPolicy& policy) {
  const OrderExperiment exp =
      make_order_experiment(n, x, policy.q_override, policy.backend, policy.seed);
  const uint64_t multiple_bound =
      policy.multiple_bound != 0 ? policy.multiple_bound : default_multiple_bound(n);
  OrderOutcome outcome{RunStatus::BudgetExhausted, std::nullopt, exp.q,
                       multiple_bound, {}};
  std::mt19937_64 rng(policy.seed);
  std::vector<uint64_t> failed_bases;
  for (int trial = 0; trial < policy.max_trials; ++trial) {
    const uint64_t c = run_order_once(exp, rng);
    OrderTrial record{c, candidates_from_c(c, exp.q, n, policy.neighbor_radius,
                                           multiple_bound),
                      std::nullopt, std::nullopt};
    // lcm refinement: combine this trial's denominators with earlier failures.
    std::vector<uint64_t> bases;
    for (const auto& cand : record.candidates)
      if (cand.value == cand.base) bases.push_back(cand.base);
    for (uint64_t fresh : bases)
      for (uint64_t old : failed_bases) {
        const uint64_t g = gcd_u64(fresh, old);
        const uint64_t combined = fresh / g * old;
        record.candidates.push_back(
            {combined, CandidateSource::LcmCombination, 0, fresh});
      }
    for (const auto& cand : record.candidates) {
      if (cand.value == 0 || cand.value >= n * n) continue;
      if (pow_mod(x, cand.value, n) == 1) {
        const uint64_t order = order_from_multiple(x, n, cand.value);
        record.verified_order = order;
        record.verified_source = cand.source;
        outcome.trials.push_back(std::move(record));
        outcome.status = RunStatus::Success;
        outcome.order = order;
        return outcome;
      }
    }
    for (uint64_t b : bases) failed_bases.push_back(b);
    outcome.trials.push_back(std::move(record));
  }
  return outcome;
}

struct FactorPolicy {
  int max_trials = 20;
  OrderPolicy order_policy;
  uint64_t seed = 1;
};

struct FactorTrial {
  uint64_t x;
  uint64_t gcd_with_n;
  std::optional<uint64_t> order;
  std::string note;  // failure reason or success path
  std::optional<uint64_t> divisor;
};

struct FactorOutcome {
  RunStatus status;
  std::optional<uint64_t> divisor;
  std::vector<FactorTrial> trials;
};

// Reduction from order finding: draw random x, find its order r, and read a
// divisor off gcd(x^{r/2} - 1, n).  Retries on odd r or x^{r/2} == -1; an x
// sharing a factor with n short-circuits to that factor.
inline FactorOutcome factor(uint64_t n, const FactorPolicy& policy) {
  const auto cls = classify_n(n);
  if (cls.kind != NClass::CompositeOk)
    throw std::invalid_argument(
        "factor: n must be odd, composite, and not a prime power");
  FactorOutcome outcome{RunStatus::BudgetExhausted, std::nullopt, {}};
  std::mt19937_64 rng(policy.seed);
  for (int trial = 0; trial < policy.max_trials; ++trial) {
    const uint64_t x = 2 + detail::uniform_below(rng, n - 2);
    FactorTrial record{x, gcd_u64(x, n), std::nullopt, "", std::nullopt};
    if (record.gcd_with_n > 1) {
      record.note = "x shares a factor with n";
      record.divisor = record.gcd_with_n;
      outcome.trials.push_back(std::move(record));
      outcome.status = RunStatus::Success;
      outcome.divisor = outcome.trials.back().divisor;
      return outcome;
    }
    OrderPolicy op = policy.order_policy;
    op.seed = policy.seed * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(trial) + 1;
    const OrderOutcome oo = find_order(n, x, op);
    if (oo.status != RunStatus::Success) {
      record.note = "order search exhausted its budget";
      outcome.trials.push_back(std::move(record));
      continue;
    }
    const uint64_t r = *oo.order;
    record.order = r;
    if (r % 2 == 1) {
      record.note = "order is odd";
      outcome.trials.push_back(std::move(record));
      continue;
    }
    const uint64_t half_power = pow_mod(x, r / 2, n);
    if (half_power == n - 1) {
      record.note = "x^{r/2} is -1 mod n";
      outcome.trials.push_back(std::move(record));
      continue;
    }
    const uint64_t d = gcd_u64(half_power - 1, n);
    if (d <= 1 || d >= n) {
      record.note = "gcd came out trivial";
      outcome.trials.push_back(std::move(record));
      continue;
    }
    record.note = "gcd(x^{r/2}-1, n)";
    record.divisor = d;
    outcome.trials.push_back(std::move(record));
    outcome.status = RunStatus::Success;
    outcome.divisor = d;
    return outcome;
  }
  return outcome;
}

// Oracle supplying the k-th iterate of any element under a permutation f.
using IterateOracle = std::function<uint64_t(uint64_t element, uint64_t k)>;

// Order of `start` under a black-box permutation, recovered through the same
// closed-form machinery with q >= bound^2.  The oracle is spot-checked for
// iterate consistency before use.
inline uint64_t order_of_permutation(const IterateOracle& f, uint64_t start,
                                     uint64_t bound, uint64_t seed = 1) {
  if (bound < 1) throw std::invalid_argument("order_of_permutation: empty domain");
  std::mt19937_64 rng(seed);
  for (int check = 0; check < 8; ++check) {
    const uint64_t j = detail::uniform_below(rng, bound) + 1;
    const uint64_t k = detail::uniform_below(rng, bound) + 1;
    if (f(start, j + k) != f(f(start, j), k))
      throw std::runtime_error("order_of_permutation: oracle is inconsistent");
  }
  uint64_t cycle = 0;
  uint64_t e = start;
  for (uint64_t k = 1; k <= bound; ++k) {
    e = f(e, 1);
    if (e == start) {
      cycle = k;
      break;
    }
  }
  if (cycle == 0)
    throw std::runtime_error("order_of_permutation: no return within the bound");
  uint64_t q = 1;
  while (q < bound * bound) q <<= 1;
  if (q < 4) q = 4;
  const CDistribution dist(q, cycle);
  const uint64_t multiple_bound = default_multiple_bound(bound < 4 ? 4 : bound);
  const auto verifies = [&](uint64_t r) { return r >= 1 && f(start, r) == start; };
  for (int trial = 0; trial < 64; ++trial) {
    const uint64_t c = detail::sample_index(rng, dist.marginal_vector());
    for (const auto& cand :
         candidates_from_c(c, q, bound < 2 ? 2 : bound, 2, multiple_bound)) {
      if (cand.value == 0 || !verifies(cand.value)) continue;
      uint64_t r = cand.value;
      for (const auto& pp : factorize(r))
        for (int e2 = 0; e2 < pp.exponent; ++e2)
          if (r % pp.prime == 0 && verifies(r / pp.prime)) r /= pp.prime;
      return r;
    }
  }
  throw std::runtime_error("order_of_permutation: trial budget exhausted");
}

struct OrderBoundsReport {
  uint64_t q;
  uint64_t r;
  double min_peak_state_probability;  // over states with |<rc>_q| <= r/2
  double peak_state_threshold;        // 1/(3 r^2)
  bool per_state_ok;
  uint64_t peak_state_count;
  double good_d_mass;       // marginal mass at the c nearest to q d/r, gcd(d,r)=1
  double good_d_threshold;  // phi(r) / (3 r)
  bool good_d_ok;
};

// Checks the order-finding lower bounds on the exact distribution: every
// state with |<rc>_q| <= r/2 carries probability at least 1/(3 r^2), and the
// c values nearest the phi(r) fractions q d/r with gcd(d,r)=1 carry total
// marginal mass at least phi(r)/(3r).
inline OrderBoundsReport check_order_bounds(uint64_t q, uint64_t r) {
  const CDistribution dist(q, r);
  OrderBoundsReport report{};
  report.q = q;
  report.r = r;
  report.peak_state_threshold = 1.0 / (3.0 * static_cast<double>(r) *
                                       static_cast<double>(r));
  report.min_peak_state_probability = 1.0;
  report.peak_state_count = 0;
  for (uint64_t c = 0; c < q; ++c) {
    const int64_t sr = signed_residue(static_cast<int64_t>(r * c),
                                      static_cast<int64_t>(q));
    const uint64_t mag = static_cast<uint64_t>(sr < 0 ? -sr : sr);
    if (2 * mag > r) continue;
    for (uint64_t k = 0; k < r; ++k) {
      const double p = dist.state_probability(c, k);
      ++report.peak_state_count;
      if (p < report.min_peak_state_probability)
        report.min_peak_state_probability = p;
    }
  }
  report.per_state_ok =
      report.min_peak_state_probability >= report.peak_state_threshold - 1e-12;

  report.good_d_threshold =
      static_cast<double>(totient(r)) / (3.0 * static_cast<double>(r));
  report.good_d_mass = 0.0;
  if (r == 1) {
    report.good_d_mass = dist.marginal(0);
  } else {
    for (uint64_t d = 1; d < r; ++d) {
      if (gcd_u64(d, r) != 1) continue;
      const uint64_t c_nearest = (q * d + r / 2) / r;
      report.good_d_mass += dist.marginal(c_nearest % q);
    }
  }
  report.good_d_ok = report.good_d_mass >= report.good_d_threshold - 1e-12;
  return report;
}

}  // namespace shorsim
