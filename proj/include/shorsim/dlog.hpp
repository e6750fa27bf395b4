// dlog.hpp
// The discrete-logarithm experiment: three registers, a double Fourier
// transform over q, classification of outputs into good and bad pairs by
// exact rational arithmetic, residue recovery from good pairs, and assembly
// of the logarithm by CRT with exhaustion of small prime-power residues.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "shorsim/modarith.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/qft.hpp"
#include "shorsim/shor.hpp"
#include "shorsim/state_vector.hpp"

namespace shorsim {

// Prime powers at or below this are exhausted rather than constrained; the
// residues the experiment pins reliably are only those of larger factors.
inline constexpr uint64_t kSmallPrimePowerThreshold = 18;

// The unique power of two q with p < q < 2p.
inline uint64_t dlog_default_q(uint64_t p) {
  return uint64_t{1} << bit_width(p);
}

struct DlogExperiment {
  uint64_t p;  // odd prime
  uint64_t g;  // generator mod p
  uint64_t x;  // target, g^r == x
  uint64_t q;  // power of two in (p, 2p)
  Backend backend;
  uint64_t seed;
};

inline DlogExperiment make_dlog_experiment(uint64_t p, uint64_t g, uint64_t x,
                                           std::optional<uint64_t> q_override,
                                           Backend backend, uint64_t seed) {
  if (p < 3 || !is_prime(p))
    throw std::invalid_argument("dlog experiment: p must be an odd prime");
  if (g % p == 0 || brute_order(g % p, p) != p - 1)
    throw std::invalid_argument("dlog experiment: g is not a generator mod p");
  if (x % p == 0)
    throw std::invalid_argument("dlog experiment: target must be nonzero mod p");
  const uint64_t q = q_override.value_or(dlog_default_q(p));
  if ((q & (q - 1)) != 0 || q <= p || q >= 2 * p)
    throw std::invalid_argument("dlog experiment: q must be a power of two in (p, 2p)");
  return DlogExperiment{p, g % p, x % p, q, backend, seed};
}

// Brute-force logarithm oracle (also used to parameterize the closed form).
inline uint64_t brute_dlog(uint64_t g, uint64_t x, uint64_t p) {
  uint64_t v = 1;
  for (uint64_t r = 0; r < p - 1; ++r) {
    if (v == x % p) return r;
    v = v * g % p;
  }
  throw std::invalid_argument("brute_dlog: target is not a power of g");
}

// Exact joint distribution over observations (c, d, y) with y = g^k mod p.
class DlogDistribution {
 public:
  DlogDistribution(uint64_t p, uint64_t g, uint64_t q, std::vector<double> joint)
      : p_(p), g_(g), q_(q), joint_(std::move(joint)), power_of_k_(p - 1) {
    uint64_t v = 1;
    for (uint64_t k = 0; k < p - 1; ++k) {
      power_of_k_[k] = v;
      v = v * g % p;
    }
  }

  uint64_t p() const noexcept { return p_; }
  uint64_t q() const noexcept { return q_; }

  double probability(uint64_t c, uint64_t d, uint64_t k) const {
    return joint_.at(index(c, d, k));
  }

  double c_marginal(uint64_t c) const {
    double acc = 0.0;
    for (uint64_t d = 0; d < q_; ++d)
      for (uint64_t k = 0; k < p_ - 1; ++k) acc += joint_[index(c, d, k)];
    return acc;
  }

  double total_mass() const {
    double acc = 0.0;
    for (double v : joint_) acc += v;
    return acc;
  }

  // Observation sampled through the shared inverse-CDF draw.
  struct Observation {
    uint64_t c, d, y;
  };
  Observation sample(std::mt19937_64& rng) const {
    const uint64_t flat = detail::sample_index(rng, joint_);
    const uint64_t k = flat % (p_ - 1);
    const uint64_t d = flat / (p_ - 1) % q_;
    const uint64_t c = flat / (p_ - 1) / q_;
    return {c, d, power_of_k_[k]};
  }

 private:
  std::size_t index(uint64_t c, uint64_t d, uint64_t k) const {
    return static_cast<std::size_t>((c * q_ + d) * (p_ - 1) + k);
  }

  uint64_t p_, g_, q_;
  std::vector<double> joint_;
  std::vector<uint64_t> power_of_k_;
};

// Direct evaluation of the amplitude sum over b:
//   A(c,d,k) = 1/((p-1)q) sum_{b=0}^{p-2} exp(2 pi i (a(b) c + b d) / q),
// a(b) = (b r + k) mod (p-1).
inline DlogDistribution closed_form_dlog_distribution(uint64_t p, uint64_t g,
                                                      uint64_t x, uint64_t q) {
  const uint64_t r = brute_dlog(g, x, p);
  const uint64_t n1 = p - 1;
  std::vector<double> joint(q * q * n1);
  const double scale = 1.0 / (static_cast<double>(n1) * static_cast<double>(q));
  std::vector<uint64_t> a_of_b(n1);
  for (uint64_t k = 0; k < n1; ++k) {
    for (uint64_t b = 0; b < n1; ++b) a_of_b[b] = (b * r + k) % n1;
    for (uint64_t c = 0; c < q; ++c) {
      for (uint64_t d = 0; d < q; ++d) {
        double re = 0.0, im = 0.0;
        for (uint64_t b = 0; b < n1; ++b) {
          const uint64_t e = (a_of_b[b] * c + b * d) % q;
          const double ang = 2.0 * std::numbers::pi * static_cast<double>(e) /
                             static_cast<double>(q);
          re += std::cos(ang);
          im += std::sin(ang);
        }
        joint[(c * q + d) * n1 + k] = (re * re + im * im) * scale * scale;
      }
    }
  }
  return DlogDistribution(p, g, q, std::move(joint));
}

// Full circuit path: the (p-1)-limited uniform superposition is prepared by
// amplitude construction (a bit-wise product state can only reach power-of-two
// ranges), the third register accumulates g^a x^{-b} by controlled
// multiplications, and both index registers go through the Fourier sequence.
inline DlogDistribution gate_level_dlog_distribution(uint64_t p, uint64_t g,
                                                     uint64_t x, uint64_t q) {
  const int l = bit_width(q) - 1;
  const int nw = bit_width(p);
  const int total = 2 * l + nw;
  if (total > kDefaultMaxWires)
    throw std::invalid_argument("gate_level_dlog_distribution: exceeds the wire budget");
  const uint64_t n1 = p - 1;
  std::vector<Complex> amps(uint64_t{1} << total, Complex{0.0});
  const double amp = 1.0 / static_cast<double>(n1);
  for (uint64_t a = 0; a < n1; ++a)
    for (uint64_t b = 0; b < n1; ++b)
      amps[((a << l | b) << nw) | 1] = amp;
  StateVector state = StateVector::from_amplitudes(total, std::move(amps));

  const std::vector<int> out_msb = register_wires_msb_first(0, nw);
  const uint64_t x_inv = modinv(x, p);
  for (int i = 0; i < l; ++i) {
    const auto mul_g = mul_const_mod(pow_mod(g, uint64_t{1} << i, p), p, nw);
    state = apply_controlled_permutation(state, mul_g, nw + l + i, out_msb);
    const auto mul_xinv = mul_const_mod(pow_mod(x_inv, uint64_t{1} << i, p), p, nw);
    state = apply_controlled_permutation(state, mul_xinv, nw + i, out_msb);
  }

  std::vector<int> a_reg(l), b_reg(l);
  for (int j = 0; j < l; ++j) {
    a_reg[j] = nw + l + j;
    b_reg[j] = nw + j;
  }
  const QftCircuit circuit = qft_circuit(l);
  state = apply_qft(state, circuit, a_reg);
  state = apply_qft(state, circuit, b_reg);

  // Reversed readout on both index registers; value layout ((c << l) | d) << nw | y.
  std::vector<int> readout;
  for (int j = 0; j < l; ++j) readout.push_back(nw + l + j);
  for (int j = 0; j < l; ++j) readout.push_back(nw + j);
  for (int j = nw - 1; j >= 0; --j) readout.push_back(j);
  const Distribution dist = exact_distribution(state, readout);

  std::vector<int64_t> k_of_y(uint64_t{1} << nw, -1);
  uint64_t v = 1;
  for (uint64_t k = 0; k < n1; ++k) {
    k_of_y[v] = static_cast<int64_t>(k);
    v = v * g % p;
  }
  std::vector<double> joint(q * q * n1, 0.0);
  for (uint64_t value = 0; value < dist.probabilities.size(); ++value) {
    const double mass = dist.probabilities[value];
    if (mass == 0.0) continue;
    const uint64_t y = value & ((uint64_t{1} << nw) - 1);
    const uint64_t d = (value >> nw) & (q - 1);
    const uint64_t c = value >> (nw + l);
    if (y >= p || k_of_y[y] < 0) {
      if (mass > 1e-12)
        throw std::runtime_error("gate_level_dlog_distribution: mass on an impossible y");
      continue;
    }
    joint[(c * q + d) * n1 + static_cast<uint64_t>(k_of_y[y])] += mass;
  }
  return DlogDistribution(p, g, q, std::move(joint));
}

inline DlogDistribution dlog_distribution(const DlogExperiment& exp) {
  return exp.backend == Backend::GateLevel
             ? gate_level_dlog_distribution(exp.p, exp.g, exp.x, exp.q)
             : closed_form_dlog_distribution(exp.p, exp.g, exp.x, exp.q);
}

struct DlogObservation {
  uint64_t c, d, y;
};

inline DlogObservation run_dlog_once(const DlogExperiment& exp,
                                     std::mt19937_64& rng) {
  const auto obs = dlog_distribution(exp).sample(rng);
  return DlogObservation{obs.c, obs.d, obs.y};
}

// Exact fraction with the fixed denominator p-1 used by the pair analysis.
struct Rational {
  int64_t numerator;
  int64_t denominator;
  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

struct GoodPairAnalysis {
  Rational t;                // T = rc + d - (r/(p-1)) <c(p-1)>_q
  Rational t_signed;         // <T>_q
  int64_t c_p1_signed;       // <c(p-1)>_q
  int64_t nearest_j;         // closest integer to T/q
  double w;                  // phase span W = ((p-2)/q) <T>_q
  double v_max_abs;          // max |V| over b and k
  bool phase_condition;      // |<T>_q| <= 1/2
  bool residue_condition;    // |<c(p-1)>_q| <= q/12
  bool good;
};

// Classifies an output pair against the two goodness conditions using exact
// integer arithmetic scaled by p-1 (r_true comes from a brute-force oracle;
// this is analysis-side machinery, not part of the recovery path).
inline GoodPairAnalysis analyze_pair(uint64_t c, uint64_t d, uint64_t p,
                                     uint64_t q, uint64_t r_true) {
  if (c >= q || d >= q) throw std::invalid_argument("analyze_pair: c,d must be < q");
  const int64_t p1 = static_cast<int64_t>(p) - 1;
  const int64_t qq = static_cast<int64_t>(q);
  const int64_t r = static_cast<int64_t>(r_true);
  const int64_t sr = signed_residue(static_cast<int64_t>(c) * p1, qq);

  GoodPairAnalysis out{};
  out.c_p1_signed = sr;
  // T scaled by p-1 to stay in integers.
  const int64_t t_num = (r * static_cast<int64_t>(c) + static_cast<int64_t>(d)) * p1 -
                        r * sr;
  out.t = Rational{t_num, p1};
  int64_t m = t_num % (qq * p1);
  if (m < 0) m += qq * p1;
  if (2 * m > qq * p1) m -= qq * p1;
  out.t_signed = Rational{m, p1};
  out.nearest_j = (t_num - m) / (qq * p1);
  out.w = (static_cast<double>(p) - 2.0) / static_cast<double>(q) *
          out.t_signed.value();
  out.phase_condition = 2 * std::abs(m) <= p1;
  out.residue_condition = 12 * std::abs(sr) <= qq;
  out.good = out.phase_condition && out.residue_condition;

  int64_t vmax = 0;
  for (int64_t b = 0; b <= p1 - 1; ++b) {
    for (int64_t k = 0; k <= p1 - 1; ++k) {
      const int64_t floored = (b * r + k) / p1;
      const int64_t num = (b * r - p1 * floored) * sr;
      vmax = std::max(vmax, num < 0 ? -num : num);
    }
  }
  out.v_max_abs = static_cast<double>(vmax) / static_cast<double>(p1);
  return out;
}

struct DlogConstraint {
  bool degenerate;  // no usable residue information
  int64_t residue;  // r == residue (mod modulus) when not degenerate
  int64_t modulus;
  int64_t c_prime;  // the divisor (c(p-1) - <c(p-1)>_q)/q
};

// Residue recovery from one output pair: rounds d/q to the nearest multiple
// of 1/(p-1) and divides mod p-1 by c'.  When gcd(c', p-1) = gamma > 1 the
// congruence only pins r modulo (p-1)/gamma.
inline DlogConstraint recover_from_pair(uint64_t c, uint64_t d, uint64_t p,
                                        uint64_t q) {
  if (c >= q || d >= q)
    throw std::invalid_argument("recover_from_pair: c,d must be < q");
  const int64_t p1 = static_cast<int64_t>(p) - 1;
  const int64_t qq = static_cast<int64_t>(q);
  const int64_t sr = signed_residue(static_cast<int64_t>(c) * p1, qq);
  const int64_t c_prime = (static_cast<int64_t>(c) * p1 - sr) / qq;
  int64_t cp = c_prime % p1;
  if (cp < 0) cp += p1;
  if (cp == 0) return DlogConstraint{true, 0, 0, c_prime};
  // Nearest integer to d (p-1) / q, exact (round half up; good pairs never tie).
  const int64_t d_tilde = (2 * static_cast<int64_t>(d) * p1 + qq) / (2 * qq);
  // Solve d_tilde + r c' == 0 (mod p-1).
  const int64_t gamma = ext_gcd(cp, p1).g;
  if (d_tilde % gamma != 0) return DlogConstraint{true, 0, 0, c_prime};
  const int64_t m = p1 / gamma;
  const int64_t inv = static_cast<int64_t>(
      modinv(static_cast<uint64_t>(cp / gamma % m), static_cast<uint64_t>(m)));
  int64_t rho = (-(d_tilde / gamma) % m) * inv % m;
  rho %= m;
  if (rho < 0) rho += m;
  return DlogConstraint{false, rho, m, c_prime};
}

struct DlogPolicy {
  int good_sample_target = 4;  // the t in the 480 t trial ceiling
  int max_trials = 0;          // 0 selects 480 * good_sample_target
  Backend backend = Backend::ClosedForm;
  uint64_t seed = 1;
  std::optional<uint64_t> q_override;
};

struct DlogTrial {
  DlogObservation observation;
  DlogConstraint constraint;
};

struct DlogOutcome {
  RunStatus status;
  std::optional<uint64_t> logarithm;
  uint64_t q;
  std::vector<DlogTrial> trials;
};

namespace detail {
// Residue sets per prime power of p-1: factors above the threshold use the
// residues pinned by collected constraints when any exist; everything else is
// exhausted outright.
inline std::optional<uint64_t> assemble_dlog_candidate(
    uint64_t p, uint64_t g, uint64_t x,
    const std::vector<std::pair<int64_t, int64_t>>& constraints) {
  const uint64_t p1 = p - 1;
  std::vector<std::pair<int64_t, std::vector<int64_t>>> residue_sets;
  for (const auto& pp : factorize(p1)) {
    int64_t modulus = 1;
    for (int e = 0; e < pp.exponent; ++e) modulus *= static_cast<int64_t>(pp.prime);
    std::vector<int64_t> residues;
    if (static_cast<uint64_t>(modulus) > kSmallPrimePowerThreshold) {
      std::set<int64_t> pinned;
      for (const auto& [rho, m] : constraints)
        if (m % modulus == 0) pinned.insert(rho % modulus);
      residues.assign(pinned.begin(), pinned.end());
    }
    if (residues.empty())
      for (int64_t v = 0; v < modulus; ++v) residues.push_back(v);
    residue_sets.emplace_back(modulus, std::move(residues));
  }
  // Cartesian product over the residue sets, combined by CRT.
  std::vector<uint64_t> candidates;
  std::vector<std::size_t> pick(residue_sets.size(), 0);
  while (true) {
    std::vector<std::pair<int64_t, int64_t>> congruences;
    for (std::size_t i = 0; i < residue_sets.size(); ++i)
      congruences.emplace_back(residue_sets[i].second[pick[i]],
                               residue_sets[i].first);
    candidates.push_back(static_cast<uint64_t>(
        crt(std::span<const std::pair<int64_t, int64_t>>(congruences)).value));
    std::size_t level = 0;
    while (level < pick.size() && ++pick[level] == residue_sets[level].second.size()) {
      pick[level] = 0;
      ++level;
    }
    if (level == pick.size()) break;
  }
  std::sort(candidates.begin(), candidates.end());
  for (uint64_t r : candidates)
    if (pow_mod(g, r, p) == x % p) return r;
  return std::nullopt;
}
}  // namespace detail

// Runs experiments, converts each observation into a residue constraint, and
// after every trial attempts CRT assembly with small-prime-power exhaustion;
// every assembled candidate is verified against g^r == x before acceptance.
inline DlogOutcome find_dlog(uint64_t p, uint64_t g, uint64_t x,
                             const DlogPolicy& policy) {
  const DlogExperiment exp =
      make_dlog_experiment(p, g, x, policy.q_override, policy.backend, policy.seed);
  const int budget = policy.max_trials > 0 ? policy.max_trials
                                           : 480 * policy.good_sample_target;
  DlogOutcome outcome{RunStatus::BudgetExhausted, std::nullopt, exp.q, {}};
  const DlogDistribution dist = dlog_distribution(exp);
  std::mt19937_64 rng(policy.seed);
  std::vector<std::pair<int64_t, int64_t>> constraints;
  std::set<std::pair<int64_t, int64_t>> seen;
  for (int trial = 0; trial < budget; ++trial) {
    const auto obs = dist.sample(rng);
    const DlogConstraint constraint = recover_from_pair(obs.c, obs.d, exp.p, exp.q);
    outcome.trials.push_back({{obs.c, obs.d, obs.y}, constraint});
    if (!constraint.degenerate &&
        seen.insert({constraint.residue, constraint.modulus}).second)
      constraints.emplace_back(constraint.residue, constraint.modulus);
    const auto candidate =
        detail::assemble_dlog_candidate(exp.p, exp.g, exp.x, constraints);
    if (candidate) {
      outcome.status = RunStatus::Success;
      outcome.logarithm = candidate;
      return outcome;
    }
  }
  return outcome;
}

struct DlogBoundsReport {
  uint64_t p, q;
  uint64_t good_pair_count;
  double good_pair_threshold;  // q / 12
  bool pair_count_ok;
  double min_good_state_probability;
  double good_state_threshold;  // 1 / (20 q^2)
  bool good_state_ok;
  double good_mass;
  double good_mass_threshold;  // p / (240 q)
  bool good_mass_ok;
  double min_good_c_marginal;
  double good_c_threshold;  // 1 / (40 q)
  bool good_c_ok;
};

// Evaluates the discrete-log lower bounds on the exact joint distribution.
inline DlogBoundsReport check_dlog_bounds(uint64_t p, uint64_t g, uint64_t x,
                                          uint64_t q) {
  const DlogDistribution dist = closed_form_dlog_distribution(p, g, x, q);
  const uint64_t r_true = brute_dlog(g, x, p);
  DlogBoundsReport report{};
  report.p = p;
  report.q = q;
  report.good_pair_threshold = static_cast<double>(q) / 12.0;
  report.good_state_threshold =
      1.0 / (20.0 * static_cast<double>(q) * static_cast<double>(q));
  report.good_mass_threshold =
      static_cast<double>(p) / (240.0 * static_cast<double>(q));
  report.good_c_threshold = 1.0 / (40.0 * static_cast<double>(q));
  report.min_good_state_probability = 1.0;
  report.good_mass = 0.0;
  std::set<uint64_t> good_cs;
  for (uint64_t c = 0; c < q; ++c) {
    for (uint64_t d = 0; d < q; ++d) {
      const auto analysis = analyze_pair(c, d, p, q, r_true);
      if (!analysis.good) continue;
      ++report.good_pair_count;
      good_cs.insert(c);
      for (uint64_t k = 0; k < p - 1; ++k) {
        const double pr = dist.probability(c, d, k);
        report.good_mass += pr;
        if (pr < report.min_good_state_probability)
          report.min_good_state_probability = pr;
      }
    }
  }
  report.min_good_c_marginal = 1.0;
  for (uint64_t c : good_cs) {
    const double m = dist.c_marginal(c);
    if (m < report.min_good_c_marginal) report.min_good_c_marginal = m;
  }
  report.pair_count_ok =
      12 * report.good_pair_count >= q;  // exact integer comparison
  report.good_state_ok =
      report.min_good_state_probability >= report.good_state_threshold;
  report.good_mass_ok = report.good_mass >= report.good_mass_threshold;
  report.good_c_ok = report.min_good_c_marginal >= report.good_c_threshold;
  return report;
}

}  // namespace shorsim
