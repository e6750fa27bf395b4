// Command-line front end: end-to-end factoring, order finding, and discrete
// logs; exact first-register distributions as CSV; and bound-verification
// reports.  Exit codes: 0 success, 2 precondition failure, 3 trial budget
// exhausted.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "shorsim/dlog.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/shor.hpp"

using nlohmann::json;
using namespace shorsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitBudgetExhausted = 3;

std::string format_probability(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", p);
  return buf;
}

// Relative output paths land in $SHORSIM_OUT_DIR when it is set.
std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("SHORSIM_OUT_DIR"); dir && *dir)
      return std::filesystem::path(dir) / p;
  }
  return p;
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  const auto resolved = resolve_output_path(out_path);
  if (resolved.has_parent_path())
    std::filesystem::create_directories(resolved.parent_path());
  std::ofstream f(resolved, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + resolved.string());
  f << payload;
}

uint64_t resolve_seed(std::optional<uint64_t> seed_flag) {
  if (seed_flag) return *seed_flag;
  std::random_device rd;
  const uint64_t seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << seed << "\n";
  return seed;
}

Backend parse_backend(const std::string& name) {
  if (name == "gate") return Backend::GateLevel;
  if (name == "closed") return Backend::ClosedForm;
  throw std::invalid_argument("backend must be 'gate' or 'closed'");
}

const char* backend_name(Backend b) {
  return b == Backend::GateLevel ? "gate" : "closed";
}

json candidates_json(const std::vector<OrderCandidate>& cands) {
  json arr = json::array();
  for (const auto& c : cands)
    arr.push_back({{"value", c.value},
                   {"source", to_string(c.source)},
                   {"delta", c.neighbor_delta},
                   {"base", c.base}});
  return arr;
}

int run_dist(uint64_t q, uint64_t r, const std::string& out, const std::string& format) {
  if (q < 2 || (q & (q - 1)) != 0 || q > (uint64_t{1} << 20))
    throw std::invalid_argument("dist: q must be a power of two, at most 2^20");
  if (r < 1 || r >= q) throw std::invalid_argument("dist: need 1 <= r < q");
  const CDistribution dist(q, r);
  std::string payload;
  if (format == "csv") {
    payload = "c,probability\n";
    for (uint64_t c = 0; c < q; ++c) {
      payload += std::to_string(c);
      payload += ',';
      payload += format_probability(dist.marginal(c));
      payload += '\n';
    }
  } else {
    json rows = json::array();
    for (uint64_t c = 0; c < q; ++c)
      rows.push_back({{"c", c}, {"probability", dist.marginal(c)}});
    payload = json{{"command", "dist"}, {"q", q}, {"r", r}, {"rows", rows}}.dump(2);
    payload += '\n';
  }
  emit(payload, out);
  return kExitOk;
}

int run_order(uint64_t n, uint64_t x, std::optional<uint64_t> q_override,
              const std::string& backend, uint64_t seed, int trials,
              int radius, uint64_t multiples, const std::string& out) {
  OrderPolicy policy;
  policy.max_trials = trials;
  policy.neighbor_radius = radius;
  policy.multiple_bound = multiples;
  policy.backend = parse_backend(backend);
  policy.seed = seed;
  policy.q_override = q_override;
  if (q_override && *q_override < n * n)
    std::cerr << "note: q < n^2, uniqueness of the recovered fraction d/r is "
                 "not guaranteed\n";
  const OrderOutcome o = find_order(n, x, policy);
  json trials_json = json::array();
  for (const auto& t : o.trials) {
    json tj = {{"observed_c", t.observed_c},
               {"candidates", candidates_json(t.candidates)}};
    if (t.verified_order) tj["verified_order"] = *t.verified_order;
    if (t.verified_source) tj["verified_source"] = to_string(*t.verified_source);
    trials_json.push_back(tj);
  }
  json report = {
      {"command", "order"},
      {"config",
       {{"n", n},
        {"x", x},
        {"q", o.q},
        {"backend", backend_name(policy.backend)},
        {"seed", seed},
        {"max_trials", trials},
        {"neighbor_radius", radius},
        {"multiple_bound", o.multiple_bound}}},
      {"status", o.status == RunStatus::Success ? "success" : "budget_exhausted"},
      {"trials", trials_json}};
  if (o.order) report["order"] = *o.order;
  emit(report.dump(2) + "\n", out);
  return o.status == RunStatus::Success ? kExitOk : kExitBudgetExhausted;
}

int run_factor(uint64_t n, const std::string& backend, uint64_t seed, int trials,
               const std::string& out) {
  FactorPolicy policy;
  policy.max_trials = trials;
  policy.seed = seed;
  policy.order_policy.backend = parse_backend(backend);
  const FactorOutcome o = factor(n, policy);
  json trials_json = json::array();
  for (const auto& t : o.trials) {
    json tj = {{"x", t.x}, {"gcd_with_n", t.gcd_with_n}, {"note", t.note}};
    if (t.order) tj["order"] = *t.order;
    if (t.divisor) tj["divisor"] = *t.divisor;
    trials_json.push_back(tj);
  }
  json report = {
      {"command", "factor"},
      {"config",
       {{"n", n},
        {"backend", backend_name(policy.order_policy.backend)},
        {"seed", seed},
        {"max_trials", trials}}},
      {"status", o.status == RunStatus::Success ? "success" : "budget_exhausted"},
      {"trials", trials_json}};
  if (o.divisor) {
    report["divisor"] = *o.divisor;
    report["cofactor"] = n / *o.divisor;
  }
  emit(report.dump(2) + "\n", out);
  return o.status == RunStatus::Success ? kExitOk : kExitBudgetExhausted;
}

int run_dlog(uint64_t p, uint64_t g, uint64_t target,
             std::optional<uint64_t> q_override, const std::string& backend,
             uint64_t seed, int t_target, int trials, const std::string& out) {
  DlogPolicy policy;
  policy.good_sample_target = t_target;
  policy.max_trials = trials;
  policy.backend = parse_backend(backend);
  policy.seed = seed;
  policy.q_override = q_override;
  const DlogOutcome o = find_dlog(p, g, target, policy);
  json trials_json = json::array();
  for (const auto& t : o.trials) {
    json cj;
    if (t.constraint.degenerate) {
      cj = {{"degenerate", true}, {"c_prime", t.constraint.c_prime}};
    } else {
      cj = {{"degenerate", false},
            {"residue", t.constraint.residue},
            {"modulus", t.constraint.modulus},
            {"c_prime", t.constraint.c_prime}};
    }
    trials_json.push_back({{"c", t.observation.c},
                           {"d", t.observation.d},
                           {"y", t.observation.y},
                           {"constraint", cj}});
  }
  json report = {
      {"command", "dlog"},
      {"config",
       {{"p", p},
        {"g", g},
        {"target", target},
        {"q", o.q},
        {"backend", backend_name(policy.backend)},
        {"seed", seed},
        {"good_sample_target", t_target},
        {"max_trials", trials > 0 ? trials : 480 * t_target}}},
      {"status", o.status == RunStatus::Success ? "success" : "budget_exhausted"},
      {"trials", trials_json}};
  if (o.logarithm) report["logarithm"] = *o.logarithm;
  emit(report.dump(2) + "\n", out);
  return o.status == RunStatus::Success ? kExitOk : kExitBudgetExhausted;
}

json check_json(const char* name, double computed, double threshold, bool pass) {
  return {{"name", name},
          {"computed", computed},
          {"threshold", threshold},
          {"pass", pass}};
}

int run_verify_bounds(std::optional<uint64_t> q_flag, std::optional<uint64_t> r_flag,
                      std::optional<uint64_t> n_flag, std::optional<uint64_t> x_flag,
                      std::optional<uint64_t> p_flag, std::optional<uint64_t> g_flag,
                      std::optional<uint64_t> target_flag, const std::string& out) {
  json report;
  json checks = json::array();
  bool all_pass = true;
  if (p_flag) {
    if (!g_flag || !target_flag)
      throw std::invalid_argument("verify-bounds: --p needs --g and --target");
    const uint64_t q = q_flag.value_or(dlog_default_q(*p_flag));
    const DlogBoundsReport r = check_dlog_bounds(*p_flag, *g_flag, *target_flag, q);
    checks.push_back(check_json("good_pair_count >= q/12",
                                static_cast<double>(r.good_pair_count),
                                r.good_pair_threshold, r.pair_count_ok));
    checks.push_back(check_json("good_state_probability >= 1/(20 q^2)",
                                r.min_good_state_probability,
                                r.good_state_threshold, r.good_state_ok));
    checks.push_back(check_json("good_mass >= p/(240 q)", r.good_mass,
                                r.good_mass_threshold, r.good_mass_ok));
    checks.push_back(check_json("good_c_marginal >= 1/(40 q)",
                                r.min_good_c_marginal, r.good_c_threshold,
                                r.good_c_ok));
    all_pass = r.pair_count_ok && r.good_state_ok && r.good_mass_ok && r.good_c_ok;
    report["instance"] = {{"p", *p_flag}, {"g", *g_flag}, {"target", *target_flag}, {"q", q}};
  } else {
    uint64_t q, r_val;
    json instance;
    if (n_flag && x_flag) {
      q = q_flag.value_or(choose_q(*n_flag));
      r_val = brute_order(*x_flag, *n_flag);
      instance = {{"n", *n_flag}, {"x", *x_flag}, {"q", q}, {"r", r_val}};
    } else if (q_flag && r_flag) {
      q = *q_flag;
      r_val = *r_flag;
      instance = {{"q", q}, {"r", r_val}};
    } else {
      throw std::invalid_argument(
          "verify-bounds: give --q/--r, --n/--x, or --p/--g/--target");
    }
    const OrderBoundsReport r = check_order_bounds(q, r_val);
    checks.push_back(check_json("peak_state_probability >= 1/(3 r^2)",
                                r.min_peak_state_probability,
                                r.peak_state_threshold, r.per_state_ok));
    checks.push_back(check_json("good_d_mass >= phi(r)/(3 r)", r.good_d_mass,
                                r.good_d_threshold, r.good_d_ok));
    all_pass = r.per_state_ok && r.good_d_ok;
    report["instance"] = instance;
  }
  report["command"] = "verify-bounds";
  report["checks"] = checks;
  report["all_pass"] = all_pass;
  for (const auto& c : checks)
    std::cerr << (c["pass"].get<bool>() ? "PASS " : "FAIL ")
              << c["name"].get<std::string>() << ": computed "
              << format_probability(c["computed"].get<double>()) << " vs "
              << format_probability(c["threshold"].get<double>()) << "\n";
  emit(report.dump(2) + "\n", out);
  return all_pass ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Order finding, factoring, and discrete logarithms on a dense "
      "state-vector simulator, with exact distributions and bound checks"};
  app.require_subcommand(1);

  // dist
  uint64_t dist_q = 0, dist_r = 0;
  std::string dist_out, dist_format = "csv";
  auto* dist = app.add_subcommand(
      "dist", "exact first-register distribution P(c) for given q and r");
  dist->add_option("--q", dist_q, "transform size, power of two <= 2^20")->required();
  dist->add_option("--r", dist_r, "order parameter, 1 <= r < q")->required();
  dist->add_option("--out", dist_out, "output path (default stdout)");
  dist->add_option("--format", dist_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // order
  uint64_t order_n = 0, order_x = 0, order_multiples = 0;
  std::optional<uint64_t> order_q, order_seed;
  std::string order_backend = "closed", order_out;
  int order_trials = 20, order_radius = 2;
  auto* order = app.add_subcommand("order", "find the order of x mod n");
  order->add_option("--n", order_n, "odd modulus")->required();
  order->add_option("--x", order_x, "element, coprime with n")->required();
  order->add_option("--q", order_q, "override the transform size (power of two)");
  order->add_option("--backend", order_backend, "gate or closed")
      ->check(CLI::IsMember({"gate", "closed"}));
  order->add_option("--seed", order_seed, "rng seed (auto-generated if absent)");
  order->add_option("--trials", order_trials, "trial budget");
  order->add_option("--radius", order_radius, "neighbor radius around c");
  order->add_option("--multiples", order_multiples,
                    "multiples of r' to test (0 = default)");
  order->add_option("--out", order_out, "output path (default stdout)");

  // factor
  uint64_t factor_n = 0;
  std::optional<uint64_t> factor_seed;
  std::string factor_backend = "closed", factor_out;
  int factor_trials = 20;
  auto* fact = app.add_subcommand("factor", "find a nontrivial divisor of n");
  fact->add_option("--n", factor_n, "odd composite, not a prime power")->required();
  fact->add_option("--backend", factor_backend, "gate or closed")
      ->check(CLI::IsMember({"gate", "closed"}));
  fact->add_option("--seed", factor_seed, "rng seed (auto-generated if absent)");
  fact->add_option("--trials", factor_trials, "trial budget");
  fact->add_option("--out", factor_out, "output path (default stdout)");

  // dlog
  uint64_t dlog_p = 0, dlog_g = 0, dlog_target = 0;
  std::optional<uint64_t> dlog_q, dlog_seed;
  std::string dlog_backend = "closed", dlog_out;
  int dlog_t = 4, dlog_trials = 0;
  auto* dlog = app.add_subcommand(
      "dlog", "find r with g^r == target mod p for a generator g");
  dlog->add_option("--p", dlog_p, "odd prime")->required();
  dlog->add_option("--g", dlog_g, "generator mod p")->required();
  dlog->add_option("--target", dlog_target, "target value")->required();
  dlog->add_option("--q", dlog_q, "override the transform size (power of two in (p,2p))");
  dlog->add_option("--backend", dlog_backend, "gate or closed")
      ->check(CLI::IsMember({"gate", "closed"}));
  dlog->add_option("--seed", dlog_seed, "rng seed (auto-generated if absent)");
  dlog->add_option("--t", dlog_t, "good-sample target (budget is 480 t)");
  dlog->add_option("--trials", dlog_trials, "explicit trial budget (0 = 480 t)");
  dlog->add_option("--out", dlog_out, "output path (default stdout)");

  // verify-bounds
  std::optional<uint64_t> vb_q, vb_r, vb_n, vb_x, vb_p, vb_g, vb_target;
  std::string vb_out;
  auto* vb = app.add_subcommand(
      "verify-bounds", "check the distribution lower bounds on an instance");
  vb->add_option("--q", vb_q, "transform size");
  vb->add_option("--r", vb_r, "order parameter (with --q)");
  vb->add_option("--n", vb_n, "modulus (with --x)");
  vb->add_option("--x", vb_x, "element (with --n)");
  vb->add_option("--p", vb_p, "prime (with --g and --target)");
  vb->add_option("--g", vb_g, "generator");
  vb->add_option("--target", vb_target, "target value");
  vb->add_option("--out", vb_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitPrecondition;
  }

  try {
    if (dist->parsed()) return run_dist(dist_q, dist_r, dist_out, dist_format);
    if (order->parsed())
      return run_order(order_n, order_x, order_q, order_backend,
                       resolve_seed(order_seed), order_trials, order_radius,
                       order_multiples, order_out);
    if (fact->parsed())
      return run_factor(factor_n, factor_backend, resolve_seed(factor_seed),
                        factor_trials, factor_out);
    if (dlog->parsed())
      return run_dlog(dlog_p, dlog_g, dlog_target, dlog_q, dlog_backend,
                      resolve_seed(dlog_seed), dlog_t, dlog_trials, dlog_out);
    if (vb->parsed())
      return run_verify_bounds(vb_q, vb_r, vb_n, vb_x, vb_p, vb_g, vb_target, vb_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    std::cout << json{{"error", e.what()}, {"kind", "precondition"}}.dump(2) << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << json{{"error", e.what()}, {"kind", "internal"}}.dump(2) << "\n";
    return 1;
  }
  return kExitPrecondition;
}
