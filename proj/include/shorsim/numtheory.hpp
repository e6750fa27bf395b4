// numtheory.hpp
// Exact integer number theory used by the order-finding and discrete-log
// post-processing: extended gcd, modular inverses, signed residues,
// continued-fraction rational recovery, CRT, and small brute-force oracles.
// All arithmetic here is integer/rational; no floating point.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shorsim {

using std::int64_t;
using std::uint64_t;

struct ExtGcd {
  int64_t g;
  int64_t u;
  int64_t v;  // u*a + v*b == g
};

inline ExtGcd ext_gcd(int64_t a, int64_t b) {
  if (a < 0 || b < 0) throw std::invalid_argument("ext_gcd: negative input");
  if (a == 0 && b == 0) throw std::invalid_argument("ext_gcd: gcd(0,0) undefined");
  int64_t r0 = a, r1 = b;
  int64_t u0 = 1, u1 = 0;
  int64_t v0 = 0, v1 = 1;
  while (r1 != 0) {
    const int64_t q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    u0 -= q * u1;
    std::swap(u0, u1);
    v0 -= q * v1;
    std::swap(v0, v1);
  }
  return {r0, u0, v0};
}

inline uint64_t gcd_u64(uint64_t a, uint64_t b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

inline uint64_t modinv(uint64_t c, uint64_t n) {
  if (n == 0) throw std::invalid_argument("modinv: zero modulus");
  const auto eg = ext_gcd(static_cast<int64_t>(c % n), static_cast<int64_t>(n));
  if (eg.g != 1) throw std::invalid_argument("modinv: arguments are not coprime");
  int64_t u = eg.u % static_cast<int64_t>(n);
  if (u < 0) u += static_cast<int64_t>(n);
  return static_cast<uint64_t>(u);
}

// Representative of z mod q in the half-open-below range (-q/2, q/2].
inline int64_t signed_residue(int64_t z, int64_t q) {
  if (q < 1) throw std::invalid_argument("signed_residue: modulus must be >= 1");
  int64_t m = z % q;
  if (m < 0) m += q;
  return 2 * m > q ? m - q : m;
}

inline uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod) {
  if (mod == 0) throw std::invalid_argument("pow_mod: zero modulus");
  unsigned __int128 acc = 1;
  unsigned __int128 b = base % mod;
  while (exp != 0) {
    if (exp & 1) acc = acc * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<uint64_t>(acc);
}

struct Convergent {
  int64_t numerator;
  int64_t denominator;
  int index;  // position in the continued-fraction expansion
};

// Convergents of c/q (lowest terms, denominators strictly increasing).
inline std::vector<Convergent> convergents(uint64_t c, uint64_t q) {
  if (q == 0) throw std::invalid_argument("convergents: zero denominator");
  std::vector<Convergent> out;
  // h_i = a_i h_{i-1} + h_{i-2}, seeded with h_{-1} = 1, h_{-2} = 0 (and k swapped).
  int64_t hm2 = 0, hm1 = 1;
  int64_t km2 = 1, km1 = 0;
  int64_t n = static_cast<int64_t>(c), d = static_cast<int64_t>(q);
  int idx = 0;
  while (d != 0) {
    const int64_t a = n / d;
    const int64_t h = a * hm1 + hm2;
    const int64_t k = a * km1 + km2;
    out.push_back({h, k, idx});
    hm2 = hm1; hm1 = h;
    km2 = km1; km1 = k;
    const int64_t r = n % d;
    n = d;
    d = r;
    ++idx;
  }
  return out;
}

// Best rational recovery per the order-finding inequality: the fraction d/r
// in lowest terms with r < bound and |c/q - d/r| <= 1/(2q), when one exists.
// The answer is unique whenever q >= bound^2; in the demonstration regime
// (q < bound^2) the smallest-denominator satisfying fraction is returned.
// Semiconvergents are scanned as well as convergents, since best
// approximations in the <=1/(2q) sense need not be full convergents.
inline std::optional<Convergent> nearest_fraction(uint64_t c, uint64_t q, uint64_t bound) {
  if (q == 0) throw std::invalid_argument("nearest_fraction: zero q");
  if (c >= q) throw std::invalid_argument("nearest_fraction: c must be < q");
  if (bound < 2) throw std::invalid_argument("nearest_fraction: bound must be >= 2");

  const auto satisfies = [&](int64_t h, int64_t k) {
    // |c/q - h/k| <= 1/(2q)  <=>  2|ck - hq| <= k, exactly in integers.
    const __int128 delta = static_cast<__int128>(c) * k - static_cast<__int128>(h) * q;
    const __int128 mag = delta < 0 ? -delta : delta;
    return 2 * mag <= static_cast<__int128>(k);
  };

  // c < q, so the expansion starts with a_0 = 0 and the first convergent is 0/1.
  if (satisfies(0, 1)) return Convergent{0, 1, 0};

  std::vector<int64_t> terms;
  {
    int64_t n = static_cast<int64_t>(c), d = static_cast<int64_t>(q);
    while (d != 0) {
      terms.push_back(n / d);
      const int64_t r = n % d;
      n = d;
      d = r;
    }
  }
  // Seed the recurrence past convergent 0 (handled above): h_{-1}/k_{-1} = 1/0,
  // h_0/k_0 = 0/1.  Candidate denominators are strictly increasing from here,
  // so the scan can stop as soon as one reaches the bound.  Semiconvergents
  // (t < a_i) are always already in lowest terms.
  int64_t hm2 = 1, hm1 = terms[0];
  int64_t km2 = 0, km1 = 1;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    for (int64_t t = 1; t <= terms[i]; ++t) {
      const int64_t h = t * hm1 + hm2;
      const int64_t k = t * km1 + km2;
      if (static_cast<uint64_t>(k) >= bound) return std::nullopt;
      if (satisfies(h, k)) return Convergent{h, k, static_cast<int>(i)};
    }
    const int64_t h = terms[i] * hm1 + hm2;
    const int64_t k = terms[i] * km1 + km2;
    hm2 = hm1; hm1 = h;
    km2 = km1; km1 = k;
  }
  return std::nullopt;
}

struct CrtResult {
  int64_t value;    // unique solution in [0, modulus)
  int64_t modulus;  // product of the input moduli
};

// Chinese remainder combination; moduli must be pairwise coprime.
inline CrtResult crt(std::span<const std::pair<int64_t, int64_t>> congruences) {
  if (congruences.empty()) throw std::invalid_argument("crt: no congruences");
  __int128 value = 0;
  __int128 modulus = 1;
  for (const auto& [residue, m] : congruences) {
    if (m < 1) throw std::invalid_argument("crt: modulus must be >= 1");
    if (m == 1) continue;
    const int64_t step = static_cast<int64_t>(modulus % m);
    const auto eg = ext_gcd(step, m);
    if (eg.g != 1)
      throw std::invalid_argument("crt: moduli are not pairwise coprime");
    // value + modulus * t == residue (mod m)
    int64_t rhs = (residue - static_cast<int64_t>(value % m)) % m;
    if (rhs < 0) rhs += m;
    int64_t inv = eg.u % m;
    if (inv < 0) inv += m;
    const int64_t t =
        static_cast<int64_t>(static_cast<__int128>(rhs) * inv % m);
    value += modulus * t;
    modulus *= m;
    if (modulus > static_cast<__int128>(INT64_MAX))
      throw std::overflow_error("crt: modulus product exceeds 64 bits");
  }
  const CrtResult result{static_cast<int64_t>(value), static_cast<int64_t>(modulus)};
  for (const auto& [residue, m] : congruences) {
    int64_t want = residue % m;
    if (want < 0) want += m;
    if (result.value % m != want)
      throw std::runtime_error("crt: solution fails a congruence");
  }
  return result;
}

// Least r >= 1 with x^r == 1 (mod n), by iteration.  Test-oracle grade.
inline uint64_t brute_order(uint64_t x, uint64_t n) {
  if (n < 2) throw std::invalid_argument("brute_order: modulus must be >= 2");
  if (gcd_u64(x % n, n) != 1)
    throw std::invalid_argument("brute_order: x and n are not coprime");
  uint64_t r = 1;
  uint64_t v = x % n;
  while (v != 1) {
    v = v * x % n;
    ++r;
  }
  return r;
}

struct PrimePower {
  uint64_t prime;
  int exponent;
};

inline std::vector<PrimePower> factorize(uint64_t n) {
  if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
  std::vector<PrimePower> out;
  for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

inline uint64_t totient(uint64_t n) {
  uint64_t phi = n;
  for (const auto& pp : factorize(n)) phi -= phi / pp.prime;
  return phi;
}

enum class NClass { Even, Prime, PrimePower, CompositeOk };

struct NClassification {
  NClass kind;
  uint64_t prime;  // set for PrimePower
  int exponent;    // set for PrimePower
};

// Screens n for the factoring reduction: only odd non-prime-powers qualify.
inline NClassification classify_n(uint64_t n) {
  if (n < 2) throw std::invalid_argument("classify_n: n must be >= 2");
  if (n % 2 == 0) return {NClass::Even, 0, 0};
  const auto factors = factorize(n);
  if (factors.size() == 1) {
    if (factors[0].exponent == 1) return {NClass::Prime, factors[0].prime, 1};
    return {NClass::PrimePower, factors[0].prime, factors[0].exponent};
  }
  return {NClass::CompositeOk, 0, 0};
}

// Given x^multiple == 1 (mod n), strips prime factors to reach the least
// divisor of `multiple` that still satisfies the congruence: the order of x.
inline uint64_t order_from_multiple(uint64_t x, uint64_t n, uint64_t multiple) {
  if (multiple == 0 || pow_mod(x, multiple, n) != 1)
    throw std::invalid_argument("order_from_multiple: not a multiple of the order");
  uint64_t r = multiple;
  for (const auto& pp : factorize(multiple)) {
    for (int e = 0; e < pp.exponent; ++e) {
      if (r % pp.prime == 0 && pow_mod(x, r / pp.prime, n) == 1) r /= pp.prime;
    }
  }
  return r;
}

}  // namespace shorsim
