// gates.hpp
// Small dense unitary gates (matrix convention: rows are input basis vectors,
// columns are output basis vectors) and explicit basis permutations for
// reversible classical subcircuits, including Bennett-style lifting of
// one-to-one classical maps.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shorsim {

using Complex = std::complex<double>;
using std::uint64_t;

inline constexpr double kUnitarityTolerance = 1e-12;

struct UnitarityReport {
  bool ok;
  std::size_t worst_row;
  std::size_t worst_col;
  double max_abs_error;  // worst entry of M M^dagger - I
};

// Accepts iff ||M M^dagger - I||_max <= 1e-12; the report pins the worst entry.
inline UnitarityReport validate_unitary(std::span<const Complex> matrix,
                                        std::size_t dim) {
  if (dim == 0 || matrix.size() != dim * dim)
    throw std::invalid_argument("validate_unitary: matrix is not square");
  if ((dim & (dim - 1)) != 0)
    throw std::invalid_argument("validate_unitary: dimension not a power of two");
  UnitarityReport report{true, 0, 0, 0.0};
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k)
        acc += matrix[i * dim + k] * std::conj(matrix[j * dim + k]);
      const double err = std::abs(acc - (i == j ? Complex{1.0} : Complex{0.0}));
      if (err > report.max_abs_error) {
        report.max_abs_error = err;
        report.worst_row = i;
        report.worst_col = j;
      }
    }
  }
  report.ok = report.max_abs_error <= kUnitarityTolerance;
  return report;
}

class Gate {
 public:
  Gate(int arity, std::vector<Complex> row_major)
      : arity_(arity), matrix_(std::move(row_major)) {
    if (arity < 1 || arity > 3)
      throw std::invalid_argument("Gate: arity must be 1, 2, or 3");
    const std::size_t d = std::size_t{1} << arity;
    const auto report = validate_unitary(matrix_, d);
    if (!report.ok)
      throw std::invalid_argument(
          "Gate: matrix is not unitary (max error " +
          std::to_string(report.max_abs_error) + ")");
  }

  int arity() const noexcept { return arity_; }
  std::size_t dim() const noexcept { return std::size_t{1} << arity_; }
  // Coefficient of output basis vector `output` when `input` is fed in.
  Complex entry(std::size_t input, std::size_t output) const {
    return matrix_[input * dim() + output];
  }
  const std::vector<Complex>& matrix() const noexcept { return matrix_; }

  Gate adjoint() const {
    const std::size_t d = dim();
    std::vector<Complex> m(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m[i * d + j] = std::conj(entry(j, i));
    return Gate(arity_, std::move(m));
  }

 private:
  int arity_;
  std::vector<Complex> matrix_;  // row-major, dim x dim
};

namespace detail {
inline std::vector<Complex> permutation_matrix(std::size_t dim,
                                               std::span<const std::size_t> image) {
  std::vector<Complex> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + image[i]] = 1.0;
  return m;
}
}  // namespace detail

// Two-wire gate that sends |10> and |11> to their (+/-) uniform mixtures
// and fixes |00>, |01>; the canonical interference demonstration gate.
inline Gate example_gate() {
  const double s = 1.0 / std::numbers::sqrt2;
  return Gate(2, {1, 0, 0, 0,
                  0, 1, 0, 0,
                  0, 0, s, s,
                  0, 0, s, -s});
}

// Controlled NOT: negates the second wire iff the first wire is 1.
inline Gate cnot_gate() {
  const std::size_t image[] = {0, 1, 3, 2};
  return Gate(2, detail::permutation_matrix(4, image));
}

// Controlled controlled NOT: negates the last wire iff the first two are 1.
inline Gate toffoli_gate() {
  const std::size_t image[] = {0, 1, 2, 3, 4, 5, 7, 6};
  return Gate(3, detail::permutation_matrix(8, image));
}

// Swaps the last two wires iff the first wire is 0.
inline Gate fredkin_gate() {
  const std::size_t image[] = {0, 2, 1, 3, 4, 5, 6, 7};
  return Gate(3, detail::permutation_matrix(8, image));
}

// Single-wire Fourier component: the symmetric +-1/sqrt(2) matrix.
inline Gate r_gate() {
  const double s = 1.0 / std::numbers::sqrt2;
  return Gate(1, {s, s, s, -s});
}

// Two-wire conditional phase: diagonal (1,1,1,e^{i pi / 2^halvings}).
// The angle is dyadic by construction; halvings = k-j in the transform layout.
inline Gate s_gate(int halvings) {
  if (halvings < 0 || halvings > 62)
    throw std::invalid_argument("s_gate: halvings out of range");
  const double theta = std::numbers::pi / static_cast<double>(1ULL << halvings);
  return Gate(2, {1, 0, 0, 0,
                  0, 1, 0, 0,
                  0, 0, 1, 0,
                  0, 0, 0, std::polar(1.0, theta)});
}

enum class StandardGate { Example, Cnot, Toffoli, Fredkin, R };

inline Gate standard_gate(StandardGate kind) {
  switch (kind) {
    case StandardGate::Example: return example_gate();
    case StandardGate::Cnot: return cnot_gate();
    case StandardGate::Toffoli: return toffoli_gate();
    case StandardGate::Fredkin: return fredkin_gate();
    case StandardGate::R: return r_gate();
  }
  throw std::invalid_argument("standard_gate: unknown kind");
}

// Explicit bijection on the basis indices of a `width`-wire register.
class ReversiblePermutation {
 public:
  ReversiblePermutation(int width, std::vector<uint64_t> map)
      : width_(width), map_(std::move(map)) {
    if (width < 1 || width > 24)
      throw std::invalid_argument("ReversiblePermutation: width out of range");
    const uint64_t size = uint64_t{1} << width;
    if (map_.size() != size)
      throw std::invalid_argument("ReversiblePermutation: width mismatch");
    // Bijectivity by sortedness of the image.
    std::vector<uint64_t> image = map_;
    std::sort(image.begin(), image.end());
    for (uint64_t v = 0; v < size; ++v)
      if (image[v] != v)
        throw std::invalid_argument(
            "ReversiblePermutation: map is not a bijection");
  }

  static ReversiblePermutation identity(int width) {
    std::vector<uint64_t> map(uint64_t{1} << width);
    for (uint64_t v = 0; v < map.size(); ++v) map[v] = v;
    return ReversiblePermutation(width, std::move(map));
  }

  int width() const noexcept { return width_; }
  uint64_t size() const noexcept { return uint64_t{1} << width_; }
  uint64_t image(uint64_t v) const { return map_.at(v); }

  ReversiblePermutation inverse() const {
    std::vector<uint64_t> inv(map_.size());
    for (uint64_t v = 0; v < map_.size(); ++v) inv[map_[v]] = v;
    return ReversiblePermutation(width_, std::move(inv));
  }

  bool is_identity() const {
    for (uint64_t v = 0; v < map_.size(); ++v)
      if (map_[v] != v) return false;
    return true;
  }

 private:
  int width_;
  std::vector<uint64_t> map_;
};

// Lifts a classical bijection (given with its inverse) to a register
// permutation.  Conceptually this is the two-stage compute/copy/uncompute
// process that keeps every work bit clean; at this scale the permutation is
// materialized directly and the staging is exercised by bennett_stages below.
inline ReversiblePermutation bennett_lift(
    const std::function<uint64_t(uint64_t)>& f,
    const std::function<uint64_t(uint64_t)>& f_inv, int width) {
  const uint64_t size = uint64_t{1} << width;
  std::vector<uint64_t> map(size);
  std::vector<bool> seen(size, false);
  for (uint64_t v = 0; v < size; ++v) {
    const uint64_t image = f(v);
    if (image >= size)
      throw std::invalid_argument("bennett_lift: image out of register range");
    if (seen[image])
      throw std::invalid_argument("bennett_lift: duplicate image, f is not injective");
    seen[image] = true;
    map[v] = image;
    if (f_inv(image) != v)
      throw std::invalid_argument("bennett_lift: f_inv does not invert f");
  }
  return ReversiblePermutation(width, std::move(map));
}

// Register snapshot along the two-stage reversible computation of f:
//   stage one computes (x, F(x), record), copies the output aside and
//   uncomputes; stage two runs the F^{-1} computation forward to produce a
//   second copy of x, cancels the held input against it, and uncomputes.
// The record register is modeled as holding the computation's input, which is
// exactly the information needed to run it backwards.
struct BennettStages {
  uint64_t input;
  // after stage one: input register, working output, record, copied output
  uint64_t s1_input, s1_output, s1_record, s1_copy;
  // after stage two: everything but the copied output must be clear
  uint64_t s2_input, s2_output, s2_record, s2_copy;
  bool ancillas_clear;  // s2_input == s2_output == s2_record == 0
};

inline BennettStages bennett_stages(const std::function<uint64_t(uint64_t)>& f,
                                    const std::function<uint64_t(uint64_t)>& f_inv,
                                    uint64_t x) {
  BennettStages st{};
  st.input = x;
  // Stage one: compute F with record, copy, uncompute.
  uint64_t in = x, out = 0, rec = 0, copy = 0;
  out ^= f(in);
  rec ^= in;        // compute step: (x,0,0) -> (x, F(x), rec)
  copy ^= out;      // XOR-copy into the preset-zero register
  rec ^= in;
  out ^= f(in);     // uncompute step reversed
  st.s1_input = in;
  st.s1_output = out;
  st.s1_record = rec;
  st.s1_copy = copy;
  // Stage two: run the F^{-1} computation forward from the copy, cancel the
  // held input against the computed one, then reverse the F^{-1} computation.
  out ^= f_inv(copy);
  rec ^= copy;      // (F(x),0,0) -> (F(x), x, rec')
  in ^= out;        // cancel: held x against computed x
  rec ^= copy;
  out ^= f_inv(copy);
  st.s2_input = in;
  st.s2_output = out;
  st.s2_record = rec;
  st.s2_copy = copy;
  st.ancillas_clear = (in == 0 && out == 0 && rec == 0);
  return st;
}

// Demonstration network: |a, b, carries=0> -> |a, a+b mod 2^bits, carries=0>
// built from Toffoli and CNOT gates only (ripple carry with uncomputation).
// Wire layout expected by the caller: a at [0, bits), b at [bits, 2*bits),
// carry ancillas at [2*bits, 3*bits) with carry 0 kept constant zero.
struct ReversibleGateOp {
  enum class Kind { Cnot, Toffoli };
  Kind kind;
  int control0;
  int control1;  // ignored for Cnot
  int target;
};

inline std::vector<ReversibleGateOp> toffoli_adder_circuit(int bits) {
  if (bits < 1 || bits > 4)
    throw std::invalid_argument("toffoli_adder_circuit: demo path supports 1..4 bits");
  using Kind = ReversibleGateOp::Kind;
  std::vector<ReversibleGateOp> ops;
  const auto a = [](int i) { return i; };
  const auto b = [bits](int i) { return bits + i; };
  const auto c = [bits](int i) { return 2 * bits + i; };
  const auto carry = [&](int i, bool inverse) {
    // carry(c_i, a_i, b_i, c_{i+1}); note it leaves b_i = a_i xor b_i
    std::vector<ReversibleGateOp> seq = {
        {Kind::Toffoli, a(i), b(i), c(i + 1)},
        {Kind::Cnot, a(i), -1, b(i)},
        {Kind::Toffoli, c(i), b(i), c(i + 1)},
    };
    if (inverse) std::reverse(seq.begin(), seq.end());
    ops.insert(ops.end(), seq.begin(), seq.end());
  };
  for (int i = 0; i + 1 < bits; ++i) carry(i, false);
  ops.push_back({Kind::Cnot, a(bits - 1), -1, b(bits - 1)});
  ops.push_back({Kind::Cnot, c(bits - 1), -1, b(bits - 1)});
  for (int i = bits - 2; i >= 0; --i) {
    carry(i, true);
    ops.push_back({Kind::Cnot, a(i), -1, b(i)});
    ops.push_back({Kind::Cnot, c(i), -1, b(i)});
  }
  return ops;
}

}  // namespace shorsim
