#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mufold/encoder.hpp"
#include "mufold/polynomial.hpp"

namespace mufold {

struct Ancilla {
  uint32_t index = 0;  // variable index of the ancilla
  uint32_t u = 0;      // replaced pair
  uint32_t v = 0;
};

/// Degree-<=2 problem produced by iterated pair substitution. Entries that
/// stem from the one-hot constraint or from ancilla penalties are recorded
/// as protected and survive any chop.
struct QuboProblem {
  uint32_t n_original = 0;
  uint32_t n_total = 0;
  double constant = 0.0;
  std::map<uint32_t, double> linear;
  std::map<std::pair<uint32_t, uint32_t>, double> quadratic;  // key.first < key.second
  std::vector<Ancilla> ancillas;
  double penalty_scale = 0.0;
  std::set<uint32_t> protected_linear;
  std::set<std::pair<uint32_t, uint32_t>> protected_quadratic;

  double evaluate(const std::vector<uint8_t>& bits) const;
  size_t entry_count() const { return linear.size() + quadratic.size(); }
};

/// Reduces an arbitrary-degree polynomial to degree <= 2. While any term of
/// degree >= 3 remains, the pair occurring in the most such terms (ties:
/// lexicographic) is replaced by a fresh ancilla in all of them, and the
/// penalty P*(uv - 2ua - 2va + 3a) is added with P = penalty_scale.
/// penalty_scale defaults to 2*(1 + sum |coeff| over degree>=3 terms).
QuboProblem quadratize(const HuboProblem& h);

/// Same reduction for a bare polynomial (no constraint bookkeeping);
/// penalty_scale = 0 means use the default rule.
QuboProblem quadratize_polynomial(const BinaryPolynomial& poly, uint32_t n_original,
                                  double penalty_scale = 0.0);

/// Drops non-protected entries with |coeff| < threshold.
QuboProblem chop_qubo(const QuboProblem& q, double threshold);

/// Completes an assignment of the original variables with the penalty-free
/// ancilla values (each ancilla = AND of its recorded pair, in substitution
/// order).
std::vector<uint8_t> lift_assignment(const QuboProblem& q,
                                     const std::vector<uint8_t>& original_bits);

/// Text export: "# vars", "# original", "# constant" headers, then
/// "i j coeff" lines with i <= j (i == j encodes a linear entry).
std::string qubo_to_text(const QuboProblem& q);

/// Ancilla registry with the penalty scale, as JSON.
std::string ancillas_to_json(const QuboProblem& q);

}  // namespace mufold
