#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mufold {

/// Monomial over binary variables: sorted, duplicate-free index set.
/// Multilinearity (x*x = x) is applied whenever monomials are merged.
using Monomial = std::vector<uint32_t>;

/// Sparse multilinear polynomial over {0,1} variables, stored as a term map
/// from monomial to coefficient. Coefficients below 1e-12 in magnitude are
/// treated as floating-point noise and dropped on normalization.
class BinaryPolynomial {
 public:
  static constexpr double kNoiseEps = 1e-12;

  BinaryPolynomial() = default;
  explicit BinaryPolynomial(double constant) : constant_(constant) {}

  double constant() const { return constant_; }
  double& constant() { return constant_; }
  const std::map<Monomial, double>& terms() const { return terms_; }

  /// Adds coeff * prod(vars); vars may be unsorted or contain duplicates.
  void add_term(Monomial vars, double coeff);
  void add_constant(double c) { constant_ += c; }

  BinaryPolynomial& operator+=(const BinaryPolynomial& other);
  BinaryPolynomial& operator-=(const BinaryPolynomial& other);
  BinaryPolynomial& operator*=(double scalar);
  friend BinaryPolynomial operator*(const BinaryPolynomial& a,
                                    const BinaryPolynomial& b);

  double coefficient(const Monomial& vars) const;
  int degree() const;
  size_t term_count() const { return terms_.size(); }
  size_t count_terms_of_degree(size_t deg) const;
  uint32_t min_variable_bound() const;  // 1 + largest index used
  double max_abs_coefficient() const;   // over non-constant terms

  /// Removes (non-constant) terms with |coeff| strictly below threshold.
  void chop(double threshold);

  double evaluate(const std::vector<uint8_t>& bits) const;

  /// Text form: "# vars n", "# constant c", then one "i j ... : coeff" line
  /// per term with 17 significant digits, sorted.
  std::string to_text(uint32_t n_vars) const;
  static BinaryPolynomial from_text(const std::string& text, uint32_t* n_vars_out);

 private:
  double constant_ = 0.0;
  std::map<Monomial, double> terms_;
};

}  // namespace mufold
