#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "mufold/geometry.hpp"
#include "mufold/polynomial.hpp"
#include "mufold/topology.hpp"

namespace mufold {

class EncoderError : public std::runtime_error {
 public:
  enum class Kind { NoEligiblePairs, BadGrid };
  EncoderError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Uniform angle grid on [0, 2pi): value(k) = k * 2pi/d. The grid is anchored
/// at 0 so the identity conformation is always representable.
struct AngleGrid {
  int d = 8;

  explicit AngleGrid(int steps = 8);
  double step() const;
  double value(int k) const;  // k in [0, d)
};

/// Flat indexing of the one-hot variables: torsion i, step k -> i*d + k.
struct VariableMap {
  int torsions = 0;
  int d = 0;

  VariableMap() = default;
  VariableMap(int torsion_count, int steps) : torsions(torsion_count), d(steps) {}
  uint32_t n() const { return static_cast<uint32_t>(torsions * d); }
  uint32_t var(int i, int k) const { return static_cast<uint32_t>(i * d + k); }
  int torsion_of(uint32_t v) const { return static_cast<int>(v) / d; }
  int step_of(uint32_t v) const { return static_cast<int>(v) % d; }
};

/// sum_i (sum_k x_ik - 1)^2, expanded multilinearly.
BinaryPolynomial one_hot_penalty(const VariableMap& vm);

/// Degree-1 polynomials with coefficients sin(theta_i^k), cos(theta_i^k) on
/// the torsion's variables. Exactly-zero coefficients are normalized away.
std::pair<BinaryPolynomial, BinaryPolynomial> trig_poly(const VariableMap& vm, int i,
                                                        const AngleGrid& grid);

/// The optimization contribution alone: -sum over eligible fragment pairs of
/// the expanded squared representative distance, with every rotation entry
/// substituted by its trig polynomials. Throws NoEligiblePairs.
BinaryPolynomial expand_objective(const TorsionModel& tm, const AngleGrid& grid,
                                  const VariableMap& vm);

struct HuboProblem {
  BinaryPolynomial objective;   // optimization term, chop applied
  BinaryPolynomial constraint;  // a_const * one_hot_penalty, never chopped
  VariableMap vm;
  AngleGrid grid{8};
  double a_const = 0.0;
  double a_const_factor = 0.0;     // 0 when a_const was given directly
  double chop_threshold = 0.0;
  double max_opt_coefficient = 0;  // before chopping

  /// constraint + objective; the full polynomial of the problem.
  BinaryPolynomial combined() const;
  int degree() const;
};

/// Full assembly: expand, negate, add the penalty, then chop optimization
/// terms with |coeff| < chop. a_const must be positive.
HuboProblem build_hubo(const TorsionModel& tm, const AngleGrid& grid, double a_const,
                       double chop);

/// Same, with a_const = factor * max |optimization coefficient|.
HuboProblem build_hubo_with_factor(const TorsionModel& tm, const AngleGrid& grid,
                                   double factor, double chop);

struct Infeasible {
  std::vector<int> torsions;  // torsions with hot-bit count != 1
};

using DecodeResult = std::variant<TorsionAssignment, Infeasible>;

/// Angles from a one-hot bit vector; Infeasible lists violating torsions.
DecodeResult decode(const VariableMap& vm, const std::vector<uint8_t>& bits,
                    const AngleGrid& grid);

/// One-hot bit vector selecting step_index[i] for each torsion.
std::vector<uint8_t> encode(const VariableMap& vm, const std::vector<int>& step_index);

}  // namespace mufold
