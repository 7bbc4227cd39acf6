#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mufold/encoder.hpp"
#include "mufold/solvers.hpp"
#include "test_util.hpp"

using namespace mufold;

namespace {

// all feasible one-hot assignments as step-index vectors, odometer order
std::vector<std::vector<int>> feasible_assignments(int m, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<size_t>(m), 0);
  while (true) {
    out.push_back(idx);
    int pos = m - 1;
    while (pos >= 0 && ++idx[static_cast<size_t>(pos)] == d) {
      idx[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

TorsionAssignment angles_of(const std::vector<int>& idx, const AngleGrid& grid) {
  TorsionAssignment t(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) t[i] = grid.value(idx[i]);
  return t;
}

}  // namespace

TEST_CASE("one-hot penalty expansion") {
  SUBCASE("M=1, d=2 expands to 1 - x0 - x1 + 2 x0 x1") {
    const VariableMap vm(1, 2);
    const BinaryPolynomial p = one_hot_penalty(vm);
    CHECK(p.constant() == 1.0);
    CHECK(p.coefficient({0}) == -1.0);
    CHECK(p.coefficient({1}) == -1.0);
    CHECK(p.coefficient({0, 1}) == 2.0);
    CHECK(p.evaluate({1, 0}) == 0.0);
    CHECK(p.evaluate({0, 1}) == 0.0);
    CHECK(p.evaluate({0, 0}) == 1.0);
    CHECK(p.evaluate({1, 1}) == 1.0);
  }
  SUBCASE("feasible assignments cost nothing") {
    const VariableMap vm(3, 8);
    const AngleGrid grid(8);
    const BinaryPolynomial p = one_hot_penalty(vm);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> idx = {static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                              static_cast<int>(rng() % 8)};
      CHECK(p.evaluate(encode(vm, idx)) == 0.0);
    }
  }
  SUBCASE("a double-hot torsion costs exactly one") {
    const VariableMap vm(2, 8);
    auto bits = encode(vm, {2, 5});
    bits[vm.var(0, 6)] = 1;  // second hot bit on torsion 0
    const BinaryPolynomial p = one_hot_penalty(vm);
    CHECK(p.evaluate(bits) == doctest::Approx(1.0));
  }
}

TEST_CASE("trig polynomials") {
  const VariableMap vm(2, 4);
  const AngleGrid grid(4);
  const auto [sin_poly, cos_poly] = trig_poly(vm, 1, grid);

  SUBCASE("selecting theta = pi/2 gives sin 1, cos 0") {
    const auto bits = encode(vm, {0, 1});
    CHECK(sin_poly.evaluate(bits) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cos_poly.evaluate(bits) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("degree stays 1 and variables cover the torsion block") {
    CHECK(sin_poly.degree() == 1);
    CHECK(cos_poly.degree() == 1);
    std::set<uint32_t> vars;
    for (const auto& [mono, c] : sin_poly.terms()) vars.insert(mono[0]);
    for (const auto& [mono, c] : cos_poly.terms()) vars.insert(mono[0]);
    // sin(0) = 0 exactly, so that entry normalizes away; the union still
    // spans all d variables of the torsion
    CHECK(vars == std::set<uint32_t>{4, 5, 6, 7});
  }
  SUBCASE("sin^2 + cos^2 = 1 on every grid point") {
    const VariableMap vm8(1, 8);
    const AngleGrid grid8(8);
    const auto [s8, c8] = trig_poly(vm8, 0, grid8);
    for (int k = 0; k < 8; ++k) {
      const auto bits = encode(vm8, {k});
      const double s = s8.evaluate(bits), c = c8.evaluate(bits);
      CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("decode") {
  const VariableMap vm(3, 8);
  const AngleGrid grid(8);

  SUBCASE("all torsions at the origin give zero angles") {
    const auto r = decode(vm, encode(vm, {0, 0, 0}), grid);
    REQUIRE(std::holds_alternative<TorsionAssignment>(r));
    for (double a : std::get<TorsionAssignment>(r)) CHECK(a == 0.0);
  }
  SUBCASE("an all-cold torsion is infeasible and named") {
    auto bits = encode(vm, {1, 2, 3});
    bits[vm.var(1, 2)] = 0;
    const auto r = decode(vm, bits, grid);
    REQUIRE(std::holds_alternative<Infeasible>(r));
    CHECK(std::get<Infeasible>(r).torsions == std::vector<int>{1});
  }
  SUBCASE("encode/decode round-trips random index vectors") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<int> idx = {static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                              static_cast<int>(rng() % 8)};
      const auto r = decode(vm, encode(vm, idx), grid);
      REQUIRE(std::holds_alternative<TorsionAssignment>(r));
      const auto& angles = std::get<TorsionAssignment>(r);
      for (size_t i = 0; i < idx.size(); ++i) {
        CHECK(angles[i] == doctest::Approx(grid.value(idx[i])).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("master consistency: HUBO equals the geometric objective") {
  // the module's defining test: on every feasible assignment (chop 0) the
  // polynomial value is exactly minus the fragment objective
  for (const char* name : {"pentane", "ligand_b"}) {
    for (int m : {1, 2}) {
      const TorsionModel tm = testutil::load_model(name, m);
      const AngleGrid grid(8);
      const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, 0.0);
      const BinaryPolynomial combined = h.combined();
      for (const auto& idx : feasible_assignments(tm.torsion_count(), 8)) {
        const double poly = combined.evaluate(encode(h.vm, idx));
        const double geo = objective_fragment(tm, angles_of(idx, grid));
        CHECK(std::abs(poly + geo) <= 1e-6 * std::max(1.0, std::abs(geo)));
      }
    }
  }
}

TEST_CASE("HUBO shape facts") {
  const TorsionModel tm = testutil::load_model("ligand_b", 2);
  const AngleGrid grid(8);
  const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, 0.0);

  SUBCASE("degree is bounded by twice the torsion count") {
    CHECK(h.degree() <= 2 * tm.torsion_count());
    CHECK(h.combined().degree() <= 2 * tm.torsion_count());
  }
  SUBCASE("linear term count is torsions x granularity") {
    CHECK(h.combined().count_terms_of_degree(1) ==
          static_cast<size_t>(tm.torsion_count() * grid.d));
  }
  SUBCASE("penalty weight tracks the largest optimization coefficient") {
    CHECK(h.a_const == doctest::Approx(2.0 * h.max_opt_coefficient));
    CHECK(h.a_const > 0);
  }
}

TEST_CASE("infeasible assignments are penalized above the feasible band") {
  const TorsionModel tm = testutil::load_model("pentane", 2);
  const AngleGrid grid(4);  // keep the enumeration small
  const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, 0.0);
  const BinaryPolynomial combined = h.combined();
  const uint32_t n = h.vm.n();
  REQUIRE(n == 8);

  double best_feasible = 1e300;
  double best_infeasible = 1e300;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<uint8_t> bits(n);
    for (uint32_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1;
    const double v = combined.evaluate(bits);
    if (std::holds_alternative<TorsionAssignment>(decode(h.vm, bits, grid))) {
      best_feasible = std::min(best_feasible, v);
    } else {
      best_infeasible = std::min(best_infeasible, v);
    }
  }
  CHECK(best_feasible < best_infeasible);
}

TEST_CASE("chop behaviour") {
  const TorsionModel tm = testutil::load_model("ligand_b", 2);
  const AngleGrid grid(8);

  SUBCASE("term count is non-increasing in the threshold, zero changes nothing") {
    const HuboProblem base = build_hubo_with_factor(tm, grid, 2.0, 0.0);
    size_t last = base.objective.term_count() + 1;
    for (double chop : {0.0, 1.0, 5.0, 30.0, 1e6}) {
      const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, chop);
      CHECK(h.objective.term_count() <= last);
      last = h.objective.term_count();
      if (chop == 0.0) CHECK(h.objective.term_count() == base.objective.term_count());
    }
  }
  SUBCASE("constraint terms survive any threshold") {
    const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, 1e9);
    CHECK(h.objective.term_count() == 0);
    CHECK(h.constraint.term_count() > 0);
    // the chop leaves the constant, so feasibility is still what separates
    // assignments: a feasible vector pays nothing, a double-hot one pays a_const
    const BinaryPolynomial combined = h.combined();
    const double feasible = combined.evaluate(encode(h.vm, {0, 0}));
    CHECK(feasible == doctest::Approx(combined.constant()));
    auto bits = encode(h.vm, {0, 0});
    bits[h.vm.var(0, 3)] = 1;
    CHECK(combined.evaluate(bits) - feasible == doctest::Approx(h.a_const));
  }
}

TEST_CASE("no eligible pairs is a hard error") {
  // butane: its two fragments sit only two edges apart
  const Molecule m = parse_mol2(testutil::butane_mol2());
  const TorsionModel tm = build_torsion_model(m);
  CHECK_THROWS_AS(build_hubo_with_factor(tm, AngleGrid(8), 2.0, 0.0), EncoderError);
}

TEST_CASE("HUBO text export round-trips through the parser") {
  const TorsionModel tm = testutil::load_model("pentane", 2);
  const AngleGrid grid(8);
  const HuboProblem h = build_hubo_with_factor(tm, grid, 2.0, 0.0);
  const BinaryPolynomial combined = h.combined();
  uint32_t nvars = 0;
  const BinaryPolynomial back =
      BinaryPolynomial::from_text(combined.to_text(h.vm.n()), &nvars);
  CHECK(nvars == h.vm.n());
  REQUIRE(back.term_count() == combined.term_count());
  for (const auto& [mono, coeff] : combined.terms()) {
    CHECK(back.coefficient(mono) == coeff);
  }
}
