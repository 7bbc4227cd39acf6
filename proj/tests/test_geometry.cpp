#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mufold/geometry.hpp"
#include "test_util.hpp"

using namespace mufold;

namespace {

constexpr double kPi = 3.14159265358979323846;

double frand(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double max_abs_diff(const Transform& a, const Transform& b) {
  double worst = 0;
  for (size_t i = 0; i < 16; ++i) {
    worst = std::max(worst, std::abs(a.m[i] - b.m[i]));
  }
  return worst;
}

double det3(const Transform& t) {
  return t.at(0, 0) * (t.at(1, 1) * t.at(2, 2) - t.at(1, 2) * t.at(2, 1)) -
         t.at(0, 1) * (t.at(1, 0) * t.at(2, 2) - t.at(1, 2) * t.at(2, 0)) +
         t.at(0, 2) * (t.at(1, 0) * t.at(2, 1) - t.at(1, 1) * t.at(2, 0));
}

TorsionAssignment random_assignment(const TorsionModel& tm, std::mt19937_64& rng) {
  TorsionAssignment t(static_cast<size_t>(tm.torsion_count()));
  for (double& a : t) a = frand(rng, 0, 2 * kPi);
  return t;
}

}  // namespace

TEST_CASE("torsion transform basics") {
  const Vec3 origin{0, 0, 0};
  const Vec3 zhat{0, 0, 1};

  SUBCASE("zero angle is the identity") {
    CHECK(max_abs_diff(torsion_transform(origin, zhat, 0.0), Transform::identity()) <
          1e-15);
  }
  SUBCASE("full turn is the identity") {
    CHECK(max_abs_diff(torsion_transform(origin, zhat, 2 * kPi),
                       Transform::identity()) < 1e-12);
  }
  SUBCASE("quarter turn about z maps x to y") {
    const Vec3 p = torsion_transform(origin, zhat, kPi / 2).apply({1, 0, 0});
    CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("points on the axis line stay fixed") {
    const Transform t = torsion_transform({1, 2, 3}, {2, 3, 4}, 1.234);
    const Vec3 on_axis{1.5, 2.5, 3.5};
    const Vec3 p = t.apply(on_axis);
    for (int c = 0; c < 3; ++c) {
      CHECK(p[static_cast<size_t>(c)] ==
            doctest::Approx(on_axis[static_cast<size_t>(c)]).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate axis is rejected") {
    CHECK_THROWS_AS(torsion_transform({1, 1, 1}, {1, 1, 1 + 1e-12}, 0.5), GeometryError);
  }
}

TEST_CASE("rotation blocks are orthogonal with unit determinant") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 from{frand(rng, -5, 5), frand(rng, -5, 5), frand(rng, -5, 5)};
    Vec3 to = from;
    while (squared_distance(from, to) < 1e-6) {
      to = {frand(rng, -5, 5), frand(rng, -5, 5), frand(rng, -5, 5)};
    }
    const Transform t = torsion_transform(from, to, frand(rng, 0, 2 * kPi));
    // R R^T == I
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        double dot = 0;
        for (int k = 0; k < 3; ++k) dot += t.at(r, k) * t.at(c, k);
        CHECK(std::abs(dot - (r == c ? 1.0 : 0.0)) < 1e-9);
      }
    }
    CHECK(std::abs(det3(t) - 1.0) < 1e-9);
    // bottom row untouched
    CHECK(t.at(3, 0) == 0.0);
    CHECK(t.at(3, 3) == 1.0);
  }
}

TEST_CASE("compose") {
  const Vec3 origin{0, 0, 0};
  const Vec3 zhat{0, 0, 1};
  SUBCASE("a rotation against its inverse cancels") {
    const Transform fwd = torsion_transform(origin, zhat, 0.7);
    const Transform back = torsion_transform(origin, zhat, -0.7);
    CHECK(max_abs_diff(compose({fwd, back}), Transform::identity()) < 1e-12);
  }
  SUBCASE("single element composes to itself") {
    const Transform t = torsion_transform({0.3, 0, 0}, {1, 2, 0}, 0.9);
    CHECK(max_abs_diff(compose({t}), t) == 0.0);
  }
  SUBCASE("rotations about skew axes do not commute") {
    const Transform a = torsion_transform({0, 0, 0}, {0, 0, 1}, 1.1);
    const Transform b = torsion_transform({1, 0, 0}, {1, 1, 0}, 0.8);
    const Vec3 probe{0.3, -0.4, 1.7};
    const Vec3 ab = compose({a, b}).apply(probe);
    const Vec3 ba = compose({b, a}).apply(probe);
    CHECK(squared_distance(ab, ba) > 1e-6);
  }
}

TEST_CASE("apply_torsions") {
  const TorsionModel tm = testutil::load_model("ligand_b");
  std::mt19937_64 rng(777);

  SUBCASE("all-zero assignment leaves coordinates untouched") {
    const TorsionAssignment zero(static_cast<size_t>(tm.torsion_count()), 0.0);
    const Molecule conf = apply_torsions(tm, zero);
    for (int a = 1; a <= tm.molecule.atom_count(); ++a) {
      CHECK(squared_distance(conf.atom(a).position, tm.molecule.atom(a).position) <
            1e-24);
    }
  }
  SUBCASE("bond lengths survive any assignment") {
    for (int trial = 0; trial < 25; ++trial) {
      const Molecule conf = apply_torsions(tm, random_assignment(tm, rng));
      for (const Bond& b : tm.molecule.bonds) {
        const double before = squared_distance(tm.molecule.atom(b.a).position,
                                               tm.molecule.atom(b.b).position);
        const double after =
            squared_distance(conf.atom(b.a).position, conf.atom(b.b).position);
        CHECK(std::abs(after - before) <= 1e-6 * before);
      }
    }
  }
  SUBCASE("whole fragments move rigidly, not just bonds") {
    for (int trial = 0; trial < 25; ++trial) {
      const Molecule conf = apply_torsions(tm, random_assignment(tm, rng));
      for (const Fragment& f : tm.fragments) {
        for (size_t i = 0; i < f.atoms.size(); ++i) {
          for (size_t j = i + 1; j < f.atoms.size(); ++j) {
            const double before =
                squared_distance(tm.molecule.atom(f.atoms[i]).position,
                                 tm.molecule.atom(f.atoms[j]).position);
            const double after = squared_distance(conf.atom(f.atoms[i]).position,
                                                  conf.atom(f.atoms[j]).position);
            CHECK(std::abs(after - before) <= 1e-6 * std::max(before, 1e-12));
          }
        }
      }
    }
  }
  SUBCASE("pairs with no torsion between them keep their distance") {
    // fragment {5..10} and its center atom: all intra-fragment pairs already
    // covered; check a cross-fragment pair whose path has no torsion is
    // impossible by construction, so verify the same-fragment case instead
    // across 100 assignments on the largest fragment.
    const Fragment& ring = tm.fragments[3];
    REQUIRE(ring.atoms.size() == 6);
    const double before = squared_distance(tm.molecule.atom(ring.atoms[0]).position,
                                           tm.molecule.atom(ring.atoms[3]).position);
    for (int trial = 0; trial < 100; ++trial) {
      const Molecule conf = apply_torsions(tm, random_assignment(tm, rng));
      const double after = squared_distance(conf.atom(ring.atoms[0]).position,
                                            conf.atom(ring.atoms[3]).position);
      CHECK(std::abs(after - before) <= 1e-6 * before);
    }
  }
}

TEST_CASE("objective_full") {
  SUBCASE("no eligible pair means zero") {
    // 3-atom chain with a hand-declared torsion: every pair is too close
    Molecule m;
    m.atoms.push_back({1, "C", "C1", {0, 0, 0}});
    m.atoms.push_back({2, "C", "C2", {1, 0, 0}});
    m.atoms.push_back({3, "C", "C3", {2, 0, 0}});
    m.bonds.push_back({1, 2, BondKind::Single});
    m.bonds.push_back({2, 3, BondKind::Single});
    TorsionModel tm;
    tm.molecule = m;
    tm.original_ids = {1, 2, 3};
    tm.center_atom = 2;
    tm.rotatable_bonds.push_back({1, 2, 2, 1});
    Fragment f0;
    f0.atoms = {1};
    f0.influence = {0};
    f0.representative = 1;
    Fragment f1;
    f1.atoms = {2, 3};
    f1.representative = 2;
    tm.fragments = {f0, f1};
    tm.fragment_of = {-1, 0, 1, 1};
    tm.pair_paths[{0, 1}] = pair_eligibility(tm, 0, 1);
    CHECK(objective_full(tm, {0.0}) == 0.0);
    CHECK(objective_fragment(tm, {0.0}) == 0.0);
  }
  SUBCASE("collinear 4-chain has a single pair worth 9") {
    Molecule m;
    for (int i = 0; i < 4; ++i) {
      m.atoms.push_back({i + 1, "C", "C" + std::to_string(i + 1),
                         {static_cast<double>(i), 0, 0}});
    }
    for (int i = 1; i < 4; ++i) m.bonds.push_back({i, i + 1, BondKind::Single});
    const TorsionModel tm = build_torsion_model(m);
    REQUIRE(tm.torsion_count() == 1);
    CHECK(objective_full(tm, {0.0}) == doctest::Approx(9.0));
    CHECK(objective_full(tm, {1.0}) == doctest::Approx(9.0));  // on-axis: constant
  }
  SUBCASE("matches a brute-force pair oracle on the fixtures") {
    for (const char* name : {"ligand_a", "ligand_b", "pentane"}) {
      const TorsionModel tm = testutil::load_model(name);
      const TorsionAssignment zero(static_cast<size_t>(tm.torsion_count()), 0.0);
      double expected = 0.0;
      for (int a = 1; a <= tm.molecule.atom_count(); ++a) {
        const auto dist = bfs_distances(tm.molecule, a);
        for (int b = a + 1; b <= tm.molecule.atom_count(); ++b) {
          if (dist[static_cast<size_t>(b)] < 3) continue;
          bool crosses = false;
          for (const RotatableBond& rb : tm.rotatable_bonds) {
            // rotatables are bridges: the pair straddles rb iff exactly one
            // endpoint is separated from the center by rb
            const auto sep = [&](int atom) {
              const auto& infl =
                  tm.fragments[static_cast<size_t>(tm.fragment_of[static_cast<size_t>(atom)])]
                      .influence;
              return std::find(infl.begin(), infl.end(),
                               static_cast<int>(&rb - tm.rotatable_bonds.data())) !=
                     infl.end();
            };
            if (sep(a) != sep(b)) {
              crosses = true;
              break;
            }
          }
          if (!crosses) continue;
          expected += squared_distance(tm.molecule.atom(a).position,
                                       tm.molecule.atom(b).position);
        }
      }
      CHECK(objective_full(tm, zero) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("frozen identity values for the fixtures") {
    CHECK(objective_full(testutil::load_model("ligand_a"),
                         TorsionAssignment(7, 0.0)) ==
          doctest::Approx(7672.02566578).epsilon(1e-8));
    CHECK(objective_full(testutil::load_model("ligand_b"),
                         TorsionAssignment(4, 0.0)) ==
          doctest::Approx(1021.42420936).epsilon(1e-8));
    CHECK(objective_full(testutil::load_model("pentane"),
                         TorsionAssignment(2, 0.0)) ==
          doctest::Approx(55.43449365).epsilon(1e-8));
  }
}

TEST_CASE("objective_fragment") {
  SUBCASE("two-fragment model is one squared representative distance") {
    Molecule m;
    for (int i = 0; i < 5; ++i) {
      m.atoms.push_back({i + 1, "C", "C" + std::to_string(i + 1),
                         {1.5 * i, 0.8 * (i % 2), 0}});
    }
    for (int i = 1; i < 5; ++i) m.bonds.push_back({i, i + 1, BondKind::Single});
    const TorsionModel tm = build_torsion_model(m, 1);
    REQUIRE(tm.fragment_count() == 2);
    const TorsionAssignment zero(1, 0.0);
    const double expected =
        squared_distance(tm.molecule.atom(tm.fragments[0].representative).position,
                         tm.molecule.atom(tm.fragments[1].representative).position);
    CHECK(objective_fragment(tm, zero) == doctest::Approx(expected));
  }
  SUBCASE("equals direct recomputation from transformed coordinates") {
    std::mt19937_64 rng(4242);
    for (const char* name : {"ligand_a", "ligand_b", "pentane"}) {
      const TorsionModel tm = testutil::load_model(name);
      for (int trial = 0; trial < 10; ++trial) {
        const TorsionAssignment t = random_assignment(tm, rng);
        const Molecule conf = apply_torsions(tm, t);
        double expected = 0.0;
        for (const auto& [key, path] : tm.pair_paths) {
          if (!path.eligible()) continue;
          expected += squared_distance(
              conf.atom(tm.fragments[static_cast<size_t>(key.first)].representative)
                  .position,
              conf.atom(tm.fragments[static_cast<size_t>(key.second)].representative)
                  .position);
        }
        CHECK(objective_fragment(tm, t) == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }
  SUBCASE("frozen identity values for the fixtures") {
    CHECK(objective_fragment(testutil::load_model("ligand_a"),
                             TorsionAssignment(7, 0.0)) ==
          doctest::Approx(763.34339940).epsilon(1e-8));
    CHECK(objective_fragment(testutil::load_model("ligand_b"),
                             TorsionAssignment(4, 0.0)) ==
          doctest::Approx(195.07377771).epsilon(1e-8));
    CHECK(objective_fragment(testutil::load_model("pentane"),
                             TorsionAssignment(2, 0.0)) ==
          doctest::Approx(15.01389485).epsilon(1e-8));
  }
  SUBCASE("periodic under full-turn shifts per torsion") {
    std::mt19937_64 rng(31337);
    const TorsionModel tm = testutil::load_model("ligand_b");
    for (int trial = 0; trial < 20; ++trial) {
      const TorsionAssignment t = random_assignment(tm, rng);
      const double base = objective_fragment(tm, t);
      for (int i = 0; i < tm.torsion_count(); ++i) {
        TorsionAssignment shifted = t;
        shifted[static_cast<size_t>(i)] += 2 * kPi;
        CHECK(std::abs(objective_fragment(tm, shifted) - base) <=
              1e-9 * std::max(1.0, std::abs(base)));
      }
    }
  }
}
