#include "mufold/encoder.hpp"

#include <array>
#include <cmath>

namespace mufold {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Entries of the homogeneous torsion transform are affine in (cos, sin):
// M(theta) = Base + Cos * cos(theta) + Sin * sin(theta).
struct AffineRotation {
  std::array<double, 16> base{};
  std::array<double, 16> cos_part{};
  std::array<double, 16> sin_part{};
};

AffineRotation decompose_rotation(const Vec3& from, const Vec3& to) {
  const double ux = to[0] - from[0], uy = to[1] - from[1], uz = to[2] - from[2];
  const double norm = std::sqrt(ux * ux + uy * uy + uz * uz);
  if (norm <= 1e-9) throw GeometryError("degenerate rotation axis");
  const double x = ux / norm, y = uy / norm, z = uz / norm;

  AffineRotation r;
  auto B = [&r](int i, int j) -> double& { return r.base[static_cast<size_t>(i * 4 + j)]; };
  auto C = [&r](int i, int j) -> double& { return r.cos_part[static_cast<size_t>(i * 4 + j)]; };
  auto S = [&r](int i, int j) -> double& { return r.sin_part[static_cast<size_t>(i * 4 + j)]; };

  // R = uu^T + cos * (I - uu^T) + sin * [u]_x
  const double uu[3][3] = {{x * x, x * y, x * z},
                           {x * y, y * y, y * z},
                           {x * z, y * z, z * z}};
  const double cross[3][3] = {{0, -z, y}, {z, 0, -x}, {-y, x, 0}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      B(i, j) = uu[i][j];
      C(i, j) = (i == j ? 1.0 : 0.0) - uu[i][j];
      S(i, j) = cross[i][j];
    }
  }
  // translation column: p - R p
  for (int i = 0; i < 3; ++i) {
    double bp = 0, cp = 0, sp = 0;
    for (int j = 0; j < 3; ++j) {
      bp += uu[i][j] * from[static_cast<size_t>(j)];
      cp += C(i, j) * from[static_cast<size_t>(j)];
      sp += cross[i][j] * from[static_cast<size_t>(j)];
    }
    B(i, 3) = from[static_cast<size_t>(i)] - bp;
    C(i, 3) = -cp;
    S(i, 3) = -sp;
  }
  B(3, 3) = 1.0;
  return r;
}

using PolyMat = std::array<BinaryPolynomial, 16>;

PolyMat poly_matrix(const AffineRotation& rot, const BinaryPolynomial& cos_poly,
                    const BinaryPolynomial& sin_poly, int sign) {
  PolyMat out;
  for (int e = 0; e < 16; ++e) {
    BinaryPolynomial entry(rot.base[static_cast<size_t>(e)]);
    if (rot.cos_part[static_cast<size_t>(e)] != 0.0) {
      BinaryPolynomial c = cos_poly;
      c *= rot.cos_part[static_cast<size_t>(e)];
      entry += c;
    }
    if (rot.sin_part[static_cast<size_t>(e)] != 0.0) {
      BinaryPolynomial s = sin_poly;
      s *= rot.sin_part[static_cast<size_t>(e)] * sign;
      entry += s;
    }
    out[static_cast<size_t>(e)] = std::move(entry);
  }
  return out;
}

PolyMat multiply(const PolyMat& a, const PolyMat& b) {
  PolyMat out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      BinaryPolynomial sum;
      for (int k = 0; k < 4; ++k) {
        sum += a[static_cast<size_t>(r * 4 + k)] * b[static_cast<size_t>(k * 4 + c)];
      }
      out[static_cast<size_t>(r * 4 + c)] = std::move(sum);
    }
  }
  return out;
}

}  // namespace

AngleGrid::AngleGrid(int steps) : d(steps) {
  if (d < 2) throw EncoderError(EncoderError::Kind::BadGrid, "grid needs d >= 2");
}

double AngleGrid::step() const { return kTwoPi / d; }

double AngleGrid::value(int k) const { return step() * k; }

BinaryPolynomial one_hot_penalty(const VariableMap& vm) {
  BinaryPolynomial p;
  for (int i = 0; i < vm.torsions; ++i) {
    p.add_constant(1.0);
    for (int k = 0; k < vm.d; ++k) {
      p.add_term({vm.var(i, k)}, -1.0);  // x^2 - 2x = -x on binaries
      for (int l = k + 1; l < vm.d; ++l) {
        p.add_term({vm.var(i, k), vm.var(i, l)}, 2.0);
      }
    }
  }
  return p;
}

std::pair<BinaryPolynomial, BinaryPolynomial> trig_poly(const VariableMap& vm, int i,
                                                        const AngleGrid& grid) {
  BinaryPolynomial sin_poly, cos_poly;
  for (int k = 0; k < grid.d; ++k) {
    const double theta = grid.value(k);
    sin_poly.add_term({vm.var(i, k)}, std::sin(theta));
    cos_poly.add_term({vm.var(i, k)}, std::cos(theta));
  }
  return {std::move(sin_poly), std::move(cos_poly)};
}

BinaryPolynomial expand_objective(const TorsionModel& tm, const AngleGrid& grid,
                                  const VariableMap& vm) {
  std::vector<std::pair<BinaryPolynomial, BinaryPolynomial>> trig;
  trig.reserve(static_cast<size_t>(tm.torsion_count()));
  for (int i = 0; i < tm.torsion_count(); ++i) trig.push_back(trig_poly(vm, i, grid));

  BinaryPolynomial objective;
  bool any_pair = false;
  for (const auto& [key, path] : tm.pair_paths) {
    if (!path.eligible()) continue;
    any_pair = true;

    // relative transform of the second representative as seen from the first:
    // ordered product along the path, angles negated on the first's side
    PolyMat rel;
    bool have = false;
    for (const auto& [torsion, sign] : path.torsions) {
      const RotatableBond& rb = tm.rotatable_bonds[static_cast<size_t>(torsion)];
      const AffineRotation rot = decompose_rotation(tm.molecule.atom(rb.near).position,
                                                    tm.molecule.atom(rb.far).position);
      PolyMat factor = poly_matrix(rot, trig[static_cast<size_t>(torsion)].second,
                                   trig[static_cast<size_t>(torsion)].first, sign);
      rel = have ? multiply(rel, factor) : std::move(factor);
      have = true;
    }

    const Vec3 a0 =
        tm.molecule.atom(tm.fragments[static_cast<size_t>(key.first)].representative)
            .position;
    const Vec3 b0 =
        tm.molecule.atom(tm.fragments[static_cast<size_t>(key.second)].representative)
            .position;
    for (int coord = 0; coord < 3; ++coord) {
      // a0[coord] - (rel * [b0;1])[coord], then squared
      BinaryPolynomial diff(a0[static_cast<size_t>(coord)]);
      for (int j = 0; j < 3; ++j) {
        BinaryPolynomial part = rel[static_cast<size_t>(coord * 4 + j)];
        part *= -b0[static_cast<size_t>(j)];
        diff += part;
      }
      diff -= rel[static_cast<size_t>(coord * 4 + 3)];
      objective -= diff * diff;
    }
  }
  if (!any_pair) {
    throw EncoderError(EncoderError::Kind::NoEligiblePairs,
                       "no eligible fragment pairs: the objective would be constant");
  }
  return objective;
}

BinaryPolynomial HuboProblem::combined() const {
  BinaryPolynomial all = constraint;
  all += objective;
  return all;
}

int HuboProblem::degree() const {
  return std::max(objective.degree(), constraint.degree());
}

HuboProblem build_hubo(const TorsionModel& tm, const AngleGrid& grid, double a_const,
                       double chop) {
  if (a_const <= 0) throw std::invalid_argument("a_const must be positive");
  if (chop < 0) throw std::invalid_argument("chop must be nonnegative");
  HuboProblem h;
  h.grid = grid;
  h.vm = VariableMap(tm.torsion_count(), grid.d);
  h.objective = expand_objective(tm, grid, h.vm);
  h.max_opt_coefficient = h.objective.max_abs_coefficient();
  h.a_const = a_const;
  h.chop_threshold = chop;
  h.constraint = one_hot_penalty(h.vm);
  h.constraint *= a_const;
  h.objective.chop(chop);
  return h;
}

HuboProblem build_hubo_with_factor(const TorsionModel& tm, const AngleGrid& grid,
                                   double factor, double chop) {
  if (factor <= 0) throw std::invalid_argument("a_const factor must be positive");
  if (chop < 0) throw std::invalid_argument("chop must be nonnegative");
  HuboProblem h;
  h.grid = grid;
  h.vm = VariableMap(tm.torsion_count(), grid.d);
  h.objective = expand_objective(tm, grid, h.vm);
  h.max_opt_coefficient = h.objective.max_abs_coefficient();
  h.a_const = factor * h.max_opt_coefficient;
  h.a_const_factor = factor;
  h.constraint = one_hot_penalty(h.vm);
  h.constraint *= h.a_const;
  h.objective.chop(chop);
  h.chop_threshold = chop;
  return h;
}

DecodeResult decode(const VariableMap& vm, const std::vector<uint8_t>& bits,
                    const AngleGrid& grid) {
  if (bits.size() < vm.n())
    throw std::out_of_range("assignment shorter than the variable map");
  TorsionAssignment angles(static_cast<size_t>(vm.torsions), 0.0);
  Infeasible bad;
  for (int i = 0; i < vm.torsions; ++i) {
    int hot = -1;
    int count = 0;
    for (int k = 0; k < vm.d; ++k) {
      if (bits[vm.var(i, k)]) {
        ++count;
        hot = k;
      }
    }
    if (count != 1) {
      bad.torsions.push_back(i);
    } else {
      angles[static_cast<size_t>(i)] = grid.value(hot);
    }
  }
  if (!bad.torsions.empty()) return bad;
  return angles;
}

std::vector<uint8_t> encode(const VariableMap& vm, const std::vector<int>& step_index) {
  std::vector<uint8_t> bits(vm.n(), 0);
  for (int i = 0; i < vm.torsions; ++i) {
    bits[vm.var(i, step_index[static_cast<size_t>(i)])] = 1;
  }
  return bits;
}

}  // namespace mufold
