#include "mufold/geometry.hpp"

#include <cmath>

namespace mufold {

Vec3 Transform::apply(const Vec3& p) const {
  Vec3 out;
  for (int r = 0; r < 3; ++r) {
    out[static_cast<size_t>(r)] =
        at(r, 0) * p[0] + at(r, 1) * p[1] + at(r, 2) * p[2] + at(r, 3);
  }
  return out;
}

Transform operator*(const Transform& a, const Transform& b) {
  Transform out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a.at(r, k) * b.at(k, c);
      out.at(r, c) = s;
    }
  }
  return out;
}

Transform torsion_transform(const Vec3& axis_from, const Vec3& axis_to, double theta) {
  const double ux = axis_to[0] - axis_from[0];
  const double uy = axis_to[1] - axis_from[1];
  const double uz = axis_to[2] - axis_from[2];
  const double norm = std::sqrt(ux * ux + uy * uy + uz * uz);
  if (norm <= 1e-9) throw GeometryError("degenerate rotation axis");
  const double x = ux / norm, y = uy / norm, z = uz / norm;
  const double c = std::cos(theta), s = std::sin(theta), t = 1.0 - c;

  Transform out;
  out.at(0, 0) = t * x * x + c;
  out.at(0, 1) = t * x * y - s * z;
  out.at(0, 2) = t * x * z + s * y;
  out.at(1, 0) = t * x * y + s * z;
  out.at(1, 1) = t * y * y + c;
  out.at(1, 2) = t * y * z - s * x;
  out.at(2, 0) = t * x * z - s * y;
  out.at(2, 1) = t * y * z + s * x;
  out.at(2, 2) = t * z * z + c;
  // translation part: p - R p, so the axis line stays fixed
  for (int r = 0; r < 3; ++r) {
    out.at(r, 3) = axis_from[static_cast<size_t>(r)] -
                   (out.at(r, 0) * axis_from[0] + out.at(r, 1) * axis_from[1] +
                    out.at(r, 2) * axis_from[2]);
  }
  return out;
}

Transform compose(const std::vector<Transform>& transforms) {
  Transform out = Transform::identity();
  for (const Transform& t : transforms) out = out * t;
  return out;
}

Transform fragment_transform(const TorsionModel& tm, const TorsionAssignment& t,
                             int fragment) {
  Transform out = Transform::identity();
  for (int torsion : tm.fragments[static_cast<size_t>(fragment)].influence) {
    const RotatableBond& rb = tm.rotatable_bonds[static_cast<size_t>(torsion)];
    out = out * torsion_transform(tm.molecule.atom(rb.near).position,
                                  tm.molecule.atom(rb.far).position,
                                  t[static_cast<size_t>(torsion)]);
  }
  return out;
}

Molecule apply_torsions(const TorsionModel& tm, const TorsionAssignment& t) {
  Molecule out = tm.molecule;
  std::vector<Transform> per_fragment;
  per_fragment.reserve(tm.fragments.size());
  for (int f = 0; f < tm.fragment_count(); ++f)
    per_fragment.push_back(fragment_transform(tm, t, f));
  for (Atom& a : out.atoms) {
    const int f = tm.fragment_of[static_cast<size_t>(a.id)];
    a.position = per_fragment[static_cast<size_t>(f)].apply(a.position);
  }
  return out;
}

double objective_full(const TorsionModel& tm, const TorsionAssignment& t) {
  const Molecule conf = apply_torsions(tm, t);
  double total = 0.0;
  for (int a = 1; a <= conf.atom_count(); ++a) {
    for (int b = a + 1; b <= conf.atom_count(); ++b) {
      if (!atom_pair_eligible(tm, a, b)) continue;
      total += squared_distance(conf.atom(a).position, conf.atom(b).position);
    }
  }
  return total;
}

double objective_fragment(const TorsionModel& tm, const TorsionAssignment& t) {
  std::vector<Vec3> rep_pos(tm.fragments.size());
  for (int f = 0; f < tm.fragment_count(); ++f) {
    const int rep = tm.fragments[static_cast<size_t>(f)].representative;
    rep_pos[static_cast<size_t>(f)] =
        fragment_transform(tm, t, f).apply(tm.molecule.atom(rep).position);
  }
  double total = 0.0;
  for (const auto& [key, path] : tm.pair_paths) {
    if (!path.eligible()) continue;
    total += squared_distance(rep_pos[static_cast<size_t>(key.first)],
                              rep_pos[static_cast<size_t>(key.second)]);
  }
  return total;
}

}  // namespace mufold
