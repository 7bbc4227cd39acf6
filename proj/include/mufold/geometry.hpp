#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "mufold/topology.hpp"

namespace mufold {

/// One angle in radians per rotatable bond, model order.
using TorsionAssignment = std::vector<double>;

/// Rigid transform in homogeneous coordinates. The rotation block of any
/// transform produced here is orthogonal with determinant +1.
struct Transform {
  // row-major 4x4
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  static Transform identity() { return {}; }
  double at(int r, int c) const { return m[static_cast<size_t>(r * 4 + c)]; }
  double& at(int r, int c) { return m[static_cast<size_t>(r * 4 + c)]; }
  Vec3 apply(const Vec3& p) const;
};

Transform operator*(const Transform& a, const Transform& b);

class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Rotation by theta about the line through axis_from toward axis_to,
/// right-handed. Points on the line are fixed. Throws on a degenerate axis
/// (endpoints closer than 1e-9).
Transform torsion_transform(const Vec3& axis_from, const Vec3& axis_to, double theta);

/// Left-to-right product; the first element is the leftmost factor.
Transform compose(const std::vector<Transform>& transforms);

/// Transform of one fragment under an assignment: product of its influence
/// set's torsion transforms, the torsion nearest the center leftmost, about
/// the original bond axes.
Transform fragment_transform(const TorsionModel& tm, const TorsionAssignment& t,
                             int fragment);

/// New conformation: every atom moved by its fragment's transform.
Molecule apply_torsions(const TorsionModel& tm, const TorsionAssignment& t);

/// Sum of squared distances over eligible atom pairs (both path conditions
/// applied per pair).
double objective_full(const TorsionModel& tm, const TorsionAssignment& t);

/// Sum of squared representative distances over eligible fragment pairs.
/// This is the quantity the binary encodings reproduce.
double objective_fragment(const TorsionModel& tm, const TorsionAssignment& t);

}  // namespace mufold
