#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mufold {

using Vec3 = std::array<double, 3>;

enum class BondKind { Single, Double, Triple, Amide, Aromatic };

const char* bond_kind_label(BondKind k);

struct Atom {
  int id = 0;              // 1-based, contiguous
  std::string element;     // "C", "H", "N", ...
  std::string name;        // raw atom-name column
  Vec3 position{0, 0, 0};  // angstroms
};

struct Bond {
  int a = 0;
  int b = 0;
  BondKind kind = BondKind::Single;
};

struct Molecule {
  std::string name;
  std::vector<Atom> atoms;  // atoms[i].id == i+1
  std::vector<Bond> bonds;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int bond_count() const { return static_cast<int>(bonds.size()); }
  const Atom& atom(int id) const { return atoms[static_cast<size_t>(id - 1)]; }
  Atom& atom(int id) { return atoms[static_cast<size_t>(id - 1)]; }
};

/// Adjacency list indexed by atom id (entry 0 unused).
std::vector<std::vector<int>> adjacency(const Molecule& m);

/// Hop distances from `source` over the bond graph; -1 for unreachable atoms.
std::vector<int> bfs_distances(const Molecule& m, int source);

bool is_connected(const Molecule& m);

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace mufold
