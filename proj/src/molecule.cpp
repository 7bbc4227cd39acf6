#include "mufold/molecule.hpp"

#include <deque>

namespace mufold {

const char* bond_kind_label(BondKind k) {
  switch (k) {
    case BondKind::Single: return "1";
    case BondKind::Double: return "2";
    case BondKind::Triple: return "3";
    case BondKind::Amide: return "am";
    case BondKind::Aromatic: return "ar";
  }
  return "?";
}

std::vector<std::vector<int>> adjacency(const Molecule& m) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(m.atom_count()) + 1);
  for (const Bond& b : m.bonds) {
    adj[static_cast<size_t>(b.a)].push_back(b.b);
    adj[static_cast<size_t>(b.b)].push_back(b.a);
  }
  return adj;
}

std::vector<int> bfs_distances(const Molecule& m, int source) {
  const auto adj = adjacency(m);
  std::vector<int> dist(static_cast<size_t>(m.atom_count()) + 1, -1);
  dist[static_cast<size_t>(source)] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool is_connected(const Molecule& m) {
  if (m.atoms.empty()) return true;
  const auto dist = bfs_distances(m, 1);
  for (const Atom& a : m.atoms) {
    if (dist[static_cast<size_t>(a.id)] < 0) return false;
  }
  return true;
}

}  // namespace mufold
