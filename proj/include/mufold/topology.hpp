#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mufold/molecule.hpp"

namespace mufold {

class TopologyError : public std::runtime_error {
 public:
  enum class Kind { EmptyAfterPruning, DisconnectedGraph, NoRotatableBonds };
  TopologyError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct PruneResult {
  Molecule molecule;
  std::vector<int> original_ids;  // original_ids[new_id - 1] = id before pruning
};

/// Removes atoms that are hydrogens of degree 1 (single pass, degrees taken
/// from the input graph) and re-indexes the rest contiguously.
/// Throws EmptyAfterPruning if fewer than 2 atoms remain.
PruneResult prune_terminal_hydrogens(const Molecule& m);

/// Bonds that are single or aromatic, whose removal disconnects the graph,
/// and whose removal leaves two components of >= 2 atoms each.
std::vector<Bond> find_rotatable_bonds(const Molecule& m);

/// Betweenness over unordered pairs: for atom v, sum of sigma_st(v)/sigma_st
/// over all s < t with s,t != v, on unweighted shortest paths.
/// Throws DisconnectedGraph.
std::vector<double> betweenness_centrality(const Molecule& m);  // index = id-1

struct RotatableBond {
  int a = 0;        // endpoint ids in the pruned molecule
  int b = 0;
  int near = 0;     // endpoint closer to the center atom
  int far = 0;
};

struct Fragment {
  std::vector<int> atoms;       // sorted ascending
  std::vector<int> influence;   // rotatable indices, center-outward order
  int representative = 0;       // median atom
};

/// Fragment-pair relation: torsions on the representative-representative
/// path (sign -1 on the first fragment's side of the branch point), and the
/// eligibility verdict from the two distance conditions.
struct PairPath {
  enum class Status { Eligible, NoTorsionOnPath, PathTooShort };
  Status status = Status::Eligible;
  std::vector<std::pair<int, int>> torsions;  // (rotatable index, sign)
  int edges = 0;                              // rep-rep hop distance
  bool eligible() const { return status == Status::Eligible; }
};

struct TorsionModel {
  Molecule molecule;              // pruned
  std::vector<int> original_ids;  // pruning id map
  int center_atom = 0;
  std::vector<RotatableBond> rotatable_bonds;
  std::vector<Fragment> fragments;
  std::vector<int> fragment_of;   // fragment index per atom id (entry 0 unused)
  std::map<std::pair<int, int>, PairPath> pair_paths;  // key: fragment indices

  int torsion_count() const { return static_cast<int>(rotatable_bonds.size()); }
  int fragment_count() const { return static_cast<int>(fragments.size()); }
};

/// Derives center atom, ordered rotatable bonds, influence sets and the
/// fragment decomposition. `max_torsions` keeps only the first torsions in
/// model order; the rest are treated as rigid. Throws NoRotatableBonds and
/// DisconnectedGraph.
TorsionModel build_torsion_model(const Molecule& pruned, int max_torsions = -1);

/// Conditions on the representative-representative shortest path: at least
/// one torsion and at least three edges.
PairPath pair_eligibility(const TorsionModel& tm, int frag_a, int frag_b);

/// Same two conditions applied to an arbitrary atom pair.
bool atom_pair_eligible(const TorsionModel& tm, int atom_a, int atom_b);

/// Lexicographically smallest shortest path from `source` to every atom,
/// as id sequences starting at `source`. Exposed for oracles and tests.
std::vector<std::vector<int>> lex_shortest_paths(const Molecule& m, int source);

/// Diagnostic JSON export (schema documented in the README).
std::string model_to_json(const TorsionModel& tm);

}  // namespace mufold
