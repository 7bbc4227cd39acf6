#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "mufold/mol2.hpp"
#include "mufold/topology.hpp"

namespace testutil {

inline std::string data_path(const std::string& rel) {
  return std::string(MUFOLD_DATA_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline mufold::Molecule load_ligand(const std::string& name) {
  return mufold::parse_mol2(read_file(data_path("ligands/" + name + ".mol2")));
}

inline mufold::TorsionModel load_model(const std::string& name, int max_torsions = -1) {
  const auto pruned = mufold::prune_terminal_hydrogens(load_ligand(name));
  auto tm = mufold::build_torsion_model(pruned.molecule, max_torsions);
  tm.original_ids = pruned.original_ids;
  return tm;
}

// minimal hand-written MOL2 used across suites
inline std::string water_like_mol2() {
  return "@<TRIPOS>MOLECULE\n"
         "water\n"
         " 3 2 0 0 0\n"
         "SMALL\nNO_CHARGES\n\n"
         "@<TRIPOS>ATOM\n"
         "  1 O1  0.0000 0.0000 0.0000 O.3\n"
         "  2 H1  0.9572 0.0000 0.0000 H\n"
         "  3 H2 -0.2400 0.9266 0.0000 H\n"
         "@<TRIPOS>BOND\n"
         "  1 1 2 1\n"
         "  2 1 3 1\n";
}

inline std::string butane_mol2() {
  return "@<TRIPOS>MOLECULE\n"
         "butane\n"
         " 4 3 0 0 0\n"
         "SMALL\nNO_CHARGES\n\n"
         "@<TRIPOS>ATOM\n"
         "  1 C1 0.0000 0.0000 0.0000 C.3\n"
         "  2 C2 1.5200 0.0000 0.0000 C.3\n"
         "  3 C3 2.0893 1.4093 0.0000 C.3\n"
         "  4 C4 3.6093 1.4093 0.0000 C.3\n"
         "@<TRIPOS>BOND\n"
         "  1 1 2 1\n"
         "  2 2 3 1\n"
         "  3 3 4 1\n";
}

}  // namespace testutil
