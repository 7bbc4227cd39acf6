#pragma once

#include <stdexcept>
#include <string>

#include "mufold/molecule.hpp"

namespace mufold {

/// Parse/validation failure for TRIPOS MOL2 input. `line` is 1-based and
/// points at the offending record (0 when no single line is at fault).
class Mol2Error : public std::runtime_error {
 public:
  enum class Kind {
    MissingSection,
    AtomCountMismatch,
    BondCountMismatch,
    DanglingBondReference,
    UnknownBondKind,
    MalformedCoordinate,
    MalformedRecord,
    DuplicateBond,
  };

  Mol2Error(Kind kind, int line, const std::string& what);

  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Reads the MOLECULE/ATOM/BOND sections of a TRIPOS MOL2 file. Other
/// sections are skipped. The element symbol is the SYBYL type up to the
/// first '.'. Accepts LF and CRLF, 6- or 9-column ATOM records.
Molecule parse_mol2(const std::string& text);

/// Serializes a molecule back to MOL2 with 4-decimal coordinates.
/// parse_mol2(write_mol2(m)) reproduces m up to that rounding.
std::string write_mol2(const Molecule& m);

}  // namespace mufold
