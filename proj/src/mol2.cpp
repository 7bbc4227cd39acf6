#include "mufold/mol2.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <vector>

namespace mufold {
namespace {

struct Line {
  int number = 0;  // 1-based position in the input
  std::string text;
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> lines;
  std::string current;
  int number = 1;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back({number++, current});
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back({number, current});
  }
  return lines;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

int parse_int(const std::string& t, int line, const char* what) {
  int value = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), value);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw Mol2Error(Mol2Error::Kind::MalformedRecord, line,
                    std::string("expected integer for ") + what + ": '" + t + "'");
  }
  return value;
}

double parse_coord(const std::string& t, int line) {
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw Mol2Error(Mol2Error::Kind::MalformedCoordinate, line,
                    "malformed coordinate '" + t + "'");
  }
  return v;
}

BondKind parse_bond_kind(const std::string& t, int line) {
  if (t == "1") return BondKind::Single;
  if (t == "2") return BondKind::Double;
  if (t == "3") return BondKind::Triple;
  if (t == "am") return BondKind::Amide;
  if (t == "ar") return BondKind::Aromatic;
  throw Mol2Error(Mol2Error::Kind::UnknownBondKind, line,
                  "unknown bond kind '" + t + "'");
}

}  // namespace

Mol2Error::Mol2Error(Kind kind, int line, const std::string& what)
    : std::runtime_error("mol2: line " + std::to_string(line) + ": " + what),
      kind_(kind),
      line_(line) {}

Molecule parse_mol2(const std::string& text) {
  const auto lines = split_lines(text);

  int molecule_at = -1, atom_at = -1, bond_at = -1;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& s = lines[i].text;
    if (s.rfind("@<TRIPOS>", 0) != 0) continue;
    const std::string section = s.substr(9);
    if (section == "MOLECULE" && molecule_at < 0) molecule_at = static_cast<int>(i);
    if (section == "ATOM" && atom_at < 0) atom_at = static_cast<int>(i);
    if (section == "BOND" && bond_at < 0) bond_at = static_cast<int>(i);
  }
  if (molecule_at < 0)
    throw Mol2Error(Mol2Error::Kind::MissingSection, 0, "no @<TRIPOS>MOLECULE section");
  if (atom_at < 0)
    throw Mol2Error(Mol2Error::Kind::MissingSection, 0, "no @<TRIPOS>ATOM section");
  if (bond_at < 0)
    throw Mol2Error(Mol2Error::Kind::MissingSection, 0, "no @<TRIPOS>BOND section");

  auto section_records = [&](int header) {
    std::vector<Line> recs;
    for (size_t i = static_cast<size_t>(header) + 1; i < lines.size(); ++i) {
      const std::string& s = lines[i].text;
      if (s.rfind("@<TRIPOS>", 0) == 0) break;
      recs.push_back(lines[i]);
    }
    return recs;
  };

  Molecule mol;

  // MOLECULE: line 1 name, line 2 counts
  const auto head = section_records(molecule_at);
  if (head.empty()) {
    throw Mol2Error(Mol2Error::Kind::MalformedRecord, lines[static_cast<size_t>(molecule_at)].number,
                    "MOLECULE section has no name line");
  }
  mol.name = head[0].text;
  while (!mol.name.empty() && std::isspace(static_cast<unsigned char>(mol.name.front())))
    mol.name.erase(mol.name.begin());
  while (!mol.name.empty() && std::isspace(static_cast<unsigned char>(mol.name.back())))
    mol.name.pop_back();
  if (head.size() < 2)
    throw Mol2Error(Mol2Error::Kind::MalformedRecord, head[0].number,
                    "MOLECULE section has no counts line");
  const auto counts = tokens(head[1].text);
  if (counts.empty())
    throw Mol2Error(Mol2Error::Kind::MalformedRecord, head[1].number, "empty counts line");
  const int declared_atoms = parse_int(counts[0], head[1].number, "atom count");
  const int declared_bonds =
      counts.size() > 1 ? parse_int(counts[1], head[1].number, "bond count") : 0;

  // ATOM records: id name x y z type [subst_id subst_name charge]
  for (const Line& rec : section_records(atom_at)) {
    const auto t = tokens(rec.text);
    if (t.empty()) continue;
    if (t.size() < 6)
      throw Mol2Error(Mol2Error::Kind::MalformedRecord, rec.number,
                      "ATOM record needs at least 6 fields");
    Atom a;
    a.id = parse_int(t[0], rec.number, "atom id");
    a.name = t[1];
    a.position = {parse_coord(t[2], rec.number), parse_coord(t[3], rec.number),
                  parse_coord(t[4], rec.number)};
    const std::string& type = t[5];
    a.element = type.substr(0, type.find('.'));
    const int expected = mol.atom_count() + 1;
    if (a.id != expected)
      throw Mol2Error(Mol2Error::Kind::MalformedRecord, rec.number,
                      "atom ids must be contiguous from 1; got " + std::to_string(a.id) +
                          ", expected " + std::to_string(expected));
    mol.atoms.push_back(std::move(a));
  }
  if (mol.atom_count() != declared_atoms)
    throw Mol2Error(Mol2Error::Kind::AtomCountMismatch,
                    head[1].number,
                    "header declares " + std::to_string(declared_atoms) + " atoms, found " +
                        std::to_string(mol.atom_count()));

  // BOND records: id a b kind
  std::set<std::pair<int, int>> seen;
  for (const Line& rec : section_records(bond_at)) {
    const auto t = tokens(rec.text);
    if (t.empty()) continue;
    if (t.size() < 4)
      throw Mol2Error(Mol2Error::Kind::MalformedRecord, rec.number,
                      "BOND record needs 4 fields");
    Bond b;
    b.a = parse_int(t[1], rec.number, "bond endpoint");
    b.b = parse_int(t[2], rec.number, "bond endpoint");
    b.kind = parse_bond_kind(t[3], rec.number);
    if (b.a == b.b)
      throw Mol2Error(Mol2Error::Kind::DanglingBondReference, rec.number,
                      "bond endpoints coincide: " + std::to_string(b.a));
    if (b.a < 1 || b.a > mol.atom_count() || b.b < 1 || b.b > mol.atom_count())
      throw Mol2Error(Mol2Error::Kind::DanglingBondReference, rec.number,
                      "bond references missing atom " +
                          std::to_string(b.a < 1 || b.a > mol.atom_count() ? b.a : b.b));
    const auto key = std::minmax(b.a, b.b);
    if (!seen.insert(key).second)
      throw Mol2Error(Mol2Error::Kind::DuplicateBond, rec.number,
                      "duplicate bond " + std::to_string(key.first) + "-" +
                          std::to_string(key.second));
    mol.bonds.push_back(b);
  }
  if (mol.bond_count() != declared_bonds)
    throw Mol2Error(Mol2Error::Kind::BondCountMismatch, head[1].number,
                    "header declares " + std::to_string(declared_bonds) + " bonds, found " +
                        std::to_string(mol.bond_count()));

  return mol;
}

std::string write_mol2(const Molecule& m) {
  std::string out;
  out += "@<TRIPOS>MOLECULE\n";
  out += m.name.empty() ? "UNNAMED" : m.name;
  out += "\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), " %d %d 0 0 0\n", m.atom_count(), m.bond_count());
  out += buf;
  out += "SMALL\nNO_CHARGES\n\n@<TRIPOS>ATOM\n";
  for (const Atom& a : m.atoms) {
    const std::string name = a.name.empty() ? a.element + std::to_string(a.id) : a.name;
    std::snprintf(buf, sizeof(buf), "%7d %-8s %10.4f %10.4f %10.4f %-8s\n", a.id,
                  name.c_str(), a.position[0], a.position[1], a.position[2],
                  a.element.c_str());
    out += buf;
  }
  out += "@<TRIPOS>BOND\n";
  int id = 1;
  for (const Bond& b : m.bonds) {
    std::snprintf(buf, sizeof(buf), "%6d %5d %5d %4s\n", id++, b.a, b.b,
                  bond_kind_label(b.kind));
    out += buf;
  }
  return out;
}

}  // namespace mufold
