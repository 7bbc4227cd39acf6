#include "mufold/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "json.hpp"

namespace mufold {
namespace {

// Component sizes after removing one bond: (side of bond.a, side of bond.b),
// or nullopt when the bond is not a bridge.
std::optional<std::pair<int, int>> bridge_split(const Molecule& m, size_t bond_idx) {
  const Bond& cut = m.bonds[bond_idx];
  std::vector<std::vector<int>> adj(static_cast<size_t>(m.atom_count()) + 1);
  for (size_t i = 0; i < m.bonds.size(); ++i) {
    if (i == bond_idx) continue;
    adj[static_cast<size_t>(m.bonds[i].a)].push_back(m.bonds[i].b);
    adj[static_cast<size_t>(m.bonds[i].b)].push_back(m.bonds[i].a);
  }
  std::vector<char> seen(static_cast<size_t>(m.atom_count()) + 1, 0);
  std::deque<int> queue{cut.a};
  seen[static_cast<size_t>(cut.a)] = 1;
  int reach = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++reach;
        queue.push_back(v);
      }
    }
  }
  if (seen[static_cast<size_t>(cut.b)]) return std::nullopt;  // still connected
  return std::make_pair(reach, m.atom_count() - reach);
}

}  // namespace

PruneResult prune_terminal_hydrogens(const Molecule& m) {
  const auto adj = adjacency(m);
  std::vector<int> remap(static_cast<size_t>(m.atom_count()) + 1, 0);
  PruneResult out;
  out.molecule.name = m.name;
  for (const Atom& a : m.atoms) {
    const bool terminal_h =
        a.element == "H" && adj[static_cast<size_t>(a.id)].size() == 1;
    if (terminal_h) continue;
    Atom copy = a;
    copy.id = out.molecule.atom_count() + 1;
    remap[static_cast<size_t>(a.id)] = copy.id;
    out.original_ids.push_back(a.id);
    out.molecule.atoms.push_back(std::move(copy));
  }
  if (out.molecule.atom_count() < 2) {
    throw TopologyError(TopologyError::Kind::EmptyAfterPruning,
                        "fewer than 2 atoms remain after hydrogen pruning");
  }
  for (const Bond& b : m.bonds) {
    const int na = remap[static_cast<size_t>(b.a)];
    const int nb = remap[static_cast<size_t>(b.b)];
    if (na && nb) out.molecule.bonds.push_back({na, nb, b.kind});
  }
  return out;
}

std::vector<Bond> find_rotatable_bonds(const Molecule& m) {
  std::vector<Bond> out;
  for (size_t i = 0; i < m.bonds.size(); ++i) {
    const Bond& b = m.bonds[i];
    if (b.kind != BondKind::Single && b.kind != BondKind::Aromatic) continue;
    const auto split = bridge_split(m, i);
    if (!split) continue;
    if (split->first >= 2 && split->second >= 2) out.push_back(b);
  }
  return out;
}

std::vector<double> betweenness_centrality(const Molecule& m) {
  if (!is_connected(m)) {
    throw TopologyError(TopologyError::Kind::DisconnectedGraph,
                        "centrality requires a connected molecule");
  }
  const int n = m.atom_count();
  const auto adj = adjacency(m);
  std::vector<double> bc(static_cast<size_t>(n), 0.0);

  // Brandes accumulation from every source; each unordered pair is then
  // counted twice, so halve at the end.
  std::vector<int> dist(static_cast<size_t>(n) + 1);
  std::vector<double> sigma(static_cast<size_t>(n) + 1);
  std::vector<double> delta(static_cast<size_t>(n) + 1);
  std::vector<std::vector<int>> preds(static_cast<size_t>(n) + 1);
  for (int s = 1; s <= n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    dist[static_cast<size_t>(s)] = 0;
    sigma[static_cast<size_t>(s)] = 1.0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (int v : adj[static_cast<size_t>(u)]) {
        if (dist[static_cast<size_t>(v)] < 0) {
          dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
          queue.push_back(v);
        }
        if (dist[static_cast<size_t>(v)] == dist[static_cast<size_t>(u)] + 1) {
          sigma[static_cast<size_t>(v)] += sigma[static_cast<size_t>(u)];
          preds[static_cast<size_t>(v)].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int p : preds[static_cast<size_t>(w)]) {
        delta[static_cast<size_t>(p)] += sigma[static_cast<size_t>(p)] /
                                         sigma[static_cast<size_t>(w)] *
                                         (1.0 + delta[static_cast<size_t>(w)]);
      }
      if (w != s) bc[static_cast<size_t>(w - 1)] += delta[static_cast<size_t>(w)];
    }
  }
  for (double& v : bc) v *= 0.5;
  return bc;
}

std::vector<std::vector<int>> lex_shortest_paths(const Molecule& m, int source) {
  const int n = m.atom_count();
  auto adj = adjacency(m);
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  std::vector<int> dist(static_cast<size_t>(n) + 1, -1);
  std::vector<int> order;
  dist[static_cast<size_t>(source)] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    order.push_back(u);
    for (int v : adj[static_cast<size_t>(u)]) {
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }

  // In BFS-layer order, the smallest path to v extends the smallest path of
  // the predecessor whose full path sequence compares least.
  std::vector<std::vector<int>> path(static_cast<size_t>(n) + 1);
  path[static_cast<size_t>(source)] = {source};
  for (size_t oi = 1; oi < order.size(); ++oi) {
    const int v = order[oi];
    const std::vector<int>* best = nullptr;
    for (int p : adj[static_cast<size_t>(v)]) {
      if (dist[static_cast<size_t>(p)] != dist[static_cast<size_t>(v)] - 1) continue;
      const auto& cand = path[static_cast<size_t>(p)];
      if (cand.empty()) continue;
      if (!best || std::lexicographical_compare(cand.begin(), cand.end(),
                                                best->begin(), best->end())) {
        best = &cand;
      }
    }
    auto full = *best;
    full.push_back(v);
    path[static_cast<size_t>(v)] = std::move(full);
  }
  return path;
}

TorsionModel build_torsion_model(const Molecule& pruned, int max_torsions) {
  TorsionModel tm;
  tm.molecule = pruned;
  tm.original_ids.resize(static_cast<size_t>(pruned.atom_count()));
  for (int i = 0; i < pruned.atom_count(); ++i)
    tm.original_ids[static_cast<size_t>(i)] = i + 1;

  const auto bc = betweenness_centrality(pruned);
  int center = 1;
  for (int id = 2; id <= pruned.atom_count(); ++id) {
    if (bc[static_cast<size_t>(id - 1)] > bc[static_cast<size_t>(center - 1)]) center = id;
  }
  tm.center_atom = center;

  auto rotatable = find_rotatable_bonds(pruned);
  if (rotatable.empty()) {
    throw TopologyError(TopologyError::Kind::NoRotatableBonds,
                        "molecule has no rotatable bonds");
  }
  const auto center_dist = bfs_distances(pruned, center);
  auto hop = [&](const Bond& b) {
    return std::min(center_dist[static_cast<size_t>(b.a)],
                    center_dist[static_cast<size_t>(b.b)]);
  };
  std::sort(rotatable.begin(), rotatable.end(), [&](const Bond& x, const Bond& y) {
    const auto kx = std::tuple(hop(x), std::min(x.a, x.b), std::max(x.a, x.b));
    const auto ky = std::tuple(hop(y), std::min(y.a, y.b), std::max(y.a, y.b));
    return kx < ky;
  });
  if (max_torsions >= 0 && static_cast<size_t>(max_torsions) < rotatable.size())
    rotatable.resize(static_cast<size_t>(max_torsions));
  if (rotatable.empty()) {
    throw TopologyError(TopologyError::Kind::NoRotatableBonds,
                        "torsion cap removed all rotatable bonds");
  }

  std::map<std::pair<int, int>, int> rot_index;
  for (size_t i = 0; i < rotatable.size(); ++i) {
    const Bond& b = rotatable[i];
    RotatableBond rb;
    rb.a = b.a;
    rb.b = b.b;
    // a bridge endpoint strictly closer to the center exists on every bridge
    if (center_dist[static_cast<size_t>(b.a)] < center_dist[static_cast<size_t>(b.b)]) {
      rb.near = b.a;
      rb.far = b.b;
    } else {
      rb.near = b.b;
      rb.far = b.a;
    }
    tm.rotatable_bonds.push_back(rb);
    rot_index[std::minmax(b.a, b.b)] = static_cast<int>(i);
  }

  // Influence set per atom: rotatables on the canonical center->atom path.
  const auto paths = lex_shortest_paths(pruned, center);
  std::vector<std::vector<int>> influence(static_cast<size_t>(pruned.atom_count()) + 1);
  for (int v = 1; v <= pruned.atom_count(); ++v) {
    const auto& p = paths[static_cast<size_t>(v)];
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      const auto it = rot_index.find(std::minmax(p[i], p[i + 1]));
      if (it != rot_index.end()) influence[static_cast<size_t>(v)].push_back(it->second);
    }
  }

  // Fragments: classes of equal influence sequences, ordered by smallest atom.
  std::map<std::vector<int>, std::vector<int>> groups;
  for (int v = 1; v <= pruned.atom_count(); ++v)
    groups[influence[static_cast<size_t>(v)]].push_back(v);
  std::vector<std::pair<int, const std::vector<int>*>> ordered;
  for (const auto& [infl, atoms] : groups) ordered.emplace_back(atoms.front(), &infl);
  std::sort(ordered.begin(), ordered.end());

  tm.fragment_of.assign(static_cast<size_t>(pruned.atom_count()) + 1, -1);
  const auto adj = adjacency(pruned);
  for (const auto& [first_atom, infl] : ordered) {
    Fragment f;
    f.influence = *infl;
    f.atoms = groups[*infl];
    // median atom: min total hop distance within the induced subgraph
    std::set<int> members(f.atoms.begin(), f.atoms.end());
    long best_sum = -1;
    for (int v : f.atoms) {
      std::vector<int> d(static_cast<size_t>(pruned.atom_count()) + 1, -1);
      d[static_cast<size_t>(v)] = 0;
      std::deque<int> queue{v};
      long sum = 0;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int w : adj[static_cast<size_t>(u)]) {
          if (!members.count(w) || d[static_cast<size_t>(w)] >= 0) continue;
          d[static_cast<size_t>(w)] = d[static_cast<size_t>(u)] + 1;
          sum += d[static_cast<size_t>(w)];
          queue.push_back(w);
        }
      }
      if (best_sum < 0 || sum < best_sum) {
        best_sum = sum;
        f.representative = v;
      }
    }
    const int frag_idx = tm.fragment_count();
    for (int v : f.atoms) tm.fragment_of[static_cast<size_t>(v)] = frag_idx;
    tm.fragments.push_back(std::move(f));
  }

  for (int fa = 0; fa < tm.fragment_count(); ++fa) {
    for (int fb = fa + 1; fb < tm.fragment_count(); ++fb) {
      tm.pair_paths[{fa, fb}] = pair_eligibility(tm, fa, fb);
    }
  }
  return tm;
}

PairPath pair_eligibility(const TorsionModel& tm, int frag_a, int frag_b) {
  PairPath out;
  const auto& ia = tm.fragments[static_cast<size_t>(frag_a)].influence;
  const auto& ib = tm.fragments[static_cast<size_t>(frag_b)].influence;
  size_t common = 0;
  while (common < ia.size() && common < ib.size() && ia[common] == ib[common]) ++common;
  for (size_t i = ia.size(); i > common; --i)
    out.torsions.emplace_back(ia[i - 1], -1);
  for (size_t i = common; i < ib.size(); ++i)
    out.torsions.emplace_back(ib[i], +1);

  const int ra = tm.fragments[static_cast<size_t>(frag_a)].representative;
  const int rb = tm.fragments[static_cast<size_t>(frag_b)].representative;
  out.edges = bfs_distances(tm.molecule, ra)[static_cast<size_t>(rb)];

  if (out.torsions.empty()) {
    out.status = PairPath::Status::NoTorsionOnPath;
  } else if (out.edges < 3) {
    out.status = PairPath::Status::PathTooShort;
  } else {
    out.status = PairPath::Status::Eligible;
  }
  return out;
}

bool atom_pair_eligible(const TorsionModel& tm, int atom_a, int atom_b) {
  const auto dist = bfs_distances(tm.molecule, atom_a);
  if (dist[static_cast<size_t>(atom_b)] < 3) return false;
  const auto paths = lex_shortest_paths(tm.molecule, atom_a);
  const auto& p = paths[static_cast<size_t>(atom_b)];
  std::set<std::pair<int, int>> rot;
  for (const RotatableBond& rb : tm.rotatable_bonds) rot.insert(std::minmax(rb.a, rb.b));
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    if (rot.count(std::minmax(p[i], p[i + 1]))) return true;
  }
  return false;
}

std::string model_to_json(const TorsionModel& tm) {
  nlohmann::ordered_json j;
  j["name"] = tm.molecule.name;
  j["center_atom"] = tm.center_atom;
  auto& atoms = j["atoms"] = nlohmann::ordered_json::array();
  for (const Atom& a : tm.molecule.atoms) {
    atoms.push_back({{"id", a.id},
                     {"element", a.element},
                     {"name", a.name},
                     {"x", a.position[0]},
                     {"y", a.position[1]},
                     {"z", a.position[2]},
                     {"original_id", tm.original_ids[static_cast<size_t>(a.id - 1)]}});
  }
  auto& bonds = j["bonds"] = nlohmann::ordered_json::array();
  for (const Bond& b : tm.molecule.bonds) {
    bonds.push_back({{"a", b.a}, {"b", b.b}, {"kind", bond_kind_label(b.kind)}});
  }
  auto& rot = j["rotatable_bonds"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < tm.rotatable_bonds.size(); ++i) {
    const RotatableBond& rb = tm.rotatable_bonds[i];
    rot.push_back({{"index", i}, {"a", rb.a}, {"b", rb.b}, {"near", rb.near}});
  }
  auto& frags = j["fragments"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < tm.fragments.size(); ++i) {
    const Fragment& f = tm.fragments[i];
    frags.push_back({{"index", i},
                     {"atoms", f.atoms},
                     {"influence", f.influence},
                     {"representative", f.representative}});
  }
  return j.dump(2);
}

}  // namespace mufold
