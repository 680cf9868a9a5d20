#include "cubefold/cube_complex.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cubefold {

namespace {

// Depth-first enumeration of ultrafilters over hyperplanes in fixed order.
// Choosing a halfspace forces everything above it; a conflict prunes the
// branch. Every complete assignment is upward closed by construction.
class Enumerator {
 public:
  Enumerator(const Pocset& p, std::size_t cap) : p_(p), cap_(cap), side_(p.hyperplane_count(), -1) {}

  std::vector<Bitset> run() {
    recurse(0);
    return std::move(out_);
  }

 private:
  // Returns false on conflict; records assigned hyperplanes on the trail.
  bool choose(HalfspaceId s, std::vector<HyperplaneId>& trail) {
    std::vector<HalfspaceId> stack{s};
    while (!stack.empty()) {
      HalfspaceId cur = stack.back();
      stack.pop_back();
      HyperplaneId hp = p_.hyperplane_of(cur);
      int want = (cur == p_.canonical_side(hp)) ? 0 : 1;
      if (side_[hp] == want) continue;
      if (side_[hp] == 1 - want) return false;
      side_[hp] = want;
      trail.push_back(hp);
      p_.above(cur).for_each_set([&](std::size_t k) { stack.push_back(static_cast<HalfspaceId>(k)); });
    }
    return true;
  }

  void recurse(HyperplaneId next) {
    while (next < p_.hyperplane_count() && side_[next] != -1) ++next;
    if (next == p_.hyperplane_count()) {
      emit();
      return;
    }
    HalfspaceId c = p_.canonical_side(next);
    for (HalfspaceId s : {c, p_.star(c)}) {
      std::vector<HyperplaneId> trail;
      if (choose(s, trail)) recurse(next + 1);
      for (HyperplaneId hp : trail) side_[hp] = -1;
    }
  }

  void emit() {
    if (out_.size() >= cap_)
      fail(ErrorKind::resource, "ComplexTooLarge",
           "vertex count exceeds cap of " + std::to_string(cap_));
    Bitset chosen(p_.halfspace_count());
    for (HyperplaneId hp = 0; hp < p_.hyperplane_count(); ++hp) {
      HalfspaceId c = p_.canonical_side(hp);
      chosen.set(side_[hp] == 0 ? c : p_.star(c));
    }
    out_.push_back(std::move(chosen));
  }

  const Pocset& p_;
  std::size_t cap_;
  std::vector<int8_t> side_;
  std::vector<Bitset> out_;
};

// Maximal cliques of the transversality graph restricted to `cand`,
// classic Bron-Kerbosch without pivoting (candidate sets are small).
void max_cliques(const Pocset& p, std::vector<HyperplaneId>& r, std::vector<HyperplaneId> cand,
                 std::vector<HyperplaneId> excl, std::vector<std::vector<HyperplaneId>>& out) {
  if (cand.empty() && excl.empty()) {
    out.push_back(r);
    return;
  }
  while (!cand.empty()) {
    HyperplaneId v = cand.front();
    std::vector<HyperplaneId> cand2, excl2;
    for (HyperplaneId u : cand)
      if (u != v && p.transverse(u, v)) cand2.push_back(u);
    for (HyperplaneId u : excl)
      if (p.transverse(u, v)) excl2.push_back(u);
    r.push_back(v);
    max_cliques(p, r, cand2, excl2, out);
    r.pop_back();
    cand.erase(cand.begin());
    excl.push_back(v);
  }
}

}  // namespace

CubeComplex CubeComplex::dual(PocsetPtr pocset, std::size_t vertex_cap) {
  if (vertex_cap < 1) fail_validation("BadVertexCap", "vertex cap must be at least 1");
  CubeComplex x;
  x.pocset_ = std::move(pocset);
  const Pocset& p = *x.pocset_;

  x.vertices_ = Enumerator(p, vertex_cap).run();
  std::sort(x.vertices_.begin(), x.vertices_.end(),
            [](const Bitset& a, const Bitset& b) { return a.lex_less(b); });
  for (std::uint32_t i = 0; i < x.vertices_.size(); ++i) x.index_[x.vertices_[i]] = i;

  // A hyperplane is flippable at a vertex exactly when its chosen side is
  // minimal among the chosen halfspaces.
  x.flippable_.resize(x.vertices_.size());
  for (std::uint32_t vi = 0; vi < x.vertices_.size(); ++vi) {
    const Bitset& chosen = x.vertices_[vi];
    for (HyperplaneId hp = 0; hp < p.hyperplane_count(); ++hp) {
      HalfspaceId c = p.canonical_side(hp);
      HalfspaceId s = chosen.test(c) ? c : p.star(c);
      if (!p.below(s).intersects(chosen)) x.flippable_[vi].push_back(hp);
    }
  }
  for (std::uint32_t vi = 0; vi < x.vertices_.size(); ++vi) {
    for (HyperplaneId hp : x.flippable_[vi]) {
      Bitset flipped = x.vertices_[vi];
      HalfspaceId c = p.canonical_side(hp);
      HalfspaceId s = flipped.test(c) ? c : p.star(c);
      flipped.reset(s);
      flipped.set(p.star(s));
      auto it = x.index_.find(flipped);
      if (it == x.index_.end())
        fail_lemma("EdgeTargetMissing", "flip of a minimal halfspace is not a vertex");
      if (vi < it->second) x.edges_.push_back({vi, it->second, hp});
    }
  }
  std::sort(x.edges_.begin(), x.edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.label) < std::tie(b.u, b.v, b.label);
  });

  // Maximal cubes: per vertex, maximal transverse cliques among flippable
  // hyperplanes; dedup cubes by (hyperplane set, off-cube assignment).
  std::set<std::pair<std::vector<HyperplaneId>, std::vector<std::uint32_t>>> seen;
  if (x.vertices_.size() == 1) {
    x.maximal_cubes_.push_back({{0}, {}});
  } else {
    for (std::uint32_t vi = 0; vi < x.vertices_.size(); ++vi) {
      std::vector<std::vector<HyperplaneId>> cliques;
      std::vector<HyperplaneId> r;
      max_cliques(p, r, x.flippable_[vi], {}, cliques);
      for (auto& clique : cliques) {
        if (clique.empty()) continue;
        std::sort(clique.begin(), clique.end());
        // Materialize the 2^k corners.
        std::vector<std::uint32_t> corners;
        for (std::size_t mask = 0; mask < (std::size_t(1) << clique.size()); ++mask) {
          Bitset corner = x.vertices_[vi];
          for (std::size_t bit = 0; bit < clique.size(); ++bit) {
            HalfspaceId c = p.canonical_side(clique[bit]);
            HalfspaceId lo = c, hi = p.star(c);
            corner.reset(lo);
            corner.reset(hi);
            corner.set((mask >> bit) & 1 ? hi : lo);
          }
          auto it = x.index_.find(corner);
          if (it == x.index_.end()) fail_lemma("CubeCornerMissing", "cube corner is not a vertex");
          corners.push_back(it->second);
        }
        std::sort(corners.begin(), corners.end());
        seen.insert({clique, corners});
      }
    }
    for (const auto& [hyps, corners] : seen) x.maximal_cubes_.push_back({corners, hyps});
    std::sort(x.maximal_cubes_.begin(), x.maximal_cubes_.end(),
              [](const Cube& a, const Cube& b) { return a.vertices < b.vertices; });
  }
  for (const Cube& c : x.maximal_cubes_) x.dimension_ = std::max(x.dimension_, c.hyperplanes.size());
  return x;
}

std::optional<std::uint32_t> CubeComplex::find_vertex(const Bitset& chosen) const {
  auto it = index_.find(chosen);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t CubeComplex::require_vertex(const Bitset& chosen) const {
  auto v = find_vertex(chosen);
  if (!v) fail_validation("NotAVertex", "the given ultrafilter is not a vertex of this complex");
  return *v;
}

std::size_t CubeComplex::l1_distance(std::uint32_t u, std::uint32_t v) const {
  if (u >= vertices_.size() || v >= vertices_.size())
    fail_validation("NotAVertex", "vertex index out of range");
  return vertices_[u].count_xor(vertices_[v]) / 2;
}

std::size_t CubeComplex::l1_distance(const Bitset& u, const Bitset& v) const {
  return l1_distance(require_vertex(u), require_vertex(v));
}

std::uint32_t CubeComplex::median(std::uint32_t u, std::uint32_t v, std::uint32_t w) const {
  if (u >= vertices_.size() || v >= vertices_.size() || w >= vertices_.size())
    fail_validation("NotAVertex", "vertex index out of range");
  Bitset m = (vertices_[u] & vertices_[v]) | (vertices_[u] & vertices_[w]) |
             (vertices_[v] & vertices_[w]);
  auto it = index_.find(m);
  if (it == index_.end())
    fail_lemma("MedianNotVertex", "majority vote of a vertex triple is not a vertex");
  return it->second;
}

std::vector<std::string> CubeComplex::vertex_names(std::uint32_t v) const {
  std::vector<std::string> out;
  vertices_[v].for_each_set(
      [&](std::size_t h) { out.push_back(pocset_->name(static_cast<HalfspaceId>(h))); });
  std::sort(out.begin(), out.end());
  return out;
}

std::string CubeComplex::to_dot() const {
  std::ostringstream os;
  os << "graph dual {\n";
  for (std::uint32_t v = 0; v < vertices_.size(); ++v) {
    os << "  v" << v << " [label=\"";
    auto names = vertex_names(v);
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? " " : "") << names[i];
    os << "\"];\n";
  }
  for (const Edge& e : edges_)
    os << "  v" << e.u << " -- v" << e.v << " [label=\"" << pocset_->hyperplane_name(e.label)
       << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string CubeComplex::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension_;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (std::uint32_t v = 0; v < vertices_.size(); ++v) verts.push_back(vertex_names(v));
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const Edge& e : edges_)
    edges.push_back({e.u, e.v, pocset_->hyperplane_name(e.label)});
  auto& cubes = j["maximal_cubes"] = nlohmann::json::array();
  for (const Cube& c : maximal_cubes_) cubes.push_back(c.vertices);
  return j.dump(2) + "\n";
}

}  // namespace cubefold
