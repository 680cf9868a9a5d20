#include "cubefold/group_action.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "parse_util.hpp"

namespace cubefold {

Perm identity_perm(std::size_t n) {
  Perm p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<HalfspaceId>(i);
  return p;
}

Perm compose_perm(const Perm& outer, const Perm& inner) {
  Perm r(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
  return r;
}

Perm inverse_perm(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<HalfspaceId>(i);
  return r;
}

std::string perm_cycles(const Pocset& p, const Perm& g) {
  std::ostringstream os;
  std::vector<bool> seen(g.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (seen[i] || g[i] == i) continue;
    any = true;
    os << "(";
    std::size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      os << (first ? "" : " ") << p.name(static_cast<HalfspaceId>(j));
      first = false;
      j = g[j];
    }
    os << ")";
  }
  return any ? os.str() : "id";
}

RawAction parse_action(std::string_view text) {
  using detail::parse_error;
  using detail::require_name;
  RawAction raw;
  for (const auto& lt : detail::tokenize_lines(text)) {
    const auto& t = lt.tokens;
    if (t[0] != "gen") parse_error(lt.line, 1, "unknown directive '" + t[0] + "' in action file");
    if (t.size() < 3 || t[2] != ":") parse_error(lt.line, 1, "expected 'gen NAME : ...'");
    require_name(t[1], lt.line, 2);
    RawAction::Gen gen{t[1], {}, lt.line};
    std::size_t i = 3;
    bool expect_move = t.size() > 3;
    while (expect_move) {
      if (i + 2 >= t.size() || t[i + 1] != "->")
        parse_error(lt.line, static_cast<int>(i + 1), "expected 'NAME -> NAME'");
      require_name(t[i], lt.line, static_cast<int>(i + 1));
      require_name(t[i + 2], lt.line, static_cast<int>(i + 3));
      gen.moves.emplace_back(t[i], t[i + 2]);
      i += 3;
      if (i == t.size()) break;
      if (t[i] != ",") parse_error(lt.line, static_cast<int>(i + 1), "expected ','");
      ++i;
    }
    raw.generators.push_back(std::move(gen));
  }
  return raw;
}

std::vector<Perm> permutation_closure(std::size_t n, const std::vector<Perm>& gens) {
  std::set<Perm> seen;
  std::vector<Perm> queue;
  Perm id = identity_perm(n);
  seen.insert(id);
  queue.push_back(id);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Perm cur = queue[qi];
    for (const Perm& g : gens) {
      Perm next = compose_perm(g, cur);
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return std::vector<Perm>(seen.begin(), seen.end());  // sorted; identity is lex-minimal
}

GroupAction GroupAction::trivial(PocsetPtr pocset) {
  GroupAction act;
  act.pocset_ = std::move(pocset);
  act.closure_ = {identity_perm(act.pocset_->halfspace_count())};
  return act;
}

GroupAction GroupAction::validate(PocsetPtr pocset, const RawAction& raw) {
  const Pocset& p = *pocset;
  const std::size_t n = p.halfspace_count();
  GroupAction act;
  act.pocset_ = pocset;

  std::set<std::string> names;
  for (const auto& g : raw.generators) {
    if (!names.insert(g.name).second)
      fail_validation("DuplicateGenerator", "generator '" + g.name + "' declared twice");
    Perm perm = identity_perm(n);
    std::vector<bool> moved(n, false);
    for (const auto& [from, to] : g.moves) {
      HalfspaceId a = p.id_of(from), b = p.id_of(to);
      if (moved[a] && perm[a] != b)
        fail_validation("NotBijection",
                        "generator '" + g.name + "' maps '" + from + "' twice inconsistently");
      moved[a] = true;
      perm[a] = b;
    }
    std::vector<bool> hit(n, false);
    for (HalfspaceId h = 0; h < n; ++h) {
      if (hit[perm[h]])
        fail_validation("NotBijection", "generator '" + g.name + "' is not a bijection ('" +
                                            p.name(perm[h]) + "' hit twice)");
      hit[perm[h]] = true;
    }
    for (HalfspaceId h = 0; h < n; ++h) {
      if (perm[p.star(h)] != p.star(perm[h]))
        fail_validation("NotAutomorphism", "generator '" + g.name + "' does not commute with * at '" +
                                               p.name(h) + "'");
      for (HalfspaceId k = 0; k < n; ++k)
        if (p.lt(h, k) != p.lt(perm[h], perm[k]))
          fail_validation("NotAutomorphism", "generator '" + g.name + "' breaks the order on ('" +
                                                 p.name(h) + "', '" + p.name(k) + "')");
    }
    act.gen_names_.push_back(g.name);
    act.gens_.push_back(std::move(perm));
  }

  act.closure_ = permutation_closure(n, act.gens_);
  for (const Perm& g : act.closure_)
    for (HalfspaceId h = 0; h < n; ++h)
      if (g[h] == p.star(h))
        fail_validation("Inversion", "group element " + perm_cycles(p, g) +
                                         " sends '" + p.name(h) + "' to its complement");
  return act;
}

int GroupAction::find_generator(const std::string& name) const {
  for (std::size_t i = 0; i < gen_names_.size(); ++i)
    if (gen_names_[i] == name) return static_cast<int>(i);
  return -1;
}

HyperplaneId GroupAction::apply_hyperplane(const Perm& g, HyperplaneId hp) const {
  return pocset_->hyperplane_of(g[pocset_->canonical_side(hp)]);
}

GroupAction::OrbitPartition GroupAction::orbits() const {
  const std::size_t n = pocset_->halfspace_count();
  OrbitPartition part;
  part.orbit_of.assign(n, UINT32_MAX);
  for (HalfspaceId h = 0; h < n; ++h) {
    if (part.orbit_of[h] != UINT32_MAX) continue;
    std::uint32_t cls = static_cast<std::uint32_t>(part.classes.size());
    std::vector<HalfspaceId> members;
    std::vector<HalfspaceId> stack{h};
    part.orbit_of[h] = cls;
    while (!stack.empty()) {
      HalfspaceId cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      for (const Perm& g : gens_) {
        for (HalfspaceId next : {g[cur], inverse_perm(g)[cur]}) {
          if (part.orbit_of[next] == UINT32_MAX) {
            part.orbit_of[next] = cls;
            stack.push_back(next);
          }
        }
      }
    }
    std::sort(members.begin(), members.end());
    part.classes.push_back(std::move(members));
  }
  return part;
}

std::vector<Perm> GroupAction::stabilizer(HyperplaneId hp) const {
  if (hp >= pocset_->hyperplane_count())
    fail_validation("UnknownHyperplane", "stabilizer: hyperplane index out of range");
  std::vector<Perm> out;
  HalfspaceId c = pocset_->canonical_side(hp);
  for (const Perm& g : closure_)
    if (g[c] == c || g[c] == pocset_->star(c)) out.push_back(g);
  return out;
}

bool check_equivariant(const GroupAction& dom, const GroupAction& cod,
                       const std::vector<HalfspaceId>& assign, std::string* witness) {
  if (dom.generator_count() != cod.generator_count())
    fail_validation("UnpairedGenerator", "actions declare different numbers of generators");
  for (std::size_t i = 0; i < dom.generator_count(); ++i)
    if (cod.find_generator(dom.generator_name(i)) < 0)
      fail_validation("UnpairedGenerator",
                      "no codomain generator named '" + dom.generator_name(i) + "'");

  for (std::size_t i = 0; i < dom.generator_count(); ++i) {
    const Perm& gd = dom.generator(i);
    const Perm& gc = cod.generator(cod.find_generator(dom.generator_name(i)));
    for (HalfspaceId h = 0; h < dom.pocset()->halfspace_count(); ++h) {
      if (assign[gd[h]] != gc[assign[h]]) {
        if (witness)
          *witness = "generator '" + dom.generator_name(i) + "' at halfspace '" +
                     dom.pocset()->name(h) + "'";
        return false;
      }
    }
  }
  return true;
}

}  // namespace cubefold
