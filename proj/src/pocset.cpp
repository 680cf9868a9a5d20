#include "cubefold/pocset.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "parse_util.hpp"

namespace cubefold {

const char* to_string(Arrangement a) {
  switch (a) {
    case Arrangement::equal: return "equal";
    case Arrangement::complementary: return "complementary";
    case Arrangement::nested: return "nested";
    case Arrangement::facing: return "facing";
    case Arrangement::transverse: return "transverse";
    case Arrangement::incompatible: return "incompatible";
  }
  return "?";
}

const char* to_string(HyperplaneRel r) {
  switch (r) {
    case HyperplaneRel::equal: return "equal";
    case HyperplaneRel::transverse: return "transverse";
    case HyperplaneRel::disjoint: return "disjoint";
  }
  return "?";
}

HalfspaceId Pocset::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail_validation("UnknownHalfspace", "no halfspace named '" + name + "'");
  return it->second;
}

HyperplaneId Pocset::hyperplane_by_name(const std::string& halfspace_name) const {
  return hyperplane_of_[id_of(halfspace_name)];
}

Arrangement Pocset::classify_halfspaces(HalfspaceId h, HalfspaceId k) const {
  if (h == k) return Arrangement::equal;
  if (k == star_[h]) return Arrangement::complementary;
  if (lt(h, k) || lt(k, h)) return Arrangement::nested;
  if (lt(star_[k], h)) return Arrangement::facing;
  if (lt(k, star_[h])) return Arrangement::incompatible;
  return Arrangement::transverse;
}

HyperplaneRel Pocset::classify_hyperplanes(HyperplaneId a, HyperplaneId b) const {
  if (a >= canonical_side_.size() || b >= canonical_side_.size())
    fail_validation("UnknownHyperplane", "hyperplane index out of range");
  if (a == b) return HyperplaneRel::equal;
  HalfspaceId h = canonical_side_[a], k = canonical_side_[b];
  return classify_halfspaces(h, k) == Arrangement::transverse ? HyperplaneRel::transverse
                                                              : HyperplaneRel::disjoint;
}

bool Pocset::separates(HyperplaneId l, HyperplaneId a, HyperplaneId b) const {
  if (l == a || l == b) return false;
  HalfspaceId la = canonical_side_[a], lb = canonical_side_[b], ll = canonical_side_[l];
  for (HalfspaceId ha : {la, star_[la]})
    for (HalfspaceId hl : {ll, star_[ll]})
      for (HalfspaceId hb : {lb, star_[lb]})
        if (lt(ha, hl) && lt(hl, hb)) return true;
  return false;
}

std::vector<HyperplaneId> Pocset::separators(HyperplaneId a, HyperplaneId b) const {
  if (a == b) fail_validation("EqualHyperplanes", "separators requires distinct hyperplanes");
  std::vector<HyperplaneId> out;
  for (HyperplaneId l = 0; l < hyperplane_count(); ++l)
    if (separates(l, a, b)) out.push_back(l);
  return out;
}

bool Pocset::is_inseparable(const std::vector<HyperplaneId>& set, HyperplaneId a,
                            HyperplaneId b) const {
  if (a == b) fail_validation("EqualHyperplanes", "is_inseparable requires distinct hyperplanes");
  for (HyperplaneId l : set)
    if (separates(l, a, b)) return false;
  return true;
}

bool Pocset::is_facing_collection(const std::vector<HyperplaneId>& set) const {
  if (set.size() <= 1) return true;

  // Pairwise form: disjoint and not separated by any member of the collection.
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (classify_hyperplanes(set[i], set[j]) != HyperplaneRel::disjoint) return false;
      if (!is_inseparable(set, set[i], set[j])) return false;
    }

  // Simultaneous-orientation form. Once the first hyperplane is oriented, every
  // other orientation is forced by the facing requirement against it.
  for (HalfspaceId first : {canonical_side_[set[0]], star_[canonical_side_[set[0]]]}) {
    std::vector<HalfspaceId> chosen;
    chosen.reserve(set.size());
    chosen.push_back(first);
    bool ok = true;
    for (std::size_t j = 1; j < set.size() && ok; ++j) {
      HalfspaceId c = canonical_side_[set[j]];
      if (classify_halfspaces(first, c) == Arrangement::facing) chosen.push_back(c);
      else if (classify_halfspaces(first, star_[c]) == Arrangement::facing) chosen.push_back(star_[c]);
      else ok = false;
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < chosen.size() && ok; ++i)
      for (std::size_t j = i + 1; j < chosen.size() && ok; ++j)
        if (classify_halfspaces(chosen[i], chosen[j]) != Arrangement::facing) ok = false;
    if (ok) return true;
  }
  return false;
}

std::vector<HalfspaceId> Pocset::interval(HalfspaceId lo, HalfspaceId hi) const {
  if (!le(lo, hi))
    fail_validation("NotComparable",
                    "interval requires " + names_[lo] + " <= " + names_[hi]);
  std::vector<HalfspaceId> out;
  for (HalfspaceId k = 0; k < halfspace_count(); ++k)
    if (le(lo, k) && le(k, hi)) out.push_back(k);
  return out;
}

std::string Pocset::to_grammar() const {
  std::ostringstream os;
  for (HyperplaneId hp = 0; hp < hyperplane_count(); ++hp) {
    HalfspaceId c = canonical_side_[hp];
    os << "pair " << names_[c] << " " << names_[star_[c]] << "\n";
  }
  for (HalfspaceId h = 0; h < halfspace_count(); ++h)
    for (HalfspaceId k = 0; k < halfspace_count(); ++k)
      if (lt(h, k)) os << "le " << names_[h] << " " << names_[k] << "\n";
  return os.str();
}

namespace {

std::string at_line(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : "";
}

}  // namespace

Pocset Pocset::validate(const RawPocset& raw) {
  // Resolve the complementary pairing first; duplicate identical declarations
  // are idempotent, conflicting ones are an error.
  std::map<std::string, std::string> partner;
  for (const auto& p : raw.pairs) {
    if (p.a == p.b)
      fail_validation("StarFixedPoint", "halfspace '" + p.a + "' paired with itself" + at_line(p.line));
    for (const auto& [x, y] : {std::pair{p.a, p.b}, std::pair{p.b, p.a}}) {
      auto it = partner.find(x);
      if (it != partner.end() && it->second != y)
        fail_validation("DuplicatePair", "halfspace '" + x + "' already paired with '" +
                                             it->second + "', cannot pair with '" + y + "'" +
                                             at_line(p.line));
      partner[x] = y;
    }
  }

  Pocset p;
  for (const auto& [name, _] : partner) p.names_.push_back(name);  // map iteration is sorted
  for (HalfspaceId i = 0; i < p.names_.size(); ++i) p.index_[p.names_[i]] = i;
  p.star_.resize(p.names_.size());
  for (HalfspaceId i = 0; i < p.names_.size(); ++i) p.star_[i] = p.index_.at(partner.at(p.names_[i]));

  const std::size_t n = p.names_.size();
  p.above_.assign(n, Bitset(n));
  for (const auto& o : raw.order) {
    auto ia = p.index_.find(o.lo);
    auto ib = p.index_.find(o.hi);
    if (ia == p.index_.end())
      fail_validation("UnknownHalfspace", "order uses undeclared halfspace '" + o.lo + "'" + at_line(o.line));
    if (ib == p.index_.end())
      fail_validation("UnknownHalfspace", "order uses undeclared halfspace '" + o.hi + "'" + at_line(o.line));
    HalfspaceId a = ia->second, b = ib->second;
    if (a == b) continue;  // h <= h is trivially true
    if (b == p.star_[a])
      fail_validation("ComparableWithComplement",
                      "'" + o.lo + " <= " + o.hi + "' relates complementary halfspaces" + at_line(o.line));
    p.above_[a].set(b);
    p.above_[p.star_[b]].set(p.star_[a]);  // order-reversing dual
  }

  // Transitive closure (Warshall over bitset rows).
  for (HalfspaceId k = 0; k < n; ++k)
    for (HalfspaceId i = 0; i < n; ++i)
      if (p.above_[i].test(k)) p.above_[i] |= p.above_[k];

  for (HalfspaceId h = 0; h < n; ++h) {
    if (p.above_[h].test(h))
      fail_validation("OrderCycle", "order closure makes '" + p.names_[h] + "' comparable with itself");
    if (p.above_[h].test(p.star_[h]) || p.above_[p.star_[h]].test(h)) {
      int line = 0;
      for (const auto& o : raw.order)
        if (o.lo == p.names_[h] || o.hi == p.names_[h] || o.lo == p.names_[p.star_[h]] ||
            o.hi == p.names_[p.star_[h]]) { line = o.line; break; }
      fail_validation("ComparableWithComplement",
                      "closure makes '" + p.names_[h] + "' comparable with its complement" + at_line(line));
    }
  }
  // Local finiteness and DCC hold for any finite carrier; nothing to compute.

  p.below_.assign(n, Bitset(n));
  for (HalfspaceId h = 0; h < n; ++h)
    p.above_[h].for_each_set([&](std::size_t k) { p.below_[k].set(h); });

  p.hyperplane_of_.assign(n, 0);
  for (HalfspaceId h = 0; h < n; ++h) {
    if (h < p.star_[h]) {
      p.hyperplane_of_[h] = static_cast<HyperplaneId>(p.canonical_side_.size());
      p.canonical_side_.push_back(h);
    }
  }
  for (HalfspaceId h = 0; h < n; ++h)
    if (h > p.star_[h]) p.hyperplane_of_[h] = p.hyperplane_of_[p.star_[h]];

  return p;
}

Pocset validate_pocset(const RawPocset& raw) { return Pocset::validate(raw); }

RawPocset parse_pocset(std::string_view text) {
  using detail::parse_error;
  using detail::require_name;
  RawPocset raw;
  for (const auto& lt : detail::tokenize_lines(text)) {
    const auto& t = lt.tokens;
    if (t[0] == "pair") {
      if (t.size() != 3) parse_error(lt.line, 1, "expected 'pair NAME NAME'");
      require_name(t[1], lt.line, 2);
      require_name(t[2], lt.line, 3);
      raw.pairs.push_back({t[1], t[2], lt.line});
    } else if (t[0] == "le") {
      if (t.size() != 3) parse_error(lt.line, 1, "expected 'le NAME NAME'");
      require_name(t[1], lt.line, 2);
      require_name(t[2], lt.line, 3);
      raw.order.push_back({t[1], t[2], lt.line});
    } else {
      parse_error(lt.line, 1, "unknown directive '" + t[0] + "' in pocset file");
    }
  }
  return raw;
}

}  // namespace cubefold
