#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cubefold/bitset.hpp"
#include "cubefold/error.hpp"

namespace cubefold {

using HalfspaceId = std::uint32_t;
using HyperplaneId = std::uint32_t;

// Arrangement of two distinct halfspaces. "equal" and "complementary" cover the
// degenerate inputs so the classification is total.
enum class Arrangement { equal, complementary, nested, facing, transverse, incompatible };

enum class HyperplaneRel { equal, transverse, disjoint };

const char* to_string(Arrangement a);
const char* to_string(HyperplaneRel r);

// Unvalidated pocset description: complementary pairs plus order generators.
// Line numbers are kept for diagnostics (0 for programmatic input).
struct RawPocset {
  struct PairDecl { std::string a, b; int line = 0; };
  struct OrderDecl { std::string lo, hi; int line = 0; };
  std::vector<PairDecl> pairs;
  std::vector<OrderDecl> order;
};

// Finite pocset: halfspaces interned so that id order equals lexicographic name
// order, a fixed-point-free involution, and the strict order stored as a
// transitive-closure bitset per halfspace. Immutable after validation.
class Pocset {
 public:
  std::size_t halfspace_count() const { return names_.size(); }
  std::size_t hyperplane_count() const { return canonical_side_.size(); }

  bool has(std::string_view name) const { return index_.count(std::string(name)) != 0; }
  HalfspaceId id_of(const std::string& name) const;
  const std::string& name(HalfspaceId h) const { return names_[h]; }

  HalfspaceId star(HalfspaceId h) const { return star_[h]; }
  HyperplaneId hyperplane_of(HalfspaceId h) const { return hyperplane_of_[h]; }
  HalfspaceId canonical_side(HyperplaneId hp) const { return canonical_side_[hp]; }
  const std::string& hyperplane_name(HyperplaneId hp) const { return names_[canonical_side_[hp]]; }
  HyperplaneId hyperplane_by_name(const std::string& halfspace_name) const;

  bool lt(HalfspaceId h, HalfspaceId k) const { return above_[h].test(k); }
  bool le(HalfspaceId h, HalfspaceId k) const { return h == k || lt(h, k); }
  const Bitset& above(HalfspaceId h) const { return above_[h]; }
  const Bitset& below(HalfspaceId h) const { return below_[h]; }

  Arrangement classify_halfspaces(HalfspaceId h, HalfspaceId k) const;
  HyperplaneRel classify_hyperplanes(HyperplaneId a, HyperplaneId b) const;
  bool transverse(HyperplaneId a, HyperplaneId b) const {
    return classify_hyperplanes(a, b) == HyperplaneRel::transverse;
  }
  // h and k have nonempty intersection: not complementary, not nested under
  // each other's complement.
  bool compatible(HalfspaceId h, HalfspaceId k) const {
    return k != star_[h] && !lt(h, star_[k]);
  }

  // True when the hyperplane separating pair l sits strictly between a and b
  // for some orientations (a' < l' < b').
  bool separates(HyperplaneId l, HyperplaneId a, HyperplaneId b) const;
  std::vector<HyperplaneId> separators(HyperplaneId a, HyperplaneId b) const;
  bool is_inseparable(const std::vector<HyperplaneId>& set, HyperplaneId a, HyperplaneId b) const;
  bool is_facing_collection(const std::vector<HyperplaneId>& set) const;

  // Wall of hp lies inside halfspace h.
  bool hyperplane_in_halfspace(HyperplaneId hp, HalfspaceId h) const {
    HalfspaceId c = canonical_side_[hp];
    return lt(c, h) || lt(star_[c], h);
  }

  std::vector<HalfspaceId> interval(HalfspaceId lo, HalfspaceId hi) const;

  // Deterministic re-export in the pocset file grammar (all closure pairs).
  std::string to_grammar() const;

  static Pocset validate(const RawPocset& raw);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, HalfspaceId> index_;
  std::vector<HalfspaceId> star_;
  std::vector<Bitset> above_;  // above_[h] = { k : h < k }
  std::vector<Bitset> below_;  // transpose of above_
  std::vector<HyperplaneId> hyperplane_of_;
  std::vector<HalfspaceId> canonical_side_;
};

using PocsetPtr = std::shared_ptr<const Pocset>;

RawPocset parse_pocset(std::string_view text);
Pocset validate_pocset(const RawPocset& raw);

inline PocsetPtr make_pocset(const RawPocset& raw) {
  return std::make_shared<const Pocset>(Pocset::validate(raw));
}
inline PocsetPtr parse_and_validate_pocset(std::string_view text) {
  return make_pocset(parse_pocset(text));
}

}  // namespace cubefold
