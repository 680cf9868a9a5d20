#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubefold/pocset.hpp"
#include "cubefold/pocset_map.hpp"

namespace cubefold {

// Partition of the halfspaces of a pocset. Classes are kept sorted and
// numbered by smallest member, so class names are deterministic.
class EquivalenceRelation {
 public:
  static EquivalenceRelation identity(PocsetPtr pocset);
  // Union of the given pairs, closed under transitivity and star-invariance.
  static EquivalenceRelation from_pairs(PocsetPtr pocset,
                                        const std::vector<std::pair<HalfspaceId, HalfspaceId>>& pairs);
  // Raw partition without closure (for exercising the axiom checks).
  static EquivalenceRelation from_class_ids(PocsetPtr pocset, std::vector<std::uint32_t> class_of);

  const PocsetPtr& pocset_ptr() const { return pocset_; }
  const Pocset& pocset() const { return *pocset_; }
  std::uint32_t class_of(HalfspaceId h) const { return class_of_[h]; }
  std::size_t class_count() const { return classes_.size(); }
  const std::vector<std::vector<HalfspaceId>>& classes() const { return classes_; }
  bool same(HalfspaceId h, HalfspaceId k) const { return class_of_[h] == class_of_[k]; }
  bool is_identity() const { return classes_.size() == pocset_->halfspace_count(); }

  std::string class_name(std::uint32_t cls) const;

  // Classes of the induced hyperplane relation (orientation-sharing, closed
  // transitively), each a sorted list of hyperplanes.
  std::vector<std::vector<HyperplaneId>> hyperplane_classes() const;
  const std::vector<HyperplaneId>& hyperplanes_of_class(std::uint32_t cls) const;

 private:
  void canonicalize(std::vector<std::uint32_t> raw_class_of);

  PocsetPtr pocset_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::vector<HalfspaceId>> classes_;
  std::vector<std::vector<HyperplaneId>> class_hyperplanes_;  // per halfspace class
};

enum class AerAxiom { aer1, aer2, aer3, aer4 };
const char* to_string(AerAxiom a);

struct AdmissibilityViolation {
  AerAxiom axiom;
  std::vector<HalfspaceId> witness;
  std::string describe(const Pocset& p) const;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<AdmissibilityViolation> violations;
};

AdmissibilityReport check_admissible(const EquivalenceRelation& rel);

struct QuotientResult {
  EquivalenceRelation relation;
  PocsetPtr quotient;
  PocsetMap projection;                        // relation.pocset -> quotient
  std::vector<std::string> class_names;        // per relation class
  std::vector<HalfspaceId> class_to_halfspace; // relation class -> quotient halfspace
};

QuotientResult quotient_pocset(const EquivalenceRelation& rel);  // NotAdmissible

// One of the three preimage shapes behind a transverse class pair.
struct TransversalityWitness {
  enum class Kind {
    transverse_representatives,
    second_separates_first,  // a hyperplane of class2 separates two hyperplanes of class1
    first_separates_second,
  } kind;
  std::vector<HalfspaceId> halfspaces;  // the representatives involved
  std::string describe(const Pocset& p) const;
};

TransversalityWitness quotient_transversality_witness(const EquivalenceRelation& rel,
                                                      std::uint32_t class1, std::uint32_t class2);

std::vector<std::uint32_t> interval_in_quotient(const EquivalenceRelation& rel, std::uint32_t lo,
                                                std::uint32_t hi);  // NotComparable

struct RawRelation {
  struct Entry { std::string a, b; int line = 0; };
  std::vector<Entry> entries;
};

RawRelation parse_relation(std::string_view text);
EquivalenceRelation make_relation(PocsetPtr pocset, const RawRelation& raw);

// Partition of the domain by equal image; star-invariance comes from AM1,
// which is checked (AM1Violated otherwise).
EquivalenceRelation kernel_relation(const PocsetMap& f);

}  // namespace cubefold
