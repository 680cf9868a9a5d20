#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cubefold/cube_complex.hpp"
#include "cubefold/group_action.hpp"
#include "cubefold/pocset_map.hpp"
#include "cubefold/quotient.hpp"

namespace cubefold {

// The group acting on a resolution acts on both sides at once. Elements are
// kept as (domain permutation, target permutation) pairs generated by
// name-paired generators, so stabilizers computed on the target side can be
// applied on the domain side.
struct PairedPerm {
  Perm dom;
  Perm tgt;
  friend bool operator<(const PairedPerm& a, const PairedPerm& b) {
    return std::tie(a.dom, a.tgt) < std::tie(b.dom, b.tgt);
  }
  friend bool operator==(const PairedPerm& a, const PairedPerm& b) {
    return a.dom == b.dom && a.tgt == b.tgt;
  }
};

struct PairedGroup {
  std::vector<PairedPerm> elements;  // sorted, identity first
  static PairedGroup closure(const GroupAction& dom, const GroupAction& tgt);
};

struct ResolutionState {
  PocsetPtr pocset;
  GroupAction action;
  PocsetPtr target;
  GroupAction target_action;
  PocsetMap map;  // pocset -> target, a verified G-equivariant resolution
  PairedGroup group;
};

ResolutionState make_resolution_state(PocsetPtr pocset, GroupAction action, PocsetPtr target,
                                      GroupAction target_action, PocsetMap map);

// Elementary foldable pairs: facing halfspaces with equal image whose
// hyperplanes no fiber member separates, and with no identified pair of
// hyperplanes both separating them. Sorted lexicographically by names.
std::vector<std::pair<HalfspaceId, HalfspaceId>> find_foldable_pairs(const ResolutionState& st);

std::size_t identified_hyperplane_pairs(const ResolutionState& st);

struct StepChecks {
  std::vector<std::pair<std::string, bool>> named;
  bool all() const {
    for (const auto& [_, ok] : named) if (!ok) return false;
    return true;
  }
};

struct FoldStep {
  std::pair<std::string, std::string> pair_names;  // folded pair, pre-fold names
  QuotientResult quotient;                         // relation, quotient pocset, projection
  ResolutionState result;
  StepChecks checks;
  std::optional<std::size_t> complexity_after;
};

FoldStep elementary_fold(const ResolutionState& st, std::pair<HalfspaceId, HalfspaceId> pair,
                         bool verify = true,
                         std::size_t vertex_cap = CubeComplex::default_vertex_cap);

// Folds until the classes of h and k coincide, innermost pairs first.
std::vector<FoldStep> fold_to_target(const ResolutionState& st, HalfspaceId h, HalfspaceId k,
                                     bool verify = true,
                                     std::size_t vertex_cap = CubeComplex::default_vertex_cap);

struct ComplexityReport {
  std::size_t value = 0;
  struct Entry {
    std::string target_rep;    // chosen hyperplane representative in the target orbit
    std::string preimage_rep;  // chosen preimage hyperplane
    std::size_t missing;       // stabilizer elements not stabilizing the preimage
  };
  std::vector<Entry> entries;
};

ComplexityReport complexity(const ResolutionState& st);  // OrbitMapNotInjective

struct CubeWitness {
  std::size_t cube_index;
  Bitset domain_vertex;
  std::uint32_t image_vertex;
};

// For every maximal cube of the folded complex, builds the vertex of the
// recipe (folded classes oriented facing, everything else oriented toward a
// disjoint crossing hyperplane) and checks its image lies in the cube.
std::vector<CubeWitness> check_cobounded_preserved(const FoldStep& step, const CubeComplex& before,
                                                   const CubeComplex& after,
                                                   const InducedVertexMap& F);

struct FoldTrace {
  std::vector<FoldStep> steps;
  PocsetMap final_map;
  bool final_is_embedding = false;
  std::optional<std::size_t> initial_complexity;
  std::vector<std::optional<std::size_t>> complexity_history;  // per step
  std::size_t initial_identified_pairs = 0;
};

FoldTrace folding_sequence(const ResolutionState& st, bool verify = true,
                           std::size_t vertex_cap = CubeComplex::default_vertex_cap);

}  // namespace cubefold
