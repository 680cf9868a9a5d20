#pragma once

#include <string>
#include <vector>

#include "cubefold/pocset.hpp"

namespace cubefold {

// Permutation of halfspace ids, stored as its image table.
using Perm = std::vector<HalfspaceId>;

Perm identity_perm(std::size_t n);
Perm compose_perm(const Perm& outer, const Perm& inner);  // outer after inner
Perm inverse_perm(const Perm& p);
std::string perm_cycles(const Pocset& p, const Perm& g);  // "(a b)(A B)" diagnostics

struct RawAction {
  struct Gen {
    std::string name;
    std::vector<std::pair<std::string, std::string>> moves;
    int line = 0;
  };
  std::vector<Gen> generators;
};

RawAction parse_action(std::string_view text);

// Group acting on a pocset by automorphisms without inversion. The abstract
// group is identified with its image in the symmetric group on halfspaces;
// the full closure is computed eagerly and kept in a deterministic order
// (lexicographic on image tables, identity first).
class GroupAction {
 public:
  static GroupAction validate(PocsetPtr pocset, const RawAction& raw);
  static GroupAction trivial(PocsetPtr pocset);

  const PocsetPtr& pocset() const { return pocset_; }
  std::size_t generator_count() const { return gens_.size(); }
  const std::string& generator_name(std::size_t i) const { return gen_names_[i]; }
  const Perm& generator(std::size_t i) const { return gens_[i]; }
  int find_generator(const std::string& name) const;
  const std::vector<Perm>& closure() const { return closure_; }

  HalfspaceId apply(std::size_t closure_index, HalfspaceId h) const {
    return closure_[closure_index][h];
  }
  HyperplaneId apply_hyperplane(const Perm& g, HyperplaneId hp) const;

  struct OrbitPartition {
    std::vector<std::vector<HalfspaceId>> classes;  // sorted by smallest member
    std::vector<std::uint32_t> orbit_of;
  };
  OrbitPartition orbits() const;

  // Setwise (hence, without inversion, pointwise) stabilizer of a hyperplane.
  std::vector<Perm> stabilizer(HyperplaneId hp) const;

 private:
  PocsetPtr pocset_;
  std::vector<std::string> gen_names_;
  std::vector<Perm> gens_;
  std::vector<Perm> closure_;
};

// Closure of the permutation set generated by `gens` under composition
// (finite, so this is the generated subgroup). Sorted, identity first.
std::vector<Perm> permutation_closure(std::size_t n, const std::vector<Perm>& gens);

// f(g.h) == g.f(h) for all generators paired by name across the two actions.
// Throws UnpairedGenerator when the generator name sets differ.
bool check_equivariant(const GroupAction& dom, const GroupAction& cod,
                       const std::vector<HalfspaceId>& assign, std::string* witness = nullptr);

}  // namespace cubefold
