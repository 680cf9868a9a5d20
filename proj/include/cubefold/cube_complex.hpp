#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cubefold/bitset.hpp"
#include "cubefold/pocset.hpp"

namespace cubefold {

// A vertex is an ultrafilter: one halfspace chosen per hyperplane, upward
// closed. Stored as the bitset of chosen halfspace ids.
struct Edge {
  std::uint32_t u, v;
  HyperplaneId label;
};

struct Cube {
  std::vector<std::uint32_t> vertices;    // sorted vertex indices, 2^k of them
  std::vector<HyperplaneId> hyperplanes;  // sorted, k crossing hyperplanes
};

// Dual cube complex of a finite pocset. Vertices are enumerated once in a
// deterministic order (lexicographic in interned ids); everything else is
// derived. Immutable after construction, queries are pure.
class CubeComplex {
 public:
  static constexpr std::size_t default_vertex_cap = std::size_t(1) << 20;

  static CubeComplex dual(PocsetPtr pocset, std::size_t vertex_cap = default_vertex_cap);

  const PocsetPtr& pocset_ptr() const { return pocset_; }
  const Pocset& pocset() const { return *pocset_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  const Bitset& vertex(std::uint32_t i) const { return vertices_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<std::uint32_t> find_vertex(const Bitset& chosen) const;
  std::uint32_t require_vertex(const Bitset& chosen) const;  // NotAVertex

  // Hyperplanes flippable at a vertex = hyperplanes whose chosen side is
  // minimal in the ultrafilter. These index the cubes through the vertex.
  const std::vector<HyperplaneId>& flippable(std::uint32_t v) const { return flippable_[v]; }

  std::size_t l1_distance(std::uint32_t u, std::uint32_t v) const;
  std::size_t l1_distance(const Bitset& u, const Bitset& v) const;

  std::uint32_t median(std::uint32_t u, std::uint32_t v, std::uint32_t w) const;
  std::uint32_t median(const Bitset& u, const Bitset& v, const Bitset& w) const {
    return median(require_vertex(u), require_vertex(v), require_vertex(w));
  }

  const std::vector<Cube>& maximal_cubes() const { return maximal_cubes_; }
  std::size_t dimension() const { return dimension_; }

  std::vector<std::string> vertex_names(std::uint32_t v) const;

  std::string to_dot() const;
  std::string to_json() const;

 private:
  PocsetPtr pocset_;
  std::vector<Bitset> vertices_;
  std::unordered_map<Bitset, std::uint32_t, BitsetHash> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<HyperplaneId>> flippable_;
  std::vector<Cube> maximal_cubes_;
  std::size_t dimension_ = 0;
};

inline CubeComplex dual_complex(PocsetPtr pocset,
                                std::size_t vertex_cap = CubeComplex::default_vertex_cap) {
  return CubeComplex::dual(std::move(pocset), vertex_cap);
}

}  // namespace cubefold
