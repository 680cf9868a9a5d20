#pragma once

#include <string>
#include <vector>

#include "cubefold/cube_complex.hpp"
#include "cubefold/pocset.hpp"

namespace cubefold {

// Total assignment of codomain halfspaces to domain halfspaces. Construction
// from files derives the star-images; nothing about admissibility is assumed
// until classify_map is run.
struct PocsetMap {
  PocsetPtr domain;
  PocsetPtr codomain;
  std::vector<HalfspaceId> assign;

  HalfspaceId operator()(HalfspaceId h) const { return assign[h]; }
  HyperplaneId image_hyperplane(HyperplaneId hp) const {
    return codomain->hyperplane_of(assign[domain->canonical_side(hp)]);
  }
  bool injective() const;
};

struct RawMap {
  struct Entry { std::string from, to; int line = 0; };
  std::vector<Entry> entries;
};

RawMap parse_map(std::string_view text);
PocsetMap make_pocset_map(PocsetPtr domain, PocsetPtr codomain, const RawMap& raw);
PocsetMap identity_map(PocsetPtr pocset);
PocsetMap compose(const PocsetMap& outer, const PocsetMap& inner);

struct AxiomCheck {
  bool pass = true;
  std::string witness;
};

struct MapClassification {
  AxiomCheck am1, am2, am3, am4;
  bool admissible = false;
  bool is_embedding = false;
  std::string embedding_witness;
  bool is_resolution = false;
  std::string resolution_witness;
};

MapClassification classify_map(const PocsetMap& f);

// Partition of the codomain hyperplanes relative to the image: the image
// itself, the hyperplanes transverse to all of it, and the remainder, each of
// which has a unique orientation containing-or-transverse-to every image
// hyperplane.
struct ImagePartition {
  std::vector<HyperplaneId> image;                                // H1
  std::vector<HyperplaneId> transverse_rest;                      // H2
  std::vector<std::pair<HyperplaneId, HalfspaceId>> forced_rest;  // H3 with forced orientation
};

ImagePartition image_partition(const PocsetMap& f);  // NotAdmissible

// Restriction of the codomain to the image halfspaces (names preserved),
// together with the factored map onto it and the inclusion back.
struct ImagePocset {
  PocsetPtr pocset;
  PocsetMap onto;     // f.domain -> image
  PocsetMap include;  // image -> f.codomain
};

ImagePocset image_pocset(const PocsetMap& f);

// The induced vertex rule of a resolution: orient each image hyperplane by the
// image of a minimal chosen preimage orientation. Distinct minimal preimages
// are checked to agree at runtime.
Bitset induced_vertex(const PocsetMap& f, const Pocset& image, const Bitset& domain_vertex);

struct InducedVertexMap {
  std::vector<std::uint32_t> vertex_map;  // domain vertex index -> image vertex index
};

InducedVertexMap induced_complex_map(const PocsetMap& f, const CubeComplex& domain_complex,
                                     const CubeComplex& image_complex);  // NotResolution

}  // namespace cubefold
