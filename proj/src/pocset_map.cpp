#include "cubefold/pocset_map.hpp"

#include <algorithm>
#include <map>

#include "cubefold/quotient.hpp"
#include "parse_util.hpp"

namespace cubefold {

bool PocsetMap::injective() const {
  std::vector<bool> hit(codomain->halfspace_count(), false);
  for (HalfspaceId img : assign) {
    if (hit[img]) return false;
    hit[img] = true;
  }
  return true;
}

RawMap parse_map(std::string_view text) {
  using detail::parse_error;
  using detail::require_name;
  RawMap raw;
  for (const auto& lt : detail::tokenize_lines(text)) {
    const auto& t = lt.tokens;
    if (t[0] != "map") parse_error(lt.line, 1, "unknown directive '" + t[0] + "' in map file");
    if (t.size() != 4 || t[2] != "->") parse_error(lt.line, 1, "expected 'map NAME -> NAME'");
    require_name(t[1], lt.line, 2);
    require_name(t[3], lt.line, 4);
    raw.entries.push_back({t[1], t[3], lt.line});
  }
  return raw;
}

PocsetMap make_pocset_map(PocsetPtr domain, PocsetPtr codomain, const RawMap& raw) {
  const Pocset& dom = *domain;
  const Pocset& cod = *codomain;
  constexpr HalfspaceId unset = UINT32_MAX;
  std::vector<HalfspaceId> assign(dom.halfspace_count(), unset);

  auto set_image = [&](HalfspaceId from, HalfspaceId to, int line) {
    if (assign[from] != unset && assign[from] != to)
      fail_validation("InconsistentImage",
                      "halfspace '" + dom.name(from) + "' is given conflicting images '" +
                          cod.name(assign[from]) + "' and '" + cod.name(to) + "'" +
                          (line ? " (line " + std::to_string(line) + ")" : ""));
    assign[from] = to;
  };

  for (const auto& e : raw.entries) {
    HalfspaceId from = dom.id_of(e.from);
    HalfspaceId to = cod.id_of(e.to);
    set_image(from, to, e.line);
    set_image(dom.star(from), cod.star(to), e.line);  // star image is derived
  }
  for (HalfspaceId h = 0; h < dom.halfspace_count(); ++h)
    if (assign[h] == unset)
      fail_validation("IncompleteMap", "no image given for halfspace '" + dom.name(h) +
                                           "' or its complement");
  return {std::move(domain), std::move(codomain), std::move(assign)};
}

PocsetMap identity_map(PocsetPtr pocset) {
  std::vector<HalfspaceId> assign(pocset->halfspace_count());
  for (HalfspaceId h = 0; h < assign.size(); ++h) assign[h] = h;
  return {pocset, pocset, std::move(assign)};
}

PocsetMap compose(const PocsetMap& outer, const PocsetMap& inner) {
  std::vector<HalfspaceId> assign(inner.assign.size());
  for (std::size_t h = 0; h < assign.size(); ++h) assign[h] = outer.assign[inner.assign[h]];
  return {inner.domain, outer.codomain, std::move(assign)};
}

namespace {

// AM1-AM4 plus the embedding predicate; the resolution predicate is layered on
// top in classify_map to avoid recursing through quotients.
MapClassification classify_axioms(const PocsetMap& f) {
  const Pocset& dom = *f.domain;
  const Pocset& cod = *f.codomain;
  MapClassification c;

  for (HalfspaceId h = 0; h < dom.halfspace_count() && c.am1.pass; ++h)
    if (f.assign[dom.star(h)] != cod.star(f.assign[h]))
      c.am1 = {false, dom.name(h)};

  for (HyperplaneId a = 0; a < dom.hyperplane_count() && c.am2.pass; ++a)
    for (HyperplaneId b = a + 1; b < dom.hyperplane_count() && c.am2.pass; ++b) {
      if (!dom.transverse(a, b)) continue;
      HyperplaneId fa = f.image_hyperplane(a), fb = f.image_hyperplane(b);
      if (fa == fb || !cod.transverse(fa, fb))
        c.am2 = {false, dom.hyperplane_name(a) + ", " + dom.hyperplane_name(b)};
    }

  // AM3: facing halfspaces on hyperplanes with equal image, inseparable over
  // the fiber of that image, must have equal images.
  if (c.am1.pass) {
    for (HyperplaneId a = 0; a < dom.hyperplane_count() && c.am3.pass; ++a) {
      for (HyperplaneId b = a + 1; b < dom.hyperplane_count() && c.am3.pass; ++b) {
        if (f.image_hyperplane(a) != f.image_hyperplane(b)) continue;
        if (dom.classify_hyperplanes(a, b) != HyperplaneRel::disjoint) continue;
        std::vector<HyperplaneId> fiber;
        for (HyperplaneId l = 0; l < dom.hyperplane_count(); ++l)
          if (f.image_hyperplane(l) == f.image_hyperplane(a)) fiber.push_back(l);
        if (!dom.is_inseparable(fiber, a, b)) continue;
        // Disjoint hyperplanes admit exactly one facing orientation pair.
        HalfspaceId ca = dom.canonical_side(a), cb = dom.canonical_side(b);
        for (HalfspaceId ha : {ca, dom.star(ca)})
          for (HalfspaceId hb : {cb, dom.star(cb)})
            if (dom.classify_halfspaces(ha, hb) == Arrangement::facing &&
                f.assign[ha] != f.assign[hb])
              c.am3 = {false, dom.name(ha) + ", " + dom.name(hb)};
      }
    }
  }

  std::vector<bool> in_image(cod.hyperplane_count(), false);
  for (HyperplaneId a = 0; a < dom.hyperplane_count(); ++a) in_image[f.image_hyperplane(a)] = true;
  for (HyperplaneId b = 0; b < cod.hyperplane_count() && c.am4.pass; ++b) {
    if (in_image[b]) continue;
    HalfspaceId cb = cod.canonical_side(b);
    bool found = false;
    for (HalfspaceId s : {cb, cod.star(cb)}) {
      bool ok = true;
      for (HalfspaceId img : f.assign)
        if (!cod.compatible(s, img)) { ok = false; break; }
      if (ok) found = true;
    }
    if (!found) c.am4 = {false, cod.hyperplane_name(b)};
  }

  c.admissible = c.am1.pass && c.am2.pass && c.am3.pass && c.am4.pass;

  c.is_embedding = c.admissible;
  if (c.is_embedding && !f.injective()) {
    c.is_embedding = false;
    c.embedding_witness = "not injective";
  }
  if (c.is_embedding) {
    for (HalfspaceId h = 0; h < dom.halfspace_count() && c.is_embedding; ++h)
      for (HalfspaceId k = 0; k < dom.halfspace_count() && c.is_embedding; ++k)
        if (cod.le(f.assign[h], f.assign[k]) && !dom.le(h, k)) {
          c.is_embedding = false;
          c.embedding_witness = "order not reflected on (" + dom.name(h) + ", " + dom.name(k) + ")";
        }
  }
  return c;
}

}  // namespace

MapClassification classify_map(const PocsetMap& f) {
  MapClassification c = classify_axioms(f);
  c.is_resolution = false;
  if (!c.admissible) {
    c.resolution_witness = "not admissible";
    return c;
  }
  if (c.is_embedding) {
    // Trivial kernel, and the induced map is f itself.
    c.is_resolution = true;
    return c;
  }
  EquivalenceRelation kernel = kernel_relation(f);
  AdmissibilityReport kernel_report = check_admissible(kernel);
  if (!kernel_report.admissible) {
    c.resolution_witness = "kernel relation not admissible: " +
                           kernel_report.violations.front().describe(*f.domain);
    return c;
  }
  QuotientResult q = quotient_pocset(kernel);
  PocsetMap induced{q.quotient, f.codomain, {}};
  induced.assign.resize(q.quotient->halfspace_count());
  for (HalfspaceId h = 0; h < f.domain->halfspace_count(); ++h)
    induced.assign[q.projection.assign[h]] = f.assign[h];
  MapClassification ic = classify_axioms(induced);
  if (!ic.is_embedding) {
    c.resolution_witness = "induced map on the kernel quotient is not an embedding";
    if (!ic.embedding_witness.empty()) c.resolution_witness += " (" + ic.embedding_witness + ")";
    return c;
  }
  c.is_resolution = true;
  return c;
}

ImagePartition image_partition(const PocsetMap& f) {
  MapClassification c = classify_map(f);
  if (!c.admissible) fail_validation("NotAdmissible", "image_partition requires an admissible map");
  const Pocset& cod = *f.codomain;

  ImagePartition part;
  std::vector<bool> in_image(cod.hyperplane_count(), false);
  for (HyperplaneId a = 0; a < f.domain->hyperplane_count(); ++a)
    in_image[f.image_hyperplane(a)] = true;
  for (HyperplaneId b = 0; b < cod.hyperplane_count(); ++b)
    if (in_image[b]) part.image.push_back(b);

  for (HyperplaneId b = 0; b < cod.hyperplane_count(); ++b) {
    if (in_image[b]) continue;
    bool all_transverse = true;
    for (HyperplaneId a : part.image)
      if (!cod.transverse(a, b)) all_transverse = false;
    if (all_transverse) {
      part.transverse_rest.push_back(b);
      continue;
    }
    // AM4 gives the orientation containing or transverse to every image
    // hyperplane; a hyperplane outside H2 has exactly one.
    HalfspaceId cb = cod.canonical_side(b);
    HalfspaceId forced = UINT32_MAX;
    for (HalfspaceId s : {cb, cod.star(cb)}) {
      bool ok = true;
      for (HyperplaneId a : part.image)
        if (!cod.transverse(a, b) && !cod.hyperplane_in_halfspace(a, s)) ok = false;
      if (ok) {
        if (forced != UINT32_MAX)
          fail_lemma("AmbiguousOrientation",
                     "both orientations of '" + cod.hyperplane_name(b) + "' contain the image");
        forced = s;
      }
    }
    if (forced == UINT32_MAX)
      fail_lemma("WitnessNotFound",
                 "no orientation of '" + cod.hyperplane_name(b) + "' contains the image");
    part.forced_rest.emplace_back(b, forced);
  }
  return part;
}

ImagePocset image_pocset(const PocsetMap& f) {
  const Pocset& cod = *f.codomain;
  std::vector<bool> in_image(cod.halfspace_count(), false);
  for (HalfspaceId img : f.assign) in_image[img] = true;
  for (HalfspaceId h = 0; h < cod.halfspace_count(); ++h)
    if (in_image[h] && !in_image[cod.star(h)])
      fail_validation("NotAdmissible", "image is not closed under complementation");

  ImagePocset out;
  bool full = std::all_of(in_image.begin(), in_image.end(), [](bool b) { return b; });
  if (full) {
    out.pocset = f.codomain;
    out.onto = f;
    out.include = identity_map(f.codomain);
    return out;
  }

  RawPocset raw;
  for (HyperplaneId hp = 0; hp < cod.hyperplane_count(); ++hp) {
    HalfspaceId c = cod.canonical_side(hp);
    if (in_image[c]) raw.pairs.push_back({cod.name(c), cod.name(cod.star(c))});
  }
  for (HalfspaceId h = 0; h < cod.halfspace_count(); ++h)
    for (HalfspaceId k = 0; k < cod.halfspace_count(); ++k)
      if (in_image[h] && in_image[k] && cod.lt(h, k)) raw.order.push_back({cod.name(h), cod.name(k)});
  out.pocset = make_pocset(raw);

  out.onto.domain = f.domain;
  out.onto.codomain = out.pocset;
  out.onto.assign.resize(f.domain->halfspace_count());
  for (HalfspaceId h = 0; h < f.domain->halfspace_count(); ++h)
    out.onto.assign[h] = out.pocset->id_of(cod.name(f.assign[h]));

  out.include.domain = out.pocset;
  out.include.codomain = f.codomain;
  out.include.assign.resize(out.pocset->halfspace_count());
  for (HalfspaceId h = 0; h < out.pocset->halfspace_count(); ++h)
    out.include.assign[h] = cod.id_of(out.pocset->name(h));
  return out;
}

Bitset induced_vertex(const PocsetMap& f, const Pocset& image, const Bitset& domain_vertex) {
  const Pocset& dom = *f.domain;
  const Pocset& cod = *f.codomain;

  Bitset out(image.halfspace_count());
  for (HyperplaneId hp = 0; hp < image.hyperplane_count(); ++hp) {
    HyperplaneId cod_hp = cod.hyperplane_of(cod.id_of(image.name(image.canonical_side(hp))));
    std::vector<HalfspaceId> chosen;
    for (HyperplaneId a = 0; a < dom.hyperplane_count(); ++a) {
      if (f.image_hyperplane(a) != cod_hp) continue;
      HalfspaceId c = dom.canonical_side(a);
      chosen.push_back(domain_vertex.test(c) ? c : dom.star(c));
    }
    if (chosen.empty())
      fail_validation("NotResolution", "image hyperplane without preimage in induced_vertex");
    HalfspaceId image_side = UINT32_MAX;
    for (HalfspaceId s : chosen) {
      bool minimal = true;
      for (HalfspaceId t : chosen)
        if (t != s && dom.lt(t, s)) minimal = false;
      if (!minimal) continue;
      HalfspaceId img = f.assign[s];
      if (image_side != UINT32_MAX && image_side != img)
        fail_lemma("MinimalImageMismatch",
                   "minimal preimage orientations of '" + cod.hyperplane_name(cod_hp) +
                       "' disagree on their image");
      image_side = img;
    }
    out.set(image.id_of(cod.name(image_side)));
  }
  return out;
}

InducedVertexMap induced_complex_map(const PocsetMap& f, const CubeComplex& domain_complex,
                                     const CubeComplex& image_complex) {
  MapClassification c = classify_map(f);
  if (!c.is_resolution)
    fail_validation("NotResolution",
                    "induced_complex_map requires a resolution" +
                        (c.resolution_witness.empty() ? std::string()
                                                      : " (" + c.resolution_witness + ")"));
  InducedVertexMap out;
  out.vertex_map.resize(domain_complex.vertex_count());
  for (std::uint32_t v = 0; v < domain_complex.vertex_count(); ++v) {
    Bitset img = induced_vertex(f, image_complex.pocset(), domain_complex.vertex(v));
    auto idx = image_complex.find_vertex(img);
    if (!idx)
      fail_lemma("InducedVertexInvalid", "induced image of a vertex is not an ultrafilter");
    out.vertex_map[v] = *idx;
  }
  return out;
}

}  // namespace cubefold
