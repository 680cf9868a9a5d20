#include "cubefold/quotient.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "parse_util.hpp"

namespace cubefold {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

void EquivalenceRelation::canonicalize(std::vector<std::uint32_t> raw_class_of) {
  const std::size_t n = pocset_->halfspace_count();
  std::map<std::uint32_t, std::uint32_t> renumber;
  class_of_.assign(n, 0);
  classes_.clear();
  for (HalfspaceId h = 0; h < n; ++h) {
    auto [it, inserted] = renumber.try_emplace(raw_class_of[h], static_cast<std::uint32_t>(classes_.size()));
    if (inserted) classes_.emplace_back();
    class_of_[h] = it->second;
    classes_[it->second].push_back(h);
  }
  class_hyperplanes_.assign(classes_.size(), {});
  for (std::uint32_t c = 0; c < classes_.size(); ++c) {
    std::vector<HyperplaneId> hyps;
    for (HalfspaceId h : classes_[c]) hyps.push_back(pocset_->hyperplane_of(h));
    std::sort(hyps.begin(), hyps.end());
    hyps.erase(std::unique(hyps.begin(), hyps.end()), hyps.end());
    class_hyperplanes_[c] = std::move(hyps);
  }
}

EquivalenceRelation EquivalenceRelation::identity(PocsetPtr pocset) {
  return from_pairs(std::move(pocset), {});
}

EquivalenceRelation EquivalenceRelation::from_pairs(
    PocsetPtr pocset, const std::vector<std::pair<HalfspaceId, HalfspaceId>>& pairs) {
  const std::size_t n = pocset->halfspace_count();
  UnionFind uf(n);
  std::vector<std::pair<HalfspaceId, HalfspaceId>> work(pairs);
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    if (uf.unite(a, b)) work.emplace_back(pocset->star(a), pocset->star(b));
  }
  std::vector<std::uint32_t> cls(n);
  for (HalfspaceId h = 0; h < n; ++h) cls[h] = uf.find(h);
  EquivalenceRelation rel;
  rel.pocset_ = std::move(pocset);
  rel.canonicalize(std::move(cls));
  return rel;
}

EquivalenceRelation EquivalenceRelation::from_class_ids(PocsetPtr pocset,
                                                        std::vector<std::uint32_t> class_of) {
  EquivalenceRelation rel;
  rel.pocset_ = std::move(pocset);
  rel.canonicalize(std::move(class_of));
  return rel;
}

std::string EquivalenceRelation::class_name(std::uint32_t cls) const {
  std::string out = "q" + std::to_string(cls);
  for (HalfspaceId h : classes_[cls]) out += "_" + pocset_->name(h);
  return out;
}

const std::vector<HyperplaneId>& EquivalenceRelation::hyperplanes_of_class(std::uint32_t cls) const {
  return class_hyperplanes_[cls];
}

std::vector<std::vector<HyperplaneId>> EquivalenceRelation::hyperplane_classes() const {
  // Hyperplanes related when some orientations share a halfspace class; closed
  // transitively so the grouping is an equivalence even on raw partitions.
  const Pocset& p = *pocset_;
  UnionFind uf(p.hyperplane_count());
  for (const auto& cls : classes_)
    for (std::size_t i = 1; i < cls.size(); ++i)
      uf.unite(p.hyperplane_of(cls[0]), p.hyperplane_of(cls[i]));
  std::map<std::uint32_t, std::vector<HyperplaneId>> groups;
  for (HyperplaneId hp = 0; hp < p.hyperplane_count(); ++hp) groups[uf.find(hp)].push_back(hp);
  std::vector<std::vector<HyperplaneId>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

const char* to_string(AerAxiom a) {
  switch (a) {
    case AerAxiom::aer1: return "AER1";
    case AerAxiom::aer2: return "AER2";
    case AerAxiom::aer3: return "AER3";
    case AerAxiom::aer4: return "AER4";
  }
  return "?";
}

std::string AdmissibilityViolation::describe(const Pocset& p) const {
  std::string out = to_string(axiom);
  out += " violated by (";
  for (std::size_t i = 0; i < witness.size(); ++i) out += (i ? ", " : "") + p.name(witness[i]);
  out += ")";
  return out;
}

AdmissibilityReport check_admissible(const EquivalenceRelation& rel) {
  const Pocset& p = rel.pocset();
  AdmissibilityReport report;
  auto violate = [&](AerAxiom ax, std::vector<HalfspaceId> w) {
    report.admissible = false;
    report.violations.push_back({ax, std::move(w)});
  };

  // AER1: h is never related to its complement.
  for (HalfspaceId h = 0; h < p.halfspace_count(); ++h)
    if (h < p.star(h) && rel.same(h, p.star(h))) violate(AerAxiom::aer1, {h, p.star(h)});

  // AER2: the relation commutes with star.
  for (const auto& cls : rel.classes())
    for (std::size_t i = 1; i < cls.size(); ++i)
      if (!rel.same(p.star(cls[0]), p.star(cls[i]))) violate(AerAxiom::aer2, {cls[0], cls[i]});

  // AER3: transverse halfspaces are never related.
  for (const auto& cls : rel.classes())
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j)
        if (p.classify_halfspaces(cls[i], cls[j]) == Arrangement::transverse)
          violate(AerAxiom::aer3, {cls[i], cls[j]});

  // AER4: distinct related hyperplanes that no member of their class separates
  // must have facing related orientations.
  for (const auto& hyp_cls : rel.hyperplane_classes()) {
    for (std::size_t i = 0; i < hyp_cls.size(); ++i) {
      for (std::size_t j = i + 1; j < hyp_cls.size(); ++j) {
        HyperplaneId a = hyp_cls[i], b = hyp_cls[j];
        if (!p.is_inseparable(hyp_cls, a, b)) continue;
        HalfspaceId ca = p.canonical_side(a), cb = p.canonical_side(b);
        bool ok = false;
        for (HalfspaceId ha : {ca, p.star(ca)})
          for (HalfspaceId hb : {cb, p.star(cb)})
            if (rel.same(ha, hb) && p.classify_halfspaces(ha, hb) == Arrangement::facing) ok = true;
        if (!ok) violate(AerAxiom::aer4, {ca, cb});
      }
    }
  }
  return report;
}

namespace {

// The quotient order, straight from its two-clause definition: [h] < [k] iff
// every representative pair has disjoint hyperplanes, and every pair whose
// hyperplanes no class member separates satisfies h < k.
bool quotient_less(const EquivalenceRelation& rel, std::uint32_t c1, std::uint32_t c2) {
  if (c1 == c2) return false;
  const Pocset& p = rel.pocset();
  std::vector<HyperplaneId> union_hyps = rel.hyperplanes_of_class(c1);
  for (HyperplaneId hp : rel.hyperplanes_of_class(c2)) union_hyps.push_back(hp);

  for (HalfspaceId h : rel.classes()[c1]) {
    for (HalfspaceId k : rel.classes()[c2]) {
      HyperplaneId a = p.hyperplane_of(h), b = p.hyperplane_of(k);
      if (a == b || p.transverse(a, b)) return false;
      if (p.is_inseparable(union_hyps, a, b) && !p.lt(h, k)) return false;
    }
  }
  return true;
}

}  // namespace

QuotientResult quotient_pocset(const EquivalenceRelation& rel) {
  AdmissibilityReport report = check_admissible(rel);
  if (!report.admissible) {
    std::string msg = "relation is not admissible:";
    for (const auto& v : report.violations) msg += " " + v.describe(rel.pocset());
    fail_validation("NotAdmissible", msg);
  }

  const Pocset& p = rel.pocset();
  const std::size_t nc = rel.class_count();

  RawPocset raw;
  std::vector<std::string> names(nc);
  for (std::uint32_t c = 0; c < nc; ++c) names[c] = rel.class_name(c);
  for (std::uint32_t c = 0; c < nc; ++c) {
    std::uint32_t sc = rel.class_of(p.star(rel.classes()[c][0]));
    if (c < sc) raw.pairs.push_back({names[c], names[sc]});
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> less_pairs;
  for (std::uint32_t c1 = 0; c1 < nc; ++c1)
    for (std::uint32_t c2 = 0; c2 < nc; ++c2)
      if (quotient_less(rel, c1, c2)) {
        raw.order.push_back({names[c1], names[c2]});
        less_pairs.emplace_back(c1, c2);
      }

  // Verified, not assumed: the computed class order must already be a pocset
  // order and the closure must not add pairs.
  PocsetPtr quotient;
  try {
    quotient = make_pocset(raw);
  } catch (const Error& e) {
    fail_lemma("QuotientNotPocset",
               "quotient of an admissible relation failed pocset validation: " + std::string(e.what()));
  }
  QuotientResult result{rel, quotient, {}, names, {}};
  result.class_to_halfspace.resize(nc);
  for (std::uint32_t c = 0; c < nc; ++c) result.class_to_halfspace[c] = quotient->id_of(names[c]);
  for (std::uint32_t c = 0; c < nc; ++c) {
    std::uint32_t sc = rel.class_of(p.star(rel.classes()[c][0]));
    if (quotient->star(result.class_to_halfspace[c]) != result.class_to_halfspace[sc])
      fail_lemma("QuotientNotPocset", "star does not descend to the quotient classes");
  }
  std::size_t order_size = 0;
  for (HalfspaceId h = 0; h < quotient->halfspace_count(); ++h)
    order_size += quotient->above(h).count();
  if (order_size != less_pairs.size())
    fail_lemma("QuotientNotPocset", "quotient class order is not transitively closed");

  result.projection.domain = rel.pocset_ptr();
  result.projection.codomain = quotient;
  result.projection.assign.resize(p.halfspace_count());
  for (HalfspaceId h = 0; h < p.halfspace_count(); ++h)
    result.projection.assign[h] = result.class_to_halfspace[rel.class_of(h)];
  return result;
}

std::string TransversalityWitness::describe(const Pocset& p) const {
  std::ostringstream os;
  switch (kind) {
    case Kind::transverse_representatives:
      os << "transverse representatives " << p.name(halfspaces[0]) << ", " << p.name(halfspaces[1]);
      break;
    case Kind::second_separates_first:
      os << p.name(halfspaces[2]) << " separates " << p.name(halfspaces[0]) << " and "
         << p.name(halfspaces[1]);
      break;
    case Kind::first_separates_second:
      os << p.name(halfspaces[2]) << " separates " << p.name(halfspaces[0]) << " and "
         << p.name(halfspaces[1]);
      break;
  }
  return os.str();
}

TransversalityWitness quotient_transversality_witness(const EquivalenceRelation& rel,
                                                      std::uint32_t class1, std::uint32_t class2) {
  QuotientResult q = quotient_pocset(rel);
  const Pocset& p = rel.pocset();
  HyperplaneId qh1 = q.quotient->hyperplane_of(q.class_to_halfspace[class1]);
  HyperplaneId qh2 = q.quotient->hyperplane_of(q.class_to_halfspace[class2]);
  if (q.quotient->classify_hyperplanes(qh1, qh2) != HyperplaneRel::transverse)
    fail_validation("NotTransverseInQuotient",
                    "classes " + rel.class_name(class1) + " and " + rel.class_name(class2) +
                        " are not transverse in the quotient");

  const auto& hyps1 = rel.hyperplanes_of_class(class1);
  const auto& hyps2 = rel.hyperplanes_of_class(class2);
  for (HyperplaneId a : hyps1)
    for (HyperplaneId b : hyps2)
      if (a != b && p.transverse(a, b))
        return {TransversalityWitness::Kind::transverse_representatives,
                {p.canonical_side(a), p.canonical_side(b)}};
  for (HyperplaneId b : hyps2)
    for (std::size_t i = 0; i < hyps1.size(); ++i)
      for (std::size_t j = i + 1; j < hyps1.size(); ++j)
        if (p.separates(b, hyps1[i], hyps1[j]))
          return {TransversalityWitness::Kind::second_separates_first,
                  {p.canonical_side(hyps1[i]), p.canonical_side(hyps1[j]), p.canonical_side(b)}};
  for (HyperplaneId a : hyps1)
    for (std::size_t i = 0; i < hyps2.size(); ++i)
      for (std::size_t j = i + 1; j < hyps2.size(); ++j)
        if (p.separates(a, hyps2[i], hyps2[j]))
          return {TransversalityWitness::Kind::first_separates_second,
                  {p.canonical_side(hyps2[i]), p.canonical_side(hyps2[j]), p.canonical_side(a)}};
  fail_lemma("WitnessNotFound", "transverse quotient classes " + rel.class_name(class1) + ", " +
                                    rel.class_name(class2) + " admit none of the three witness shapes");
}

std::vector<std::uint32_t> interval_in_quotient(const EquivalenceRelation& rel, std::uint32_t lo,
                                                std::uint32_t hi) {
  QuotientResult q = quotient_pocset(rel);
  std::vector<HalfspaceId> qint =
      q.quotient->interval(q.class_to_halfspace[lo], q.class_to_halfspace[hi]);
  std::vector<std::uint32_t> out;
  for (HalfspaceId h : qint) {
    for (std::uint32_t c = 0; c < rel.class_count(); ++c)
      if (q.class_to_halfspace[c] == h) out.push_back(c);
  }
  return out;
}

RawRelation parse_relation(std::string_view text) {
  using detail::parse_error;
  using detail::require_name;
  RawRelation raw;
  for (const auto& lt : detail::tokenize_lines(text)) {
    const auto& t = lt.tokens;
    if (t[0] != "rel") parse_error(lt.line, 1, "unknown directive '" + t[0] + "' in relation file");
    if (t.size() != 3) parse_error(lt.line, 1, "expected 'rel NAME NAME'");
    require_name(t[1], lt.line, 2);
    require_name(t[2], lt.line, 3);
    raw.entries.push_back({t[1], t[2], lt.line});
  }
  return raw;
}

EquivalenceRelation make_relation(PocsetPtr pocset, const RawRelation& raw) {
  std::vector<std::pair<HalfspaceId, HalfspaceId>> pairs;
  for (const auto& e : raw.entries) pairs.emplace_back(pocset->id_of(e.a), pocset->id_of(e.b));
  return EquivalenceRelation::from_pairs(std::move(pocset), pairs);
}

EquivalenceRelation kernel_relation(const PocsetMap& f) {
  const Pocset& dom = *f.domain;
  for (HalfspaceId h = 0; h < dom.halfspace_count(); ++h)
    if (f.assign[dom.star(h)] != f.codomain->star(f.assign[h]))
      fail_validation("AM1Violated",
                      "kernel relation requires star-equivariance; fails at '" + dom.name(h) + "'");
  std::vector<std::uint32_t> cls(dom.halfspace_count());
  for (HalfspaceId h = 0; h < dom.halfspace_count(); ++h) cls[h] = f.assign[h];
  return EquivalenceRelation::from_class_ids(f.domain, std::move(cls));
}

}  // namespace cubefold
