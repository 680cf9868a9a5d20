#include "cubefold/fold_engine.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cubefold {

PairedGroup PairedGroup::closure(const GroupAction& dom, const GroupAction& tgt) {
  if (dom.generator_count() != tgt.generator_count())
    fail_validation("UnpairedGenerator", "actions declare different numbers of generators");
  std::vector<PairedPerm> gens;
  for (std::size_t i = 0; i < dom.generator_count(); ++i) {
    int j = tgt.find_generator(dom.generator_name(i));
    if (j < 0)
      fail_validation("UnpairedGenerator",
                      "no target generator named '" + dom.generator_name(i) + "'");
    gens.push_back({dom.generator(i), tgt.generator(static_cast<std::size_t>(j))});
  }
  PairedPerm id{identity_perm(dom.pocset()->halfspace_count()),
                identity_perm(tgt.pocset()->halfspace_count())};
  std::set<PairedPerm> seen{id};
  std::vector<PairedPerm> queue{id};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    PairedPerm cur = queue[qi];
    for (const PairedPerm& g : gens) {
      PairedPerm next{compose_perm(g.dom, cur.dom), compose_perm(g.tgt, cur.tgt)};
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  PairedGroup group;
  group.elements.assign(seen.begin(), seen.end());
  return group;
}

ResolutionState make_resolution_state(PocsetPtr pocset, GroupAction action, PocsetPtr target,
                                      GroupAction target_action, PocsetMap map) {
  MapClassification c = classify_map(map);
  if (!c.is_resolution) {
    std::string why = !c.admissible
                          ? (!c.am1.pass   ? "AM1 fails at " + c.am1.witness
                             : !c.am2.pass ? "AM2 fails at " + c.am2.witness
                             : !c.am3.pass ? "AM3 fails at " + c.am3.witness
                                           : "AM4 fails at " + c.am4.witness)
                          : c.resolution_witness;
    fail_validation("NotResolution", "map is not a resolution: " + why);
  }
  std::string witness;
  if (!check_equivariant(action, target_action, map.assign, &witness))
    fail_validation("NotEquivariant", "map is not equivariant: " + witness);
  PairedGroup group = PairedGroup::closure(action, target_action);
  return {std::move(pocset), std::move(action), std::move(target), std::move(target_action),
          std::move(map), std::move(group)};
}

std::size_t identified_hyperplane_pairs(const ResolutionState& st) {
  const Pocset& p = *st.pocset;
  std::size_t count = 0;
  for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a)
    for (HyperplaneId b = a + 1; b < p.hyperplane_count(); ++b)
      if (st.map.image_hyperplane(a) == st.map.image_hyperplane(b)) ++count;
  return count;
}

std::vector<std::pair<HalfspaceId, HalfspaceId>> find_foldable_pairs(const ResolutionState& st) {
  const Pocset& p = *st.pocset;
  std::vector<std::pair<HalfspaceId, HalfspaceId>> out;
  for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a) {
    for (HyperplaneId b = a + 1; b < p.hyperplane_count(); ++b) {
      if (st.map.image_hyperplane(a) != st.map.image_hyperplane(b)) continue;
      std::vector<HyperplaneId> fiber;
      for (HyperplaneId l = 0; l < p.hyperplane_count(); ++l)
        if (st.map.image_hyperplane(l) == st.map.image_hyperplane(a)) fiber.push_back(l);
      if (!p.is_inseparable(fiber, a, b)) continue;
      std::vector<HyperplaneId> seps = p.separators(a, b);
      bool blocked = false;
      for (std::size_t i = 0; i < seps.size() && !blocked; ++i)
        for (std::size_t j = i + 1; j < seps.size() && !blocked; ++j)
          if (st.map.image_hyperplane(seps[i]) == st.map.image_hyperplane(seps[j])) blocked = true;
      if (blocked) continue;

      // Identified hyperplanes of an admissible map are disjoint (AM2), so a
      // unique facing orientation pair exists; AM3 makes its images equal.
      HalfspaceId ca = p.canonical_side(a), cb = p.canonical_side(b);
      for (HalfspaceId ha : {ca, p.star(ca)}) {
        for (HalfspaceId hb : {cb, p.star(cb)}) {
          if (p.classify_halfspaces(ha, hb) != Arrangement::facing) continue;
          if (st.map.assign[ha] != st.map.assign[hb])
            fail_lemma("FoldOrientationMismatch",
                       "facing orientations of an identified inseparable pair have distinct images");
          out.emplace_back(std::min(ha, hb), std::max(ha, hb));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    return std::pair(p.name(x.first), p.name(x.second)) < std::pair(p.name(y.first), p.name(y.second));
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Minimal relation generated by the pair under the group action, star and
// transitivity, by fixed-point iteration on a union-find.
EquivalenceRelation generated_fold_relation(const ResolutionState& st,
                                            std::pair<HalfspaceId, HalfspaceId> pair) {
  const Pocset& p = *st.pocset;
  std::vector<std::uint32_t> parent(p.halfspace_count());
  for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<HalfspaceId, HalfspaceId>> work{pair};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    std::uint32_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    work.emplace_back(p.star(a), p.star(b));
    for (std::size_t g = 0; g < st.action.generator_count(); ++g)
      work.emplace_back(st.action.generator(g)[a], st.action.generator(g)[b]);
  }
  std::vector<std::uint32_t> cls(p.halfspace_count());
  for (HalfspaceId h = 0; h < p.halfspace_count(); ++h) cls[h] = find(h);
  return EquivalenceRelation::from_class_ids(st.pocset, std::move(cls));
}

GroupAction descend_action(const GroupAction& action, const QuotientResult& q) {
  const EquivalenceRelation& rel = q.relation;
  RawAction raw;
  for (std::size_t g = 0; g < action.generator_count(); ++g) {
    const Perm& perm = action.generator(g);
    RawAction::Gen gen{action.generator_name(g), {}, 0};
    for (std::uint32_t c = 0; c < rel.class_count(); ++c) {
      std::uint32_t target_cls = rel.class_of(perm[rel.classes()[c][0]]);
      for (HalfspaceId m : rel.classes()[c])
        if (rel.class_of(perm[m]) != target_cls)
          fail_lemma("InducedActionInvalid",
                     "generator '" + action.generator_name(g) + "' does not descend to classes");
      gen.moves.emplace_back(q.class_names[c], q.class_names[target_cls]);
    }
    raw.generators.push_back(std::move(gen));
  }
  try {
    return GroupAction::validate(q.quotient, raw);
  } catch (const Error& e) {
    if (e.code() == "Inversion")
      fail_validation("InversionCreated",
                      "induced action on the quotient inverts a hyperplane: " + std::string(e.what()));
    fail_lemma("InducedActionInvalid", e.what());
  }
}

// Canonical bijection ((H/~)/~f1) <-> (H/~f0), verified to be a pocset
// isomorphism by exhaustive comparison.
bool factorization_isomorphic(const ResolutionState& before, const FoldStep& step) {
  QuotientResult q0 = quotient_pocset(kernel_relation(before.map));
  QuotientResult q1 = quotient_pocset(kernel_relation(step.result.map));

  const Pocset& h0 = *q0.quotient;
  const Pocset& h1 = *q1.quotient;
  if (h0.halfspace_count() != h1.halfspace_count()) return false;

  // m : halfspaces of (Q/~f1) -> halfspaces of (H/~f0), via any preimage.
  std::vector<HalfspaceId> m(h1.halfspace_count());
  std::vector<bool> hit(h0.halfspace_count(), false);
  for (HalfspaceId x = 0; x < h1.halfspace_count(); ++x) {
    HalfspaceId q_rep = UINT32_MAX;
    for (HalfspaceId qh = 0; qh < step.result.pocset->halfspace_count(); ++qh)
      if (q1.projection.assign[qh] == x) { q_rep = qh; break; }
    HalfspaceId h_rep = UINT32_MAX;
    for (HalfspaceId h = 0; h < before.pocset->halfspace_count(); ++h)
      if (step.quotient.projection.assign[h] == q_rep) { h_rep = h; break; }
    m[x] = q0.projection.assign[h_rep];
    if (hit[m[x]]) return false;
    hit[m[x]] = true;
  }
  // The bijection must identify the fibers exactly, not just some member.
  for (HalfspaceId h = 0; h < before.pocset->halfspace_count(); ++h) {
    HalfspaceId via_fold = q1.projection.assign[step.quotient.projection.assign[h]];
    if (m[via_fold] != q0.projection.assign[h]) return false;
  }
  for (HalfspaceId x = 0; x < h1.halfspace_count(); ++x) {
    if (h0.star(m[x]) != m[h1.star(x)]) return false;
    for (HalfspaceId y = 0; y < h1.halfspace_count(); ++y)
      if (h1.lt(x, y) != h0.lt(m[x], m[y])) return false;
  }
  return true;
}

// Transverse classes after a fold come from transverse representatives or
// from a translate of the folded pair with a representative of the other
// class strictly between its facing orientations.
bool transversality_witnessed(const ResolutionState& before, const FoldStep& step,
                             std::pair<HalfspaceId, HalfspaceId> folded) {
  const Pocset& p = *before.pocset;
  const Pocset& q = *step.quotient.quotient;
  const EquivalenceRelation& rel = step.quotient.relation;

  auto case2 = [&](std::uint32_t cls_a, std::uint32_t cls_b) {
    for (const PairedPerm& g : before.group.elements) {
      HalfspaceId a1 = g.dom[folded.first], a2 = g.dom[folded.second];
      if (rel.class_of(a1) != cls_a && rel.class_of(p.star(a1)) != cls_a) continue;
      for (HalfspaceId k : rel.classes()[cls_b]) {
        if ((p.lt(p.star(a1), k) && p.lt(k, a2)) || (p.lt(p.star(a2), k) && p.lt(k, a1)))
          return true;
      }
      for (HalfspaceId k : rel.classes()[rel.class_of(p.star(rel.classes()[cls_b][0]))]) {
        if ((p.lt(p.star(a1), k) && p.lt(k, a2)) || (p.lt(p.star(a2), k) && p.lt(k, a1)))
          return true;
      }
    }
    return false;
  };

  for (HyperplaneId qa = 0; qa < q.hyperplane_count(); ++qa) {
    for (HyperplaneId qb = qa + 1; qb < q.hyperplane_count(); ++qb) {
      if (!q.transverse(qa, qb)) continue;
      std::uint32_t cls_a = UINT32_MAX, cls_b = UINT32_MAX;
      for (std::uint32_t c = 0; c < rel.class_count(); ++c) {
        HalfspaceId qh = step.quotient.class_to_halfspace[c];
        if (q.hyperplane_of(qh) == qa) cls_a = c;
        if (q.hyperplane_of(qh) == qb) cls_b = c;
      }
      bool case1 = false;
      for (HyperplaneId a : rel.hyperplanes_of_class(cls_a))
        for (HyperplaneId b : rel.hyperplanes_of_class(cls_b))
          if (p.transverse(a, b)) case1 = true;
      if (!case1 && !case2(cls_a, cls_b) && !case2(cls_b, cls_a)) return false;
    }
  }
  return true;
}

// Converse direction: a hyperplane separating an identified pair becomes
// transverse to that class in the quotient.
bool separation_forces_transversality(const FoldStep& step) {
  const EquivalenceRelation& rel = step.quotient.relation;
  const Pocset& p = rel.pocset();
  const Pocset& q = *step.quotient.quotient;
  for (const auto& hyp_cls : rel.hyperplane_classes()) {
    for (std::size_t i = 0; i < hyp_cls.size(); ++i) {
      for (std::size_t j = i + 1; j < hyp_cls.size(); ++j) {
        for (HyperplaneId k = 0; k < p.hyperplane_count(); ++k) {
          if (!p.separates(k, hyp_cls[i], hyp_cls[j])) continue;
          HyperplaneId qh = q.hyperplane_of(
              step.quotient.projection.assign[p.canonical_side(hyp_cls[i])]);
          HyperplaneId qk = q.hyperplane_of(step.quotient.projection.assign[p.canonical_side(k)]);
          if (qh == qk || !q.transverse(qh, qk)) return false;
        }
      }
    }
  }
  return true;
}

// Transversality in the fold quotient pushes down to the kernel quotient and
// to the target.
bool transversality_descends(const ResolutionState& before, const FoldStep& step) {
  const Pocset& p = *before.pocset;
  const Pocset& q = *step.quotient.quotient;
  QuotientResult q0 = quotient_pocset(kernel_relation(before.map));
  const Pocset& h0 = *q0.quotient;
  const Pocset& tgt = *before.target;
  for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a) {
    for (HyperplaneId b = a + 1; b < p.hyperplane_count(); ++b) {
      HyperplaneId qa = q.hyperplane_of(step.quotient.projection.assign[p.canonical_side(a)]);
      HyperplaneId qb = q.hyperplane_of(step.quotient.projection.assign[p.canonical_side(b)]);
      if (qa == qb || !q.transverse(qa, qb)) continue;
      HyperplaneId ka = h0.hyperplane_of(q0.projection.assign[p.canonical_side(a)]);
      HyperplaneId kb = h0.hyperplane_of(q0.projection.assign[p.canonical_side(b)]);
      if (ka == kb || !h0.transverse(ka, kb)) return false;
      HyperplaneId ta = before.map.image_hyperplane(a), tb = before.map.image_hyperplane(b);
      if (ta == tb || !tgt.transverse(ta, tb)) return false;
    }
  }
  return true;
}

// Separated triples whose separation the fold destroys: the separator is
// folded with an endpoint, or the three classes form a facing triple with
// exactly two class members of the separator between the endpoints.
bool broken_separation_explained(const ResolutionState& before, const FoldStep& step) {
  const Pocset& p = *before.pocset;
  const Pocset& q = *step.quotient.quotient;
  const EquivalenceRelation& rel = step.quotient.relation;
  const Pocset& tgt = *before.target;

  auto q_hyp = [&](HyperplaneId hp) {
    return q.hyperplane_of(step.quotient.projection.assign[p.canonical_side(hp)]);
  };

  for (HyperplaneId h = 0; h < p.hyperplane_count(); ++h) {
    for (HyperplaneId l = h + 1; l < p.hyperplane_count(); ++l) {
      for (HyperplaneId k = 0; k < p.hyperplane_count(); ++k) {
        if (!p.separates(k, h, l)) continue;
        HyperplaneId th = before.map.image_hyperplane(h), tk = before.map.image_hyperplane(k),
                     tl = before.map.image_hyperplane(l);
        if ((th != tk && tgt.transverse(th, tk)) || (th != tl && tgt.transverse(th, tl)) ||
            (tk != tl && tgt.transverse(tk, tl)))
          continue;
        HyperplaneId qh = q_hyp(h), qk = q_hyp(k), ql = q_hyp(l);
        if (qh == qk || ql == qk) continue;  // separator folded with an endpoint
        // Hypothesis: the separation is destroyed. Degenerate folded-together
        // endpoints are outside the lemma's statement.
        if (qh == ql) continue;
        if (q.separates(qk, qh, ql)) continue;
        if (!q.is_facing_collection({qh, qk, ql})) return false;
        std::size_t between = 0;
        for (HyperplaneId kk : rel.hyperplanes_of_class(rel.class_of(p.canonical_side(k))))
          if (p.separates(kk, h, l)) ++between;
        if (between != 2) return false;
      }
    }
  }
  return true;
}

bool distances_non_increasing(const CubeComplex& before, const CubeComplex& after,
                              const InducedVertexMap& F) {
  for (std::uint32_t u = 0; u < before.vertex_count(); ++u)
    for (std::uint32_t v = u + 1; v < before.vertex_count(); ++v)
      if (after.l1_distance(F.vertex_map[u], F.vertex_map[v]) > before.l1_distance(u, v))
        return false;
  return true;
}

}  // namespace

FoldStep elementary_fold(const ResolutionState& st, std::pair<HalfspaceId, HalfspaceId> pair,
                         bool verify, std::size_t vertex_cap) {
  const Pocset& p = *st.pocset;
  std::pair<HalfspaceId, HalfspaceId> canon{std::min(pair.first, pair.second),
                                            std::max(pair.first, pair.second)};
  auto foldables = find_foldable_pairs(st);
  if (std::find(foldables.begin(), foldables.end(), canon) == foldables.end())
    fail_validation("NotFoldable", "(" + p.name(canon.first) + ", " + p.name(canon.second) +
                                       ") is not an elementary foldable pair");

  EquivalenceRelation rel = generated_fold_relation(st, canon);

  FoldStep step;
  step.pair_names = {p.name(canon.first), p.name(canon.second)};
  StepChecks& checks = step.checks;

  // Facts that gate the construction itself: every hyperplane
  // class is a facing collection, and one of its two orientation classes is
  // pairwise facing.
  bool orientation_ok = true;
  for (const auto& hyp_cls : rel.hyperplane_classes())
    if (!p.is_facing_collection(hyp_cls)) orientation_ok = false;
  auto pairwise_facing = [&](const std::vector<HalfspaceId>& members) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (p.classify_halfspaces(members[i], members[j]) != Arrangement::facing) return false;
    return true;
  };
  for (const auto& cls : rel.classes()) {
    if (cls.size() < 2) continue;
    const auto& star_cls = rel.classes()[rel.class_of(p.star(cls[0]))];
    if (!pairwise_facing(cls) && !pairwise_facing(star_cls)) orientation_ok = false;
  }
  if (!orientation_ok)
    fail_lemma("FoldClassNotFacing", "a class of the fold relation is not a facing collection");
  checks.named.emplace_back("orientation_facing", true);

  AdmissibilityReport report = check_admissible(rel);
  if (!report.admissible)
    fail_lemma("FoldRelationNotAdmissible",
               "fold relation fails " + report.violations.front().describe(p));
  checks.named.emplace_back("relation_admissible", true);

  step.quotient = quotient_pocset(rel);

  GroupAction quotient_action = descend_action(st.action, step.quotient);
  checks.named.emplace_back("no_inversion", true);

  // Induced map: well-defined because the generated relation refines the kernel.
  PocsetMap f1{step.quotient.quotient, st.target, {}};
  f1.assign.assign(step.quotient.quotient->halfspace_count(), UINT32_MAX);
  for (HalfspaceId h = 0; h < p.halfspace_count(); ++h) {
    HalfspaceId cls_h = step.quotient.projection.assign[h];
    if (f1.assign[cls_h] != UINT32_MAX && f1.assign[cls_h] != st.map.assign[h])
      fail_lemma("FoldRelationNotInKernel", "fold relation identifies halfspaces with distinct images");
    f1.assign[cls_h] = st.map.assign[h];
  }

  try {
    step.result = make_resolution_state(step.quotient.quotient, std::move(quotient_action),
                                        st.target, st.target_action, std::move(f1));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::validation && e.code() != "InversionCreated")
      fail_lemma("InducedMapNotResolution", e.what());
    throw;
  }
  checks.named.emplace_back("induced_map_resolution", true);
  checks.named.emplace_back("equivariant", true);

  if (verify) {
    checks.named.emplace_back("factorization_isomorphism", factorization_isomorphic(st, step));
    checks.named.emplace_back("transverse_classes_witnessed", transversality_witnessed(st, step, canon));
    checks.named.emplace_back("separated_pairs_cross_after", separation_forces_transversality(step));
    checks.named.emplace_back("transversality_descends", transversality_descends(st, step));
    checks.named.emplace_back("broken_separation_explained", broken_separation_explained(st, step));

    CubeComplex before = CubeComplex::dual(st.pocset, vertex_cap);
    CubeComplex after = CubeComplex::dual(step.quotient.quotient, vertex_cap);
    InducedVertexMap F = induced_complex_map(step.quotient.projection, before, after);
    checks.named.emplace_back("distance_non_increasing", distances_non_increasing(before, after, F));
    bool cobounded = true;
    try {
      check_cobounded_preserved(step, before, after, F);
    } catch (const Error&) {
      cobounded = false;
    }
    checks.named.emplace_back("cobounded", cobounded);

    for (const auto& [name, ok] : checks.named)
      if (!ok) fail_lemma("StepCheckFailed", "per-step check '" + name + "' failed after folding (" +
                                                 step.pair_names.first + ", " +
                                                 step.pair_names.second + ")");
  }

  try {
    step.complexity_after = complexity(step.result).value;
  } catch (const Error& e) {
    if (e.code() != "OrbitMapNotInjective") throw;
  }
  return step;
}

std::vector<FoldStep> fold_to_target(const ResolutionState& st, HalfspaceId h, HalfspaceId k,
                                     bool verify, std::size_t vertex_cap) {
  std::vector<FoldStep> steps;
  if (h == k) return steps;
  if (st.map.assign[h] != st.map.assign[k])
    fail_validation("NotIdentified", "fold_to_target requires equal images for '" +
                                         st.pocset->name(h) + "' and '" + st.pocset->name(k) + "'");

  ResolutionState cur = st;
  HalfspaceId ch = h, ck = k;

  const Pocset& p0 = *st.pocset;
  HyperplaneId a0 = p0.hyperplane_of(h), b0 = p0.hyperplane_of(k);
  std::vector<HyperplaneId> interval0 = p0.separators(a0, b0);
  interval0.push_back(a0);
  interval0.push_back(b0);
  std::size_t bound = 0;
  for (std::size_t i = 0; i < interval0.size(); ++i)
    for (std::size_t j = i + 1; j < interval0.size(); ++j)
      if (st.map.image_hyperplane(interval0[i]) == st.map.image_hyperplane(interval0[j])) ++bound;

  while (ch != ck) {
    if (steps.size() >= bound + 2)
      fail_lemma("FoldToTargetDiverged", "targeted folding stopped making progress");
    const Pocset& p = *cur.pocset;
    HyperplaneId a = p.hyperplane_of(ch), b = p.hyperplane_of(ck);
    std::set<HyperplaneId> interval{a, b};
    for (HyperplaneId s : p.separators(a, b)) interval.insert(s);

    auto foldables = find_foldable_pairs(cur);
    std::vector<std::pair<HalfspaceId, HalfspaceId>> candidates;
    for (const auto& f : foldables)
      if (interval.count(p.hyperplane_of(f.first)) && interval.count(p.hyperplane_of(f.second)))
        candidates.push_back(f);
    if (candidates.empty())
      fail_lemma("NoFoldableInInterval",
                 "no elementary foldable pair between the hyperplanes being identified");
    // Innermost pair first: fewest separating hyperplanes, names break ties.
    std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& x, const auto& y) {
      std::size_t sx = p.separators(p.hyperplane_of(x.first), p.hyperplane_of(x.second)).size();
      std::size_t sy = p.separators(p.hyperplane_of(y.first), p.hyperplane_of(y.second)).size();
      return std::pair(sx, p.name(x.first) + "\x01" + p.name(x.second)) <
             std::pair(sy, p.name(y.first) + "\x01" + p.name(y.second));
    });

    FoldStep step = elementary_fold(cur, candidates.front(), verify, vertex_cap);
    ch = step.quotient.projection.assign[ch];
    ck = step.quotient.projection.assign[ck];
    cur = step.result;
    steps.push_back(std::move(step));
  }
  if (steps.size() > bound)
    fail_lemma("FoldToTargetDiverged", "targeted folding exceeded the identified-pair bound");
  return steps;
}

ComplexityReport complexity(const ResolutionState& st) {
  const Pocset& p = *st.pocset;
  const Pocset& tgt = *st.target;

  auto hyperplane_orbits = [](const GroupAction& act) {
    auto orb = act.orbits();
    const Pocset& pp = *act.pocset();
    std::vector<std::uint32_t> of(pp.hyperplane_count());
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> renumber;
    for (HyperplaneId hp = 0; hp < pp.hyperplane_count(); ++hp) {
      HalfspaceId c = pp.canonical_side(hp);
      std::uint32_t lo = std::min(orb.orbit_of[c], orb.orbit_of[pp.star(c)]);
      std::uint32_t hi = std::max(orb.orbit_of[c], orb.orbit_of[pp.star(c)]);
      auto [it, _] = renumber.try_emplace({lo, hi}, static_cast<std::uint32_t>(renumber.size()));
      of[hp] = it->second;
    }
    return of;
  };
  std::vector<std::uint32_t> dom_orbit = hyperplane_orbits(st.action);
  std::vector<std::uint32_t> tgt_orbit = hyperplane_orbits(st.target_action);

  std::map<std::uint32_t, std::uint32_t> image_of_orbit;  // domain orbit -> target orbit
  for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a) {
    std::uint32_t to = tgt_orbit[st.map.image_hyperplane(a)];
    auto [it, inserted] = image_of_orbit.try_emplace(dom_orbit[a], to);
    if (!inserted && it->second != to)
      fail_lemma("OrbitMapIllDefined", "equivariance broken at the orbit level");
  }
  std::map<std::uint32_t, std::uint32_t> preimage_count;
  for (const auto& [dorb, torb] : image_of_orbit)
    if (++preimage_count[torb] > 1)
      fail_validation("OrbitMapNotInjective",
                      "two domain hyperplane orbits share a target orbit; fold them first");

  // One entry per target orbit meeting the image; representatives chosen
  // lexicographically and recorded.
  ComplexityReport report;
  std::set<std::uint32_t> seen_orbits;
  for (HyperplaneId b = 0; b < tgt.hyperplane_count(); ++b) {
    bool in_image = false;
    for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a)
      if (st.map.image_hyperplane(a) == b) in_image = true;
    if (!in_image || !seen_orbits.insert(tgt_orbit[b]).second) continue;

    HyperplaneId preimage = UINT32_MAX;
    for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a)
      if (st.map.image_hyperplane(a) == b) { preimage = a; break; }

    HalfspaceId cb = tgt.canonical_side(b);
    HalfspaceId ca = p.canonical_side(preimage);
    std::size_t missing = 0;
    for (const PairedPerm& g : st.group.elements) {
      bool stabilizes_target = g.tgt[cb] == cb || g.tgt[cb] == tgt.star(cb);
      bool stabilizes_preimage = g.dom[ca] == ca || g.dom[ca] == p.star(ca);
      if (stabilizes_target && !stabilizes_preimage) ++missing;
    }
    report.entries.push_back({tgt.hyperplane_name(b), p.hyperplane_name(preimage), missing});
    report.value += missing;
  }
  return report;
}

std::vector<CubeWitness> check_cobounded_preserved(const FoldStep& step, const CubeComplex& before,
                                                   const CubeComplex& after,
                                                   const InducedVertexMap& F) {
  const EquivalenceRelation& rel = step.quotient.relation;
  const Pocset& p = rel.pocset();
  const Pocset& q = *step.quotient.quotient;

  // quotient hyperplane -> relation class of its canonical orientation
  std::vector<std::uint32_t> class_of_qhyp(q.hyperplane_count());
  for (std::uint32_t c = 0; c < rel.class_count(); ++c) {
    HalfspaceId qh = step.quotient.class_to_halfspace[c];
    if (qh == q.canonical_side(q.hyperplane_of(qh))) class_of_qhyp[q.hyperplane_of(qh)] = c;
  }

  std::vector<CubeWitness> witnesses;
  for (std::size_t ci = 0; ci < after.maximal_cubes().size(); ++ci) {
    const Cube& cube = after.maximal_cubes()[ci];
    Bitset chosen(p.halfspace_count());
    std::vector<bool> covered(p.hyperplane_count(), false);

    for (HyperplaneId qhp : cube.hyperplanes) {
      std::uint32_t cls = class_of_qhyp[qhp];
      const auto& fiber = rel.hyperplanes_of_class(cls);
      if (fiber.size() == 1) {
        // Non-folded: any orientation works, take the canonical one.
        chosen.set(p.canonical_side(fiber[0]));
        covered[fiber[0]] = true;
      } else {
        // Folded: orient the whole class facing. Exactly one of the two
        // halfspace classes is pairwise facing.
        std::uint32_t star_cls = rel.class_of(p.star(rel.classes()[cls][0]));
        const std::vector<HalfspaceId>* facing = nullptr;
        for (std::uint32_t cand : {cls, star_cls}) {
          bool ok = true;
          const auto& members = rel.classes()[cand];
          for (std::size_t i = 0; i < members.size() && ok; ++i)
            for (std::size_t j = i + 1; j < members.size() && ok; ++j)
              if (p.classify_halfspaces(members[i], members[j]) != Arrangement::facing) ok = false;
          if (ok) { facing = &members; break; }
        }
        if (!facing)
          fail_lemma("WitnessNotFound", "folded class has no pairwise facing orientation");
        for (HalfspaceId m : *facing) {
          chosen.set(m);
          covered[p.hyperplane_of(m)] = true;
        }
      }
    }

    for (HyperplaneId hp = 0; hp < p.hyperplane_count(); ++hp) {
      if (covered[hp]) continue;
      HyperplaneId qh = q.hyperplane_of(step.quotient.projection.assign[p.canonical_side(hp)]);
      HyperplaneId disjoint_crossing = UINT32_MAX;
      for (HyperplaneId qhp : cube.hyperplanes)
        if (qh != qhp && !q.transverse(qh, qhp)) { disjoint_crossing = qhp; break; }
      if (disjoint_crossing == UINT32_MAX)
        fail_lemma("WitnessNotFound",
                   "hyperplane '" + p.hyperplane_name(hp) +
                       "' is transverse to every hyperplane of a maximal cube it does not cross");
      const auto& fiber = rel.hyperplanes_of_class(class_of_qhyp[disjoint_crossing]);
      HalfspaceId c = p.canonical_side(hp);
      HalfspaceId oriented = UINT32_MAX;
      for (HalfspaceId s : {c, p.star(c)}) {
        bool contains_all = true;
        for (HyperplaneId l : fiber)
          if (!p.hyperplane_in_halfspace(l, s)) contains_all = false;
        if (contains_all) {
          if (oriented != UINT32_MAX)
            fail_lemma("WitnessNotFound", "both orientations of '" + p.hyperplane_name(hp) +
                                              "' contain the preimages of a crossing hyperplane");
          oriented = s;
        }
      }
      if (oriented == UINT32_MAX)
        fail_lemma("WitnessNotFound", "no orientation of '" + p.hyperplane_name(hp) +
                                          "' contains the preimages of a crossing hyperplane");
      chosen.set(oriented);
    }

    auto vi = before.find_vertex(chosen);
    if (!vi) fail_lemma("WitnessNotFound", "cobounded recipe did not produce an ultrafilter");
    std::uint32_t img = F.vertex_map[*vi];
    if (!std::binary_search(cube.vertices.begin(), cube.vertices.end(), img))
      fail_lemma("WitnessNotFound", "image of the recipe vertex misses its maximal cube");
    witnesses.push_back({ci, chosen, img});
  }
  return witnesses;
}

FoldTrace folding_sequence(const ResolutionState& st, bool verify, std::size_t vertex_cap) {
  FoldTrace trace;
  trace.initial_identified_pairs = identified_hyperplane_pairs(st);
  try {
    trace.initial_complexity = complexity(st).value;
  } catch (const Error& e) {
    if (e.code() != "OrbitMapNotInjective") throw;
  }

  ResolutionState cur = st;
  auto run_target_fold = [&](HalfspaceId h, HalfspaceId k) {
    for (FoldStep& step : fold_to_target(cur, h, k, verify, vertex_cap)) {
      cur = step.result;
      trace.complexity_history.push_back(step.complexity_after);
      trace.steps.push_back(std::move(step));
    }
  };

  // Phase 1: make the orbit-level map injective by folding identified
  // hyperplanes from distinct orbits, least pair first.
  for (;;) {
    const Pocset& p = *cur.pocset;
    auto orbit_of = [&]() {
      auto orb = cur.action.orbits();
      return orb;
    }();
    std::optional<std::pair<HalfspaceId, HalfspaceId>> pick;
    for (HyperplaneId a = 0; a < p.hyperplane_count(); ++a) {
      for (HyperplaneId b = a + 1; b < p.hyperplane_count(); ++b) {
        if (cur.map.image_hyperplane(a) != cur.map.image_hyperplane(b)) continue;
        HalfspaceId ca = p.canonical_side(a), cb = p.canonical_side(b);
        bool same_orbit = orbit_of.orbit_of[ca] == orbit_of.orbit_of[cb] ||
                          orbit_of.orbit_of[ca] == orbit_of.orbit_of[p.star(cb)];
        if (same_orbit) continue;
        HalfspaceId kb = cur.map.assign[cb] == cur.map.assign[ca] ? cb : p.star(cb);
        if (!pick) pick = {ca, kb};
      }
      if (pick) break;
    }
    if (!pick) break;
    run_target_fold(pick->first, pick->second);
  }

  // Phase 2: reduce the complexity by folding a preimage with a stabilizer
  // translate of itself, until every target stabilizer generator survives.
  for (;;) {
    ComplexityReport rep = complexity(cur);
    if (rep.value == 0) break;
    const Pocset& p = *cur.pocset;
    const Pocset& tgt = *cur.target;
    bool folded = false;
    for (const auto& entry : rep.entries) {
      if (entry.missing == 0) continue;
      HalfspaceId ca = p.id_of(entry.preimage_rep);
      HalfspaceId cb = tgt.id_of(entry.target_rep);
      for (const PairedPerm& g : cur.group.elements) {
        bool stabilizes_target = g.tgt[cb] == cb || g.tgt[cb] == tgt.star(cb);
        bool stabilizes_preimage = g.dom[ca] == ca || g.dom[ca] == p.star(ca);
        if (!stabilizes_target || stabilizes_preimage) continue;
        std::size_t before_steps = trace.steps.size();
        run_target_fold(ca, g.dom[ca]);
        if (trace.steps.size() == before_steps)
          fail_lemma("FoldToTargetDiverged", "complexity fold made no progress");
        folded = true;
        break;
      }
      if (folded) break;
    }
    if (!folded) fail_lemma("ComplexityStuck", "positive complexity but no witness element found");
    std::size_t after = complexity(cur).value;
    if (after >= rep.value)
      fail_lemma("ComplexityNotDecreasing", "a phase-2 fold batch did not reduce the complexity");
  }

  if (identified_hyperplane_pairs(cur) != 0)
    fail_lemma("FoldingIncomplete", "orbit-injective, zero-complexity map still identifies hyperplanes");

  trace.final_map = cur.map;
  MapClassification c = classify_map(cur.map);
  trace.final_is_embedding = c.is_embedding;
  if (!trace.final_is_embedding)
    fail_lemma("FinalMapNotEmbedding", "folding terminated on a non-embedding");

  std::size_t bound = trace.initial_identified_pairs + trace.initial_complexity.value_or(0);
  if (trace.steps.size() > bound)
    fail_lemma("FoldingTooLong", "folding sequence exceeded the identified-pairs + complexity bound");

  // Composing all projections with the final embedding reproduces the input.
  for (HalfspaceId h = 0; h < st.pocset->halfspace_count(); ++h) {
    HalfspaceId x = h;
    for (const FoldStep& step : trace.steps) x = step.quotient.projection.assign[x];
    if (trace.final_map.assign[x] != st.map.assign[h])
      fail_lemma("FactorizationBroken", "composed projections disagree with the input map at '" +
                                            st.pocset->name(h) + "'");
  }
  return trace;
}

}  // namespace cubefold
