#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support/test_util.hpp"

using namespace cubefold;
using namespace cubefold::testutil;

namespace {

ResolutionState chain3_fold_state() {
  PocsetPtr p = chain(3);
  PocsetPtr sq = pocset_from("pair x X\npair y Y\n");
  PocsetMap f = make_pocset_map(p, sq, parse_map("map a -> x\nmap b -> y\nmap c -> X\n"));
  return make_resolution_state(p, GroupAction::trivial(p), sq, GroupAction::trivial(sq), f);
}

ResolutionState chain4_nested_state(bool with_flip) {
  PocsetPtr p = chain(4);
  PocsetPtr sq = pocset_from("pair x X\npair y Y\n");
  PocsetMap f =
      make_pocset_map(p, sq, parse_map("map a -> x\nmap b -> y\nmap c -> Y\nmap d -> X\n"));
  GroupAction act = with_flip
                        ? GroupAction::validate(
                              p, parse_action("gen s: a -> D, b -> C, c -> B, d -> A, "
                                              "A -> d, B -> c, C -> b, D -> a\n"))
                        : GroupAction::trivial(p);
  GroupAction tact = with_flip ? GroupAction::validate(sq, parse_action("gen s:\n"))
                               : GroupAction::trivial(sq);
  return make_resolution_state(p, act, sq, tact, f);
}

ResolutionState twin_state() {
  PocsetPtr p = pocset_from("pair a1 A1\npair b1 B1\npair a2 A2\npair b2 B2\nle a1 b1\nle a2 b2\n");
  PocsetPtr t = pocset_from("pair u1 U1\npair u2 U2\n");
  GroupAction act = GroupAction::validate(
      p, parse_action("gen w: a1 -> a2, a2 -> a1, b1 -> b2, b2 -> b1, "
                      "A1 -> A2, A2 -> A1, B1 -> B2, B2 -> B1\n"));
  GroupAction tact =
      GroupAction::validate(t, parse_action("gen w: u1 -> u2, u2 -> u1, U1 -> U2, U2 -> U1\n"));
  PocsetMap f = make_pocset_map(
      p, t, parse_map("map a1 -> U1\nmap b1 -> u1\nmap a2 -> U2\nmap b2 -> u2\n"));
  return make_resolution_state(p, act, t, tact, f);
}

ResolutionState fan8_state() {
  std::string dom_text;
  for (int i = 0; i < 8; ++i)
    dom_text += "pair t" + std::to_string(i) + " T" + std::to_string(i) + "\n";
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      int d = std::min((i - j + 8) % 8, (j - i + 8) % 8);
      if (d >= 2) dom_text += "le T" + std::to_string(i) + " t" + std::to_string(j) + "\n";
    }
  PocsetPtr dom = pocset_from(dom_text);
  std::string gen = "gen r: ";
  for (int i = 0; i < 8; ++i)
    gen += "t" + std::to_string(i) + " -> t" + std::to_string((i + 1) % 8) + ", ";
  for (int i = 0; i < 8; ++i)
    gen += "T" + std::to_string(i) + " -> T" + std::to_string((i + 1) % 8) + (i == 7 ? "\n" : ", ");
  GroupAction act = GroupAction::validate(dom, parse_action(gen));
  PocsetPtr fan = fan_target();
  GroupAction fact = fan_rotation(fan);
  RawMap rm;
  for (int i = 0; i < 8; ++i)
    rm.entries.push_back({"t" + std::to_string(i), "k" + std::to_string(i % 4)});
  return make_resolution_state(dom, act, fan, fact, make_pocset_map(dom, fan, rm));
}

}  // namespace

TEST_CASE("find_foldable_pairs") {
  // embedding input: nothing to fold
  PocsetPtr c2 = chain(2);
  PocsetPtr c3 = chain(3);
  PocsetMap emb = make_pocset_map(c2, c3, parse_map("map a -> a\nmap b -> b\n"));
  ResolutionState est =
      make_resolution_state(c2, GroupAction::trivial(c2), c3, GroupAction::trivial(c3), emb);
  CHECK(find_foldable_pairs(est).empty());

  // chain3 fold: exactly the pair (star(a), c)
  ResolutionState st = chain3_fold_state();
  auto pairs = find_foldable_pairs(st);
  REQUIRE(pairs.size() == 1);
  CHECK(st.pocset->name(pairs[0].first) == "A");
  CHECK(st.pocset->name(pairs[0].second) == "c");

  // nested identified pairs: the outer pair is blocked until the inner folds
  ResolutionState nested = chain4_nested_state(false);
  auto np = find_foldable_pairs(nested);
  REQUIRE(np.size() == 1);
  CHECK(nested.pocset->name(np[0].first) == "B");
  CHECK(nested.pocset->name(np[0].second) == "c");
}

TEST_CASE("elementary_fold on the 2-chain") {
  PocsetPtr p = chain(2);
  PocsetPtr one = pocset_from("pair u U\n");
  PocsetMap f = make_pocset_map(p, one, parse_map("map a -> U\nmap b -> u\n"));
  ResolutionState st =
      make_resolution_state(p, GroupAction::trivial(p), one, GroupAction::trivial(one), f);
  auto pairs = find_foldable_pairs(st);
  REQUIRE(pairs.size() == 1);
  FoldStep step = elementary_fold(st, pairs[0]);
  CHECK(step.quotient.quotient->hyperplane_count() == 1);
  CHECK(classify_map(step.result.map).is_embedding);
  CHECK(step.checks.all());
}

TEST_CASE("elementary_fold on the 3-chain gives the square") {
  ResolutionState st = chain3_fold_state();
  FoldStep step = elementary_fold(st, find_foldable_pairs(st)[0]);
  CHECK(step.quotient.quotient->hyperplane_count() == 2);
  CubeComplex x = CubeComplex::dual(step.quotient.quotient);
  CHECK(x.vertex_count() == 4);
  CHECK(x.dimension() == 2);
  CHECK(step.checks.all());
}

TEST_CASE("elementary_fold closes over the group orbit") {
  ResolutionState st = twin_state();
  auto pairs = find_foldable_pairs(st);
  REQUIRE(!pairs.empty());
  FoldStep step = elementary_fold(st, pairs[0]);
  // one fold collapses both chains simultaneously
  CHECK(step.quotient.relation.class_count() == 4);
  CHECK(classify_map(step.result.map).is_embedding);

  // relation includes the mirrored pair
  const Pocset& p = *st.pocset;
  const EquivalenceRelation& rel = step.quotient.relation;
  CHECK(rel.same(p.id_of("A1"), p.id_of("b1")));
  CHECK(rel.same(p.id_of("A2"), p.id_of("b2")));
}

TEST_CASE("elementary_fold rejects non-foldable pairs") {
  ResolutionState nested = chain4_nested_state(false);
  HalfspaceId A = nested.pocset->id_of("A"), d = nested.pocset->id_of("d");
  CHECK_THROWS_WITH_AS(elementary_fold(nested, {A, d}), doctest::Contains("NotFoldable"), Error);
}

TEST_CASE("fold_to_target") {
  // already an elementary foldable pair: one step
  ResolutionState st = chain3_fold_state();
  HalfspaceId A = st.pocset->id_of("A"), c = st.pocset->id_of("c");
  auto steps = fold_to_target(st, A, c);
  CHECK(steps.size() == 1);

  // h == k: empty sequence
  CHECK(fold_to_target(st, A, A).empty());

  // nested identified pairs: two steps, inner first
  ResolutionState nested = chain4_nested_state(false);
  HalfspaceId a4 = nested.pocset->id_of("A"), d4 = nested.pocset->id_of("d");
  auto nsteps = fold_to_target(nested, a4, d4);
  REQUIRE(nsteps.size() == 2);
  CHECK(nsteps[0].pair_names == std::pair<std::string, std::string>{"B", "c"});
  CHECK(classify_map(nsteps.back().result.map).is_embedding);

  // distinct images are rejected
  HalfspaceId b4 = nested.pocset->id_of("b");
  CHECK_THROWS_WITH_AS(fold_to_target(nested, a4, b4), doctest::Contains("NotIdentified"), Error);
}

TEST_CASE("complexity") {
  // trivial group on an orbit-injective map: zero
  PocsetPtr c2 = chain(2);
  PocsetPtr c3 = chain(3);
  PocsetMap emb = make_pocset_map(c2, c3, parse_map("map a -> a\nmap b -> b\n"));
  ResolutionState st =
      make_resolution_state(c2, GroupAction::trivial(c2), c3, GroupAction::trivial(c3), emb);
  CHECK(complexity(st).value == 0);

  // non-injective orbit maps are rejected until phase 1 has run
  CHECK_THROWS_WITH_AS(complexity(chain3_fold_state()), doctest::Contains("OrbitMapNotInjective"),
                       Error);

  // flip action with full stabilizers on the target: each image orbit misses
  // the flip on its preimage
  ResolutionState nested = chain4_nested_state(true);
  ComplexityReport rep = complexity(nested);
  CHECK(rep.value == 2);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].missing == 1);
  CHECK(rep.entries[1].missing == 1);

  // fan8: one image orbit, one missing stabilizer element
  ComplexityReport fan_rep = complexity(fan8_state());
  CHECK(fan_rep.value == 1);
  REQUIRE(fan_rep.entries.size() == 1);
  CHECK(fan_rep.entries[0].target_rep == "K0");

  // preimage with the full stabilizer contributes zero
  ResolutionState tw = twin_state();
  CHECK_THROWS_WITH_AS(complexity(tw), doctest::Contains("OrbitMapNotInjective"), Error);
  FoldTrace twt = folding_sequence(tw);
  CHECK(complexity(make_resolution_state(twt.steps.back().result.pocset,
                                         twt.steps.back().result.action,
                                         twt.steps.back().result.target,
                                         twt.steps.back().result.target_action,
                                         twt.steps.back().result.map))
            .value == 0);
}

TEST_CASE("folding_sequence fixtures") {
  // embedding input: empty trace
  PocsetPtr c2 = chain(2);
  PocsetPtr c3 = chain(3);
  PocsetMap emb = make_pocset_map(c2, c3, parse_map("map a -> a\nmap b -> b\n"));
  FoldTrace t0 = folding_sequence(
      make_resolution_state(c2, GroupAction::trivial(c2), c3, GroupAction::trivial(c3), emb));
  CHECK(t0.steps.empty());
  CHECK(t0.final_is_embedding);

  // chain3: one step, square embeds in square
  FoldTrace t1 = folding_sequence(chain3_fold_state());
  CHECK(t1.steps.size() == 1);
  CHECK(t1.final_is_embedding);
  CHECK(t1.final_map.domain->hyperplane_count() == 2);

  // fan8: phase 2 reduces the complexity from 1 to 0 in one batch
  FoldTrace t2 = folding_sequence(fan8_state());
  CHECK(t2.initial_complexity == std::size_t(1));
  CHECK(t2.steps.size() == 1);
  REQUIRE(t2.complexity_history.size() == 1);
  CHECK(t2.complexity_history[0] == std::size_t(0));
  CHECK(t2.final_is_embedding);
  CHECK(t2.final_map.domain->hyperplane_count() == 4);

  // flip4: complexity history strictly decreasing through phase 2
  FoldTrace t3 = folding_sequence(chain4_nested_state(true));
  CHECK(t3.initial_complexity == std::size_t(2));
  REQUIRE(t3.steps.size() == 2);
  CHECK(t3.final_is_embedding);
  std::size_t prev = *t3.initial_complexity;
  for (const auto& c : t3.complexity_history) {
    REQUIRE(c.has_value());
    CHECK(*c <= prev);
    prev = *c;
  }
  CHECK(prev == 0);
}

TEST_CASE("fold steps carry cobounded witnesses") {
  ResolutionState st = chain3_fold_state();
  FoldStep step = elementary_fold(st, find_foldable_pairs(st)[0]);
  CubeComplex before = CubeComplex::dual(st.pocset);
  CubeComplex after = CubeComplex::dual(step.quotient.quotient);
  InducedVertexMap F = induced_complex_map(step.quotient.projection, before, after);
  auto witnesses = check_cobounded_preserved(step, before, after, F);
  REQUIRE(witnesses.size() == after.maximal_cubes().size());
  for (const auto& w : witnesses) {
    const Cube& cube = after.maximal_cubes()[w.cube_index];
    CHECK(std::binary_search(cube.vertices.begin(), cube.vertices.end(), w.image_vertex));
    CHECK(before.find_vertex(w.domain_vertex).has_value());
  }

  // twin chains: the folded quotient's square contains image vertices
  ResolutionState tw = twin_state();
  FoldStep tstep = elementary_fold(tw, find_foldable_pairs(tw)[0]);
  CubeComplex tb = CubeComplex::dual(tw.pocset);
  CubeComplex ta = CubeComplex::dual(tstep.quotient.quotient);
  InducedVertexMap tF = induced_complex_map(tstep.quotient.projection, tb, ta);
  CHECK(check_cobounded_preserved(tstep, tb, ta, tF).size() == ta.maximal_cubes().size());
}

TEST_CASE("triple-nested accordion folds inside out") {
  // chain a..f with pairs (a,f), (b,e), (c,d) identified at facing
  // orientations; only the innermost pair is foldable at each stage
  PocsetPtr p = chain(6);
  PocsetPtr cube = transverse_cube(3);
  PocsetMap f = make_pocset_map(
      p, cube,
      parse_map("map a -> x0\nmap b -> x1\nmap c -> x2\n"
                "map d -> X2\nmap e -> X1\nmap f -> X0\n"));
  ResolutionState st =
      make_resolution_state(p, GroupAction::trivial(p), cube, GroupAction::trivial(cube), f);
  auto foldables = find_foldable_pairs(st);
  REQUIRE(foldables.size() == 1);
  CHECK(st.pocset->name(foldables[0].first) == "C");
  CHECK(st.pocset->name(foldables[0].second) == "d");

  FoldTrace trace = folding_sequence(st);
  CHECK(trace.steps.size() == 3);
  CHECK(trace.steps[0].pair_names == std::pair<std::string, std::string>{"C", "d"});
  CHECK(trace.final_is_embedding);
  CHECK(trace.final_map.domain->hyperplane_count() == 3);
}

TEST_CASE("Z/16 ring over the fan: classes are facing four-collections") {
  std::string dom_text;
  for (int i = 0; i < 16; ++i)
    dom_text += "pair t" + std::to_string(10 + i) + " T" + std::to_string(10 + i) + "\n";
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      int d = std::min((i - j + 16) % 16, (j - i + 16) % 16);
      if (d >= 2)
        dom_text += "le T" + std::to_string(10 + i) + " t" + std::to_string(10 + j) + "\n";
    }
  PocsetPtr dom = pocset_from(dom_text);
  std::string gen = "gen r: ";
  for (int i = 0; i < 16; ++i)
    gen += "t" + std::to_string(10 + i) + " -> t" + std::to_string(10 + (i + 1) % 16) + ", ";
  for (int i = 0; i < 16; ++i)
    gen += "T" + std::to_string(10 + i) + " -> T" + std::to_string(10 + (i + 1) % 16) +
           (i == 15 ? "\n" : ", ");
  GroupAction act = GroupAction::validate(dom, parse_action(gen));
  PocsetPtr fan = fan_target();
  RawMap rm;
  for (int i = 0; i < 16; ++i)
    rm.entries.push_back({"t" + std::to_string(10 + i), "k" + std::to_string(i % 4)});
  ResolutionState st = make_resolution_state(dom, act, fan, fan_rotation(fan),
                                             make_pocset_map(dom, fan, rm));
  CHECK(complexity(st).value == 3);
  FoldTrace trace = folding_sequence(st);
  CHECK(trace.final_is_embedding);
  CHECK(trace.final_map.domain->hyperplane_count() == 4);
  // complexity strictly decreases across phase-2 batches down to zero
  std::size_t prev = *trace.initial_complexity;
  for (const auto& c : trace.complexity_history) {
    REQUIRE(c.has_value());
    CHECK(*c < prev + 1);
    prev = *c;
  }
  CHECK(prev == 0);
  // some step folds a class of four pairwise facing hyperplanes
  bool has_big_class = false;
  for (const FoldStep& step : trace.steps)
    for (const auto& cls : step.quotient.relation.classes())
      if (cls.size() >= 4) has_big_class = true;
  CHECK(has_big_class);
}

TEST_CASE("random resolutions fold to embeddings with all checks") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    ResolutionState st = random_resolution(seed);
    std::size_t pairs0 = identified_hyperplane_pairs(st);
    FoldTrace trace = folding_sequence(st);  // throws on any failed check
    CHECK(trace.final_is_embedding);
    CHECK(trace.steps.size() <= pairs0 + trace.initial_complexity.value_or(0));
    for (const FoldStep& step : trace.steps) CHECK(step.checks.all());
    // composition identity, re-checked outside the engine
    for (HalfspaceId h = 0; h < st.pocset->halfspace_count(); ++h) {
      HalfspaceId x = h;
      for (const FoldStep& step : trace.steps) x = step.quotient.projection.assign[x];
      CHECK(trace.final_map.assign[x] == st.map.assign[h]);
    }
  }
}

TEST_CASE("factorization identity holds on every fixture step") {
  for (ResolutionState st : {chain3_fold_state(), chain4_nested_state(true), twin_state(),
                             fan8_state()}) {
    FoldTrace trace = folding_sequence(st);
    for (const FoldStep& step : trace.steps) {
      bool found = false;
      for (const auto& [name, ok] : step.checks.named)
        if (name == "factorization_isomorphism") {
          found = true;
          CHECK(ok);
        }
      CHECK(found);
    }
  }
}
