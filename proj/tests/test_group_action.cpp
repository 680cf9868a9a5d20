#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support/test_util.hpp"

using namespace cubefold;
using namespace cubefold::testutil;

namespace {

GroupAction action_from(PocsetPtr p, const std::string& text) {
  return GroupAction::validate(std::move(p), parse_action(text));
}

GroupAction twin_swap() {
  PocsetPtr p = pocset_from("pair a1 A1\npair b1 B1\npair a2 A2\npair b2 B2\nle a1 b1\nle a2 b2\n");
  return action_from(p,
                     "gen w: a1 -> a2, a2 -> a1, b1 -> b2, b2 -> b1, "
                     "A1 -> A2, A2 -> A1, B1 -> B2, B2 -> B1\n");
}

}  // namespace

TEST_CASE("validate_action: trivial, fan rotation, inversion") {
  PocsetPtr p = chain(2);
  GroupAction trivial = GroupAction::trivial(p);
  CHECK(trivial.closure().size() == 1);

  GroupAction fan = fan_rotation(fan_target());
  CHECK(fan.closure().size() == 4);

  PocsetPtr one = pocset_from("pair a A\n");
  CHECK_THROWS_WITH_AS(action_from(one, "gen s: a -> A, A -> a\n"),
                       doctest::Contains("Inversion"), Error);
}

TEST_CASE("validate_action rejects non-automorphisms and non-bijections") {
  PocsetPtr p = chain(2);
  // swapping the two hyperplanes of a chain breaks the order
  CHECK_THROWS_WITH_AS(action_from(p, "gen s: a -> b, b -> a, A -> B, B -> A\n"),
                       doctest::Contains("NotAutomorphism"), Error);
  CHECK_THROWS_WITH_AS(action_from(p, "gen s: a -> b\n"), doctest::Contains("NotBijection"),
                       Error);
  // moving a without moving A fails star-equivariance
  PocsetPtr sq = pocset_from("pair a A\npair b B\n");
  CHECK_THROWS_WITH_AS(action_from(sq, "gen s: a -> b, b -> a\n"),
                       doctest::Contains("NotAutomorphism"), Error);
}

TEST_CASE("orbits") {
  PocsetPtr p = chain(3);
  auto singletons = GroupAction::trivial(p).orbits();
  CHECK(singletons.classes.size() == p->halfspace_count());

  GroupAction fan = fan_rotation(fan_target());
  auto fo = fan.orbits();
  REQUIRE(fo.classes.size() == 2);
  CHECK(fo.classes[0].size() == 4);
  CHECK(fo.classes[1].size() == 4);
  CHECK(fo.orbit_of[fan.pocset()->id_of("k0")] == fo.orbit_of[fan.pocset()->id_of("k3")]);
  CHECK(fo.orbit_of[fan.pocset()->id_of("k0")] != fo.orbit_of[fan.pocset()->id_of("K0")]);

  GroupAction tw = twin_swap();
  auto to = tw.orbits();
  CHECK(to.classes.size() == 4);
  CHECK(to.orbit_of[tw.pocset()->id_of("a1")] == to.orbit_of[tw.pocset()->id_of("a2")]);
  CHECK(to.orbit_of[tw.pocset()->id_of("a1")] != to.orbit_of[tw.pocset()->id_of("b1")]);
}

TEST_CASE("orbits of star equal star of orbits") {
  for (const GroupAction& act : {fan_rotation(fan_target()), twin_swap()}) {
    const Pocset& p = *act.pocset();
    auto orb = act.orbits();
    for (const auto& cls : orb.classes) {
      std::set<HalfspaceId> starred;
      for (HalfspaceId h : cls) starred.insert(p.star(h));
      std::set<HalfspaceId> other(orb.classes[orb.orbit_of[p.star(cls[0])]].begin(),
                                  orb.classes[orb.orbit_of[p.star(cls[0])]].end());
      CHECK(starred == other);
    }
  }
}

TEST_CASE("stabilizer") {
  PocsetPtr p = chain(2);
  auto st = GroupAction::trivial(p).stabilizer(0);
  REQUIRE(st.size() == 1);
  CHECK(st[0] == identity_perm(p->halfspace_count()));

  GroupAction fan = fan_rotation(fan_target());
  auto sf = fan.stabilizer(fan.pocset()->hyperplane_by_name("k0"));
  CHECK(sf.size() == 1);  // only the identity rotation fixes k0

  GroupAction tw = twin_swap();
  auto stw = tw.stabilizer(tw.pocset()->hyperplane_by_name("a1"));
  CHECK(stw.size() == 1);

  // an action with a generator fixing the hyperplane pointwise keeps it
  PocsetPtr tri = pocset_from("pair a A\npair b B\npair c C\n");
  GroupAction act = action_from(tri, "gen s: b -> c, c -> b, B -> C, C -> B\n");
  auto sa = act.stabilizer(tri->hyperplane_by_name("a"));
  CHECK(sa.size() == 2);  // identity and the swap both fix the a-hyperplane

  // stabilizers are closed under product and inverse
  for (const GroupAction& g : {fan, tw, act}) {
    for (HyperplaneId hp = 0; hp < g.pocset()->hyperplane_count(); ++hp) {
      auto stab = g.stabilizer(hp);
      std::set<Perm> members(stab.begin(), stab.end());
      for (const Perm& x : stab) {
        CHECK(members.count(inverse_perm(x)) == 1);
        for (const Perm& y : stab) CHECK(members.count(compose_perm(x, y)) == 1);
      }
    }
  }
}

TEST_CASE("automorphisms preserve separation") {
  for (const GroupAction& act : {fan_rotation(fan_target()), twin_swap()}) {
    const Pocset& p = *act.pocset();
    for (const Perm& g : act.closure()) {
      for (HyperplaneId i = 0; i < p.hyperplane_count(); ++i) {
        for (HyperplaneId j = 0; j < p.hyperplane_count(); ++j) {
          if (i == j) continue;
          std::set<HyperplaneId> mapped;
          for (HyperplaneId s : p.separators(i, j)) mapped.insert(act.apply_hyperplane(g, s));
          auto direct = p.separators(act.apply_hyperplane(g, i), act.apply_hyperplane(g, j));
          CHECK(mapped == std::set<HyperplaneId>(direct.begin(), direct.end()));
        }
      }
    }
  }
}

TEST_CASE("check_equivariant") {
  PocsetPtr p = chain(2);
  GroupAction t1 = GroupAction::trivial(p);
  PocsetMap id = identity_map(p);
  CHECK(check_equivariant(t1, t1, id.assign));

  // fan8 -> fan respects the rotation pairing
  PocsetPtr dom = pocset_from([] {
    std::string s;
    for (int i = 0; i < 8; ++i) s += "pair t" + std::to_string(i) + " T" + std::to_string(i) + "\n";
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        int d = std::min((i - j + 8) % 8, (j - i + 8) % 8);
        if (d >= 2) s += "le T" + std::to_string(i) + " t" + std::to_string(j) + "\n";
      }
    return s;
  }());
  std::string gen = "gen r: ";
  for (int i = 0; i < 8; ++i)
    gen += "t" + std::to_string(i) + " -> t" + std::to_string((i + 1) % 8) + ", ";
  for (int i = 0; i < 8; ++i)
    gen += "T" + std::to_string(i) + " -> T" + std::to_string((i + 1) % 8) +
           (i == 7 ? "\n" : ", ");
  GroupAction dact = action_from(dom, gen);
  PocsetPtr fan = fan_target();
  GroupAction fact = fan_rotation(fan);
  RawMap rm;
  for (int i = 0; i < 8; ++i) rm.entries.push_back({"t" + std::to_string(i), "k" + std::to_string(i % 4)});
  PocsetMap f = make_pocset_map(dom, fan, rm);
  CHECK(check_equivariant(dact, fact, f.assign));

  // precomposing with a non-central permutation breaks it
  RawMap bad = rm;
  bad.entries[0] = {"t0", "k1"};
  PocsetMap g = make_pocset_map(dom, fan, bad);
  std::string witness;
  CHECK_FALSE(check_equivariant(dact, fact, g.assign, &witness));
  CHECK(!witness.empty());

  // unpaired generator names are an error
  GroupAction other = action_from(fan, "gen other:\n");
  CHECK_THROWS_WITH_AS(check_equivariant(dact, other, f.assign),
                       doctest::Contains("UnpairedGenerator"), Error);
}
