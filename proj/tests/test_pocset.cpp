#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support/test_util.hpp"

using namespace cubefold;
using namespace cubefold::testutil;

namespace {

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("validate_pocset accepts the smallest pocset") {
  PocsetPtr p = pocset_from("pair a A\n");
  CHECK(p->hyperplane_count() == 1);
  CHECK(p->halfspace_count() == 2);
  CHECK(p->star(p->id_of("a")) == p->id_of("A"));
  CHECK(p->name(p->canonical_side(0)) == "A");  // ASCII order puts 'A' first
}

TEST_CASE("validate_pocset closes the order and adds the star dual") {
  RawPocset raw;
  raw.pairs = {{"a", "A"}, {"b", "B"}};
  raw.order = {{"a", "b"}};
  PocsetPtr p = make_pocset(raw);
  CHECK(p->lt(p->id_of("a"), p->id_of("b")));
  CHECK(p->lt(p->id_of("B"), p->id_of("A")));  // closure adds B <= A
  CHECK_FALSE(p->lt(p->id_of("b"), p->id_of("a")));

  // DFS reachability oracle agrees with the bitset closure on a random corpus.
  Rng rng(17);
  for (int round = 0; round < 40; ++round) {
    RawPocset rraw = random_pocset_raw(rng, 1 + rng() % 5, 12);
    PocsetPtr rp = make_pocset(rraw);
    auto oracle = closure_oracle(*rp, rraw);
    for (HalfspaceId h = 0; h < rp->halfspace_count(); ++h)
      for (HalfspaceId k = 0; k < rp->halfspace_count(); ++k)
        CHECK(rp->lt(h, k) == oracle[h][k]);
  }
}

TEST_CASE("validate_pocset rejects bad declarations") {
  CHECK(error_code([] { pocset_from("pair a A\nle a A\n"); }) == "ComparableWithComplement");
  CHECK(error_code([] { pocset_from("pair a a\n"); }) == "StarFixedPoint");
  CHECK(error_code([] { pocset_from("pair a A\npair a B\n"); }) == "DuplicatePair");
  CHECK(error_code([] {
          pocset_from("pair a A\npair b B\nle a b\nle b a\n");
        }) == "OrderCycle");
  // closure-level complement comparability
  CHECK(error_code([] {
          pocset_from("pair a A\npair b B\nle a b\nle b A\n");
        }) == "ComparableWithComplement");
  // duplicate identical declarations are idempotent
  PocsetPtr p = pocset_from("pair a A\npair A a\npair b B\nle a b\nle a b\n");
  CHECK(p->hyperplane_count() == 2);
}

TEST_CASE("classify_halfspaces on the chain and the square") {
  PocsetPtr p = chain(2);
  HalfspaceId a = p->id_of("a"), b = p->id_of("b");
  CHECK(p->classify_halfspaces(p->star(a), b) == Arrangement::facing);
  CHECK(p->classify_halfspaces(a, p->star(b)) == Arrangement::incompatible);
  CHECK(p->classify_halfspaces(a, b) == Arrangement::nested);
  CHECK(p->classify_halfspaces(a, a) == Arrangement::equal);
  CHECK(p->classify_halfspaces(a, p->star(a)) == Arrangement::complementary);

  PocsetPtr sq = pocset_from("pair a A\npair b B\n");
  CHECK(sq->classify_halfspaces(sq->id_of("a"), sq->id_of("b")) == Arrangement::transverse);
}

TEST_CASE("classification is total, symmetric and star-dual") {
  Rng rng(23);
  for (int round = 0; round < 30; ++round) {
    PocsetPtr p = random_pocset(rng, 1 + rng() % 5, 10);
    for (HalfspaceId h = 0; h < p->halfspace_count(); ++h) {
      for (HalfspaceId k = 0; k < p->halfspace_count(); ++k) {
        Arrangement hk = p->classify_halfspaces(h, k);
        Arrangement kh = p->classify_halfspaces(k, h);
        if (hk != Arrangement::nested) CHECK(hk == kh);
        else CHECK(kh == Arrangement::nested);
        Arrangement dual = p->classify_halfspaces(p->star(h), p->star(k));
        switch (hk) {
          case Arrangement::nested: CHECK(dual == Arrangement::nested); break;
          case Arrangement::facing: CHECK(dual == Arrangement::incompatible); break;
          case Arrangement::incompatible: CHECK(dual == Arrangement::facing); break;
          case Arrangement::transverse: CHECK(dual == Arrangement::transverse); break;
          case Arrangement::equal: CHECK(dual == Arrangement::equal); break;
          case Arrangement::complementary: CHECK(dual == Arrangement::complementary); break;
        }
        if (hk == Arrangement::nested) {
          CHECK((p->lt(h, k) || p->lt(k, h)));
          // star reverses the nesting direction
          if (p->lt(h, k)) CHECK(p->lt(p->star(k), p->star(h)));
        }
      }
    }
  }
}

TEST_CASE("classify_hyperplanes") {
  PocsetPtr p = chain(2);
  CHECK(p->classify_hyperplanes(0, 1) == HyperplaneRel::disjoint);
  CHECK(p->classify_hyperplanes(0, 0) == HyperplaneRel::equal);
  PocsetPtr sq = pocset_from("pair a A\npair b B\n");
  CHECK(sq->classify_hyperplanes(0, 1) == HyperplaneRel::transverse);
}

TEST_CASE("separators") {
  PocsetPtr p = chain(3);
  HyperplaneId ha = p->hyperplane_by_name("a"), hb = p->hyperplane_by_name("b"),
               hc = p->hyperplane_by_name("c");
  CHECK(p->separators(ha, hc) == std::vector<HyperplaneId>{hb});
  CHECK(p->separators(ha, hb).empty());
  CHECK(error_code([&] { p->separators(ha, ha); }) == "EqualHyperplanes");

  PocsetPtr tr = transverse_cube(3);
  for (HyperplaneId i = 0; i < 3; ++i)
    for (HyperplaneId j = i + 1; j < 3; ++j) CHECK(tr->separators(i, j).empty());

  // symmetry and the size bound
  Rng rng(31);
  for (int round = 0; round < 30; ++round) {
    PocsetPtr rp = random_pocset(rng, 2 + rng() % 4, 10);
    for (HyperplaneId i = 0; i < rp->hyperplane_count(); ++i)
      for (HyperplaneId j = i + 1; j < rp->hyperplane_count(); ++j) {
        auto s1 = rp->separators(i, j);
        auto s2 = rp->separators(j, i);
        CHECK(s1 == s2);
        CHECK(s1.size() <= rp->hyperplane_count() - 2);
      }
  }
}

TEST_CASE("is_inseparable") {
  PocsetPtr p = chain(3);
  HyperplaneId ha = p->hyperplane_by_name("a"), hb = p->hyperplane_by_name("b"),
               hc = p->hyperplane_by_name("c");
  CHECK_FALSE(p->is_inseparable({hb}, ha, hc));
  CHECK(p->is_inseparable({ha}, ha, hc));  // an endpoint never separates itself
  CHECK(p->is_inseparable({}, ha, hc));
}

TEST_CASE("is_facing_collection") {
  PocsetPtr p2 = chain(2);
  CHECK(p2->is_facing_collection({0, 1}));
  PocsetPtr p3 = chain(3);
  CHECK_FALSE(p3->is_facing_collection({0, 1, 2}));  // the middle wall separates
  CHECK(p3->is_facing_collection({}));
  CHECK(p3->is_facing_collection({1}));

  // The pairwise form and the simultaneous-orientation form agree; subsets of
  // facing collections are facing.
  Rng rng(41);
  for (int round = 0; round < 25; ++round) {
    PocsetPtr p = random_pocset(rng, 2 + rng() % 4, 10);
    std::vector<HyperplaneId> all(p->hyperplane_count());
    for (HyperplaneId i = 0; i < all.size(); ++i) all[i] = i;
    for (std::size_t mask = 0; mask < (std::size_t(1) << all.size()); ++mask) {
      std::vector<HyperplaneId> set;
      for (std::size_t i = 0; i < all.size(); ++i)
        if ((mask >> i) & 1) set.push_back(all[i]);

      bool pairwise = true;
      for (std::size_t i = 0; i < set.size() && pairwise; ++i)
        for (std::size_t j = i + 1; j < set.size() && pairwise; ++j)
          if (p->classify_hyperplanes(set[i], set[j]) != HyperplaneRel::disjoint ||
              !p->is_inseparable(set, set[i], set[j]))
            pairwise = false;

      bool simultaneous = false;  // orientation search, brute force over all choices
      for (std::size_t omask = 0; omask < (std::size_t(1) << set.size()) && !simultaneous; ++omask) {
        bool ok = true;
        std::vector<HalfspaceId> chosen;
        for (std::size_t i = 0; i < set.size(); ++i) {
          HalfspaceId c = p->canonical_side(set[i]);
          chosen.push_back((omask >> i) & 1 ? p->star(c) : c);
        }
        for (std::size_t i = 0; i < chosen.size() && ok; ++i)
          for (std::size_t j = i + 1; j < chosen.size() && ok; ++j)
            if (p->classify_halfspaces(chosen[i], chosen[j]) != Arrangement::facing) ok = false;
        if (ok) simultaneous = true;
      }
      if (set.size() <= 1) simultaneous = true;

      CHECK(pairwise == simultaneous);
      CHECK(p->is_facing_collection(set) == pairwise);
      if (p->is_facing_collection(set)) {
        // every subset is facing too
        for (std::size_t sub = 0; sub < (std::size_t(1) << set.size()); ++sub) {
          std::vector<HyperplaneId> subset;
          for (std::size_t i = 0; i < set.size(); ++i)
            if ((sub >> i) & 1) subset.push_back(set[i]);
          CHECK(p->is_facing_collection(subset));
        }
      }
    }
  }
}

TEST_CASE("facing halfspaces and two-element facing collections agree") {
  Rng rng(43);
  for (int round = 0; round < 30; ++round) {
    PocsetPtr p = random_pocset(rng, 2 + rng() % 4, 10);
    for (HyperplaneId i = 0; i < p->hyperplane_count(); ++i)
      for (HyperplaneId j = i + 1; j < p->hyperplane_count(); ++j) {
        bool pair_facing = false;
        HalfspaceId ci = p->canonical_side(i), cj = p->canonical_side(j);
        for (HalfspaceId h : {ci, p->star(ci)})
          for (HalfspaceId k : {cj, p->star(cj)})
            if (p->classify_halfspaces(h, k) == Arrangement::facing) pair_facing = true;
        CHECK(pair_facing == p->is_facing_collection({i, j}));
      }
  }
}

TEST_CASE("interval") {
  PocsetPtr p = chain(3);
  HalfspaceId a = p->id_of("a"), b = p->id_of("b"), c = p->id_of("c");
  CHECK(p->interval(a, c) == std::vector<HalfspaceId>{a, b, c});
  CHECK(p->interval(a, a) == std::vector<HalfspaceId>{a});
  CHECK(error_code([&] { p->interval(c, a); }) == "NotComparable");

  PocsetPtr d = make_pocset([] {
    RawPocset raw;
    raw.pairs = {{"a", "A"}, {"b", "B"}, {"b2", "B2"}, {"c", "C"}};
    raw.order = {{"a", "b"}, {"a", "b2"}, {"b", "c"}, {"b2", "c"}};
    return raw;
  }());
  auto iv = d->interval(d->id_of("a"), d->id_of("c"));
  std::vector<HalfspaceId> expect{d->id_of("a"), d->id_of("b"), d->id_of("b2"), d->id_of("c")};
  std::sort(expect.begin(), expect.end());
  CHECK(iv == expect);
  CHECK(d->classify_halfspaces(d->id_of("b"), d->id_of("b2")) == Arrangement::transverse);
}

TEST_CASE("grammar round trip") {
  Rng rng(47);
  for (int round = 0; round < 20; ++round) {
    PocsetPtr p = random_pocset(rng, 1 + rng() % 5, 12);
    PocsetPtr q = parse_and_validate_pocset(p->to_grammar());
    REQUIRE(q->halfspace_count() == p->halfspace_count());
    for (HalfspaceId h = 0; h < p->halfspace_count(); ++h) {
      CHECK(q->name(h) == p->name(h));
      CHECK(q->star(h) == p->star(h));
      for (HalfspaceId k = 0; k < p->halfspace_count(); ++k) CHECK(q->lt(h, k) == p->lt(h, k));
    }
  }
}

TEST_CASE("parse errors carry line information") {
  CHECK(error_code([] { parse_pocset("pair a A\nwat is this\n"); }) == "ParseError");
  try {
    parse_pocset("pair a A\nwat is this\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    make_pocset(parse_pocset("pair a A\nle a A\n"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
