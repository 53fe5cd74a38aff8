#include <doctest.h>

#include "mixedfair/fairness.hpp"
#include "support.hpp"

using namespace mixedfair;
using testsupport::Rng;
using testsupport::min_slack;

namespace {

Allocation intro_efm_allocation() {
  Allocation alloc;
  alloc.bundles = {Bundle{{}, PieceSet::interval(rat(0), rat(1, 2))},
                   Bundle{{}, PieceSet::interval(rat(1, 2), rat(1))}, make_bundle({0, 1})};
  return alloc;
}

}  // namespace

TEST_CASE("intro example: EFM holds, EF-alpha fails at 1/4 vs 3/8") {
  Instance intro = testsupport::identical_uniform(3, {rat(1, 4), rat(1, 4)}, rat(1, 2));
  Allocation alloc = intro_efm_allocation();

  FairnessReport efm = check(intro, alloc, Criterion::efm());
  CHECK(efm.satisfied);

  FairnessReport efa = check(intro, alloc, Criterion::efalpha());
  CHECK(!efa.satisfied);
  const Witness* v = efa.first_violation();
  REQUIRE(v != nullptr);
  CHECK(v->agent == 0);
  CHECK(v->against == 2);
  CHECK(v->lhs == rat(1, 4));
  CHECK(v->rhs == rat(3, 8));
}

TEST_CASE("single agent satisfies every criterion") {
  Instance inst = testsupport::identical_uniform(1, {rat(1, 3)}, rat(2, 3));
  Allocation alloc;
  alloc.bundles = {Bundle{{0}, PieceSet::full()}};
  for (const char* tok : {"ef", "prop", "ef1", "prop1", "efalpha", "propalpha", "efm",
                          "mms:1", "propmm"})
    CHECK(check(inst, alloc, Criterion::from_token(tok)).satisfied);
}

TEST_CASE("the T9 inequality chain: 253/280 > 252/280") {
  // n=3, x=1/10: 10 goods of 1/10, cake 9/5, alpha = 5/14.
  Instance inst = testsupport::identical_uniform(3, std::vector<Rat>(10, rat(1, 10)), rat(9, 5));
  CHECK(indivisibility_ratio(inst, 0) == rat(5, 14));
  Allocation alloc;
  std::vector<int> all(10);
  std::iota(all.begin(), all.end(), 0);
  alloc.bundles = {make_bundle(all), Bundle{{}, PieceSet::interval(rat(0), rat(1, 2))},
                   Bundle{{}, PieceSet::interval(rat(1, 2), rat(1))}};
  FairnessReport r = check(inst, alloc, Criterion::effa(rat(27, 10)));
  CHECK(!r.satisfied);
  const Witness* v = r.first_violation();
  REQUIRE(v != nullptr);
  CHECK(v->lhs == rat(9, 10));      // u_2(A_2) = 252/280
  CHECK(v->rhs == rat(253, 280));   // 1 - (27/10)(5/14)(1/10)
}

TEST_CASE("check rejects invalid allocations") {
  Instance inst = testsupport::identical_uniform(2, {rat(1, 2)}, rat(1, 2));
  Allocation bad;
  bad.bundles = {make_bundle({0}), make_bundle({0}, PieceSet::full())};
  CHECK_THROWS_AS(check(inst, bad, Criterion::ef()), error);
}

TEST_CASE("un-normalized instances use u_i(A)/n thresholds") {
  // Identical agents, total 4 each: PROP threshold is 2, not 1/2.
  Instance inst = testsupport::identical_uniform(2, {rat(3), rat(1)}, rat(0));
  Allocation alloc;
  alloc.bundles = {make_bundle({0}), make_bundle({1})};
  FairnessReport prop = check(inst, alloc, Criterion::prop());
  CHECK(!prop.satisfied);
  CHECK(prop.witnesses[1].rhs == rat(2));
  CHECK(check(inst, alloc, Criterion::prop1()).satisfied);
}

TEST_CASE("compute_mms on the worked examples") {
  SUBCASE("goods {1/2, 3/10} plus cake 1/5: MMS = 1/2") {
    Instance inst = testsupport::identical_uniform(2, {rat(1, 2), rat(3, 10)}, rat(1, 5));
    MmsCertificate cert = compute_mms(inst, 0);
    CHECK(cert.value == rat(1, 2));
    // Witness: {o1}, {o2} with all cake on the o2 bundle.
    Rat mn = rat(1);
    for (int b = 0; b < 2; ++b) {
      Rat v = cert.cake_shares[b];
      for (int g : cert.partition_goods[b]) v += inst.goods[0][g];
      mn = rat_min(mn, v);
    }
    CHECK(mn == cert.value);
  }
  SUBCASE("cake-only: MMS = u(C)/n") {
    Instance inst = testsupport::identical_uniform(3, {}, rat(3, 4));
    CHECK(compute_mms(inst, 0).value == rat(1, 4));
  }
  SUBCASE("single good, two agents, no cake: MMS = 0") {
    Instance inst = testsupport::identical_uniform(2, {rat(1)}, rat(0));
    CHECK(compute_mms(inst, 0).value == 0);
  }
  SUBCASE("30 identical goods collapse into count compositions") {
    Instance inst = testsupport::identical_uniform(3, std::vector<Rat>(30, rat(1, 10)), rat(0));
    CHECK(compute_mms(inst, 0).value == rat(1));
  }
  SUBCASE("beyond the enumeration bound") {
    std::vector<Rat> goods;
    for (int g = 0; g < 13; ++g) goods.push_back(rat(100 + g, 1300));
    Instance inst = testsupport::identical_uniform(6, goods, rat(0));
    CHECK_THROWS_AS(compute_mms(inst, 0), error);
  }
}

TEST_CASE("compute_mms set-partition route agrees with direct enumeration") {
  // 10 distinct goods and 4 agents push the per-class composition count past
  // its cap, exercising the restricted-growth-string enumeration.
  std::vector<Rat> goods;
  for (int g = 0; g < 10; ++g) goods.push_back(rat(17 + 3 * g, 100));
  Instance inst = testsupport::identical_uniform(4, goods, rat(0));
  Rat best = -1;
  std::vector<int> assign(10, 0);
  auto rec = [&](auto&& self, int g) -> void {
    if (g == 10) {
      std::vector<Rat> sums(4, Rat(0));
      for (int gg = 0; gg < 10; ++gg) sums[assign[gg]] += goods[gg];
      Rat mn = sums[0];
      for (int b = 1; b < 4; ++b) mn = rat_min(mn, sums[b]);
      best = rat_max(best, mn);
      return;
    }
    for (int b = 0; b < 4; ++b) {
      assign[g] = b;
      self(self, g + 1);
    }
  };
  rec(rec, 0);
  CHECK(compute_mms(inst, 0).value == best);
}

TEST_CASE("compute_mms matches a set-partition oracle on small instances") {
  // Independent oracle: direct n^m labeled assignment enumeration.
  Rng rng(808);
  for (int iter = 0; iter < 25; ++iter) {
    Instance inst =
        testsupport::random_instance(rng, {.n_min = 2, .n_max = 3, .m_min = 1, .m_max = 5});
    int agent = rng.uniform(0, inst.n - 1);
    Rat cake = inst.cake_value(agent);
    Rat best = -1;
    std::vector<int> assign(inst.m, 0);
    auto rec = [&](auto&& self, int g) -> void {
      if (g == inst.m) {
        std::vector<Rat> sums(inst.n, Rat(0));
        for (int gg = 0; gg < inst.m; ++gg) sums[assign[gg]] += inst.goods[agent][gg];
        std::vector<Rat> adds = water_fill(sums, cake);
        Rat mn = sums[0] + adds[0];
        for (int b = 1; b < inst.n; ++b) mn = rat_min(mn, sums[b] + adds[b]);
        best = rat_max(best, mn);
        return;
      }
      for (int b = 0; b < inst.n; ++b) {
        assign[g] = b;
        self(self, g + 1);
      }
    };
    rec(rec, 0);
    CHECK(compute_mms(inst, agent).value == best);
  }
}

TEST_CASE("MMS criterion checks beta-scaled thresholds") {
  Instance inst = testsupport::identical_uniform(2, {rat(1, 2), rat(3, 10)}, rat(1, 5));
  Allocation alloc;
  alloc.bundles = {make_bundle({0}), Bundle{{1}, PieceSet::full()}};
  CHECK(check(inst, alloc, Criterion::mms(rat(1))).satisfied);

  Allocation skewed;
  skewed.bundles = {Bundle{{0, 1}, PieceSet::full()}, Bundle{{}, {}}};
  CHECK(!check(inst, skewed, Criterion::mms(rat(1, 2))).satisfied);
}

TEST_CASE("PROPmM: prose reading vs literal formula") {
  SUBCASE("PM1: PROPmM but not PROP-alpha") {
    Instance inst =
        testsupport::identical_uniform(2, {rat(1, 4), rat(1, 4), rat(1, 4)}, rat(1, 4));
    Allocation alloc;
    alloc.bundles = {Bundle{{}, PieceSet::full()}, make_bundle({0, 1, 2})};
    CHECK(check(inst, alloc, Criterion::propmm()).satisfied);
    CHECK(!check(inst, alloc, Criterion::propalpha()).satisfied);
    // The displayed formula reads the min over the agent's own bundle; the
    // cake holder has no goods, so her term vanishes and the check fails.
    CheckOptions literal;
    literal.propmm_literal_formula = true;
    CHECK(!check(inst, alloc, Criterion::propmm(), literal).satisfied);
  }
  SUBCASE("PM2: PROP-alpha but not PROPmM") {
    Instance inst = testsupport::identical_uniform(2, {rat(2, 5), rat(2, 5)}, rat(1, 5));
    Allocation alloc;
    alloc.bundles = {make_bundle({0}), Bundle{{1}, PieceSet::full()}};
    CHECK(check(inst, alloc, Criterion::propalpha()).satisfied);
    CHECK(!check(inst, alloc, Criterion::propmm()).satisfied);
  }
}

TEST_CASE("degenerate reductions") {
  Rng rng(616);
  SUBCASE("cake-only: EFfA(c) == EF and PROPfA(c) == PROP") {
    for (int iter = 0; iter < 30; ++iter) {
      Instance inst = testsupport::random_instance(rng, {.n_min = 2, .m_min = 0, .m_max = 0,
                                                         .seg_min = 1});
      Allocation alloc = testsupport::random_allocation(rng, inst);
      Rat c = rng.rational(3, 10);
      CHECK(check(inst, alloc, Criterion::effa(c)).satisfied ==
            check(inst, alloc, Criterion::ef()).satisfied);
      CHECK(check(inst, alloc, Criterion::propfa(c)).satisfied ==
            check(inst, alloc, Criterion::prop()).satisfied);
    }
  }
  SUBCASE("no cake: EFfA(1) == EF1 and PROPfA(1) == PROP1") {
    for (int iter = 0; iter < 30; ++iter) {
      Instance inst = testsupport::random_instance(rng, {.n_min = 2, .m_min = 1,
                                                         .seg_min = 0, .seg_max = 0});
      Allocation alloc = testsupport::random_allocation(rng, inst);
      CHECK(check(inst, alloc, Criterion::efalpha()).satisfied ==
            check(inst, alloc, Criterion::ef1()).satisfied);
      CHECK(check(inst, alloc, Criterion::propalpha()).satisfied ==
            check(inst, alloc, Criterion::prop1()).satisfied);
    }
  }
}

TEST_CASE("implication chain on random allocations") {
  Rng rng(271828);
  int allocations = 0;
  while (allocations < 1000) {
    Instance inst =
        testsupport::random_instance(rng, {.n_min = 2, .n_max = 4, .m_min = 0, .m_max = 6});
    Allocation alloc = testsupport::random_allocation(rng, inst);
    ++allocations;
    bool ef = check(inst, alloc, Criterion::ef()).satisfied;
    bool efa = check(inst, alloc, Criterion::efalpha()).satisfied;
    bool ef1 = check(inst, alloc, Criterion::ef1()).satisfied;
    bool prop = check(inst, alloc, Criterion::prop()).satisfied;
    bool propa = check(inst, alloc, Criterion::propalpha()).satisfied;
    bool prop1 = check(inst, alloc, Criterion::prop1()).satisfied;
    if (ef) CHECK(efa);
    if (efa) {
      CHECK(ef1);
      CHECK(propa);  // EF-alpha implies PROP-alpha
    }
    if (prop) CHECK(propa);
    if (propa) CHECK(prop1);

    Rat c1 = rng.rational(2, 8), c2 = c1 + rng.rational(2, 8);
    if (check(inst, alloc, Criterion::effa(c1)).satisfied)
      CHECK(check(inst, alloc, Criterion::effa(c2)).satisfied);
    if (check(inst, alloc, Criterion::propfa(c1)).satisfied)
      CHECK(check(inst, alloc, Criterion::propfa(c2)).satisfied);
  }
}

TEST_CASE("witnesses re-evaluate against raw utilities") {
  Rng rng(1618);
  for (int iter = 0; iter < 60; ++iter) {
    Instance inst = testsupport::random_instance(rng, {.n_min = 2});
    Allocation alloc = testsupport::random_allocation(rng, inst);
    for (const char* tok : {"ef", "ef1", "efalpha", "prop", "prop1", "propalpha", "efm"}) {
      Criterion crit = Criterion::from_token(tok);
      FairnessReport r = check(inst, alloc, crit);
      for (const Witness& w : r.witnesses) {
        CHECK(w.satisfied == (w.lhs >= w.rhs));
        Rat own = bundle_value(inst, w.agent, alloc.bundles[w.agent]);
        if (w.against) {
          Rat other = bundle_value(inst, w.agent, alloc.bundles[*w.against]);
          CHECK(w.lhs == own);
          Rat removal = 0;
          if (w.good) {
            Rat coeff = crit.kind == CriterionKind::EFfA
                            ? crit.c * indivisibility_ratio(inst, w.agent)
                            : Rat(1);
            removal = coeff * inst.goods[w.agent][*w.good];
            // The recorded good maximizes the relaxation among candidates.
            for (int g : alloc.bundles[*w.against].goods)
              CHECK(inst.goods[w.agent][g] <= inst.goods[w.agent][*w.good]);
          }
          CHECK(w.rhs == other - removal);
        } else {
          CHECK(w.rhs == inst.total_value(w.agent) / inst.n);
          Rat addition = 0;
          if (w.good) {
            Rat coeff = crit.kind == CriterionKind::PROPfA
                            ? crit.c * indivisibility_ratio(inst, w.agent)
                            : Rat(1);
            addition = coeff * inst.goods[w.agent][*w.good];
            CHECK(!alloc.holds_good(w.agent, *w.good));
          }
          CHECK(w.lhs == own + addition);
        }
      }
    }
  }
}

TEST_CASE("check_fpo_two_agents") {
  SUBCASE("identical agents: any allocation is threshold-consistent") {
    Rng rng(9001);
    for (int iter = 0; iter < 20; ++iter) {
      Instance inst = testsupport::random_instance(
          rng, {.n_min = 2, .n_max = 2, .identical = true});
      Allocation alloc = testsupport::random_allocation(rng, inst);
      CHECK(check_fpo_two_agents(inst, alloc).satisfied);
    }
  }
  SUBCASE("crossed dominance is violated with an improving exchange") {
    Instance inst = testsupport::make_instance(
        2, {{rat(1), rat(0)}, {rat(0), rat(1)}}, {}, {});
    Allocation alloc;
    alloc.bundles = {make_bundle({1}), make_bundle({0})};
    FpoResult r = check_fpo_two_agents(inst, alloc);
    CHECK(!r.satisfied);
    REQUIRE(r.exchange.has_value());
    CHECK(r.exchange->delta1 + r.exchange->delta2 > 0);
    CHECK(r.exchange->delta1 >= 0);
    CHECK(r.exchange->delta2 >= 0);
  }
  SUBCASE("cake-for-cake inversion yields strict mutual gains") {
    Instance inst = testsupport::make_instance(
        2, {{}, {}}, {rat(0), rat(1, 2), rat(1)},
        {{rat(4, 3), rat(2, 3)}, {rat(2, 3), rat(4, 3)}});
    Allocation alloc;  // each agent holds the piece the other prefers
    alloc.bundles = {Bundle{{}, PieceSet::interval(rat(1, 2), rat(1))},
                     Bundle{{}, PieceSet::interval(rat(0), rat(1, 2))}};
    FpoResult r = check_fpo_two_agents(inst, alloc);
    CHECK(!r.satisfied);
    REQUIRE(r.exchange.has_value());
    CHECK(r.exchange->delta1 > 0);
    CHECK(r.exchange->delta2 > 0);
    CHECK(r.exchange->give_fraction <= 1);
    CHECK(r.exchange->take_fraction <= 1);
  }
  SUBCASE("good-involving inversions are decided by the exact search") {
    // Crossed goods: swapping them improves both agents, so the allocation
    // is dominated and the certificate is a whole reallocation.
    Instance crossed = testsupport::make_instance(
        2, {{rat(9, 10), rat(1, 10)}, {rat(1, 10), rat(9, 10)}}, {}, {});
    Allocation bad;
    bad.bundles = {make_bundle({1}), make_bundle({0})};
    FpoResult r = check_fpo_two_agents(crossed, bad);
    CHECK(!r.satisfied);
    REQUIRE(r.dominating.has_value());
    CHECK(r.delta1 > 0);
    CHECK(r.delta2 > 0);
    CHECK(bundle_value(crossed, 0, r.dominating->bundles[0]) ==
          bundle_value(crossed, 0, bad.bundles[0]) + r.delta1);

    // A ratio inversion a whole-good trade cannot exploit: agent 0 holds the
    // low-ratio good, agent 1 the high-ratio one plus all the cake, yet no
    // goods-respecting reallocation dominates.
    Instance tight = testsupport::make_instance(
        2, {{rat(1, 2), rat(3, 10)}, {rat(7, 20), rat(1, 20)}},
        {rat(0), rat(1)}, {{rat(1, 5)}, {rat(3, 5)}});
    Allocation alloc;
    alloc.bundles = {Bundle{{0}, {}}, Bundle{{1}, PieceSet::full()}};
    CHECK(check_fpo_two_agents(tight, alloc).satisfied);
  }
  SUBCASE("n != 2 is rejected") {
    Instance inst = testsupport::identical_uniform(3, {}, rat(1));
    Allocation alloc;
    alloc.bundles = {Bundle{{}, PieceSet::full()}, Bundle{{}, {}}, Bundle{{}, {}}};
    CHECK_THROWS_AS(check_fpo_two_agents(inst, alloc), error);
  }
}
