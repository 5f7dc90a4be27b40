#include <gtest/gtest.h>

#include "limitlearn/learner.hpp"

using namespace limitlearn;

namespace {

const ExtNat w = kOmega;

Character five_w() { return Character::of({{5, w}}); }
Character six_w() { return Character::of({{6, w}}); }
Character five_w_two() { return Character::of({{5, w}, {2, 1}}); }
Character ex1_a() { return Character::of({{5, w}, {6, 2}}); }
Character ex1_b() { return Character::of({{5, w}, {7, 1}}); }
Character kron(std::uint64_t i) { return Character(1, {{i, 0}}, 0); }

Prefix blocks_prefix(const std::vector<std::uint32_t>& sizes) {
  Prefix p;
  std::uint64_t next = 0;
  for (auto s : sizes) {
    const std::uint64_t first = next;
    for (std::uint32_t j = 0; j < s; ++j) p.items.push_back(Item::positive(first, next++));
  }
  return p;
}

Conjecture feed_all(Learner& l, const Prefix& p) {
  l.reset();
  for (const auto& it : p.items) l.feed(it);
  return l.current();
}

TEST(M, Examples) {
  MLearner m({five_w_two(), five_w()}, false);
  EXPECT_EQ(m.current(), five_w_two());
  MLearner m2({five_w(), six_w()});
  EXPECT_EQ(feed_all(m2, blocks_prefix({6})), six_w());
  EXPECT_EQ(feed_all(m2, blocks_prefix({5, 5})), five_w());
  EXPECT_EQ(feed_all(m2, blocks_prefix({7})), std::nullopt);
  EXPECT_THROW(MLearner({five_w(), five_w_two()}), PreconditionError);
}

TEST(M, ConvergesToFinClass) {
  const std::vector<Character> fam = {kron(1), kron(2), kron(3), five_w()};
  for (std::size_t t = 0; t < fam.size(); ++t) {
    MLearner m(fam);
    auto s = fair_informant(fam[t], 3);
    auto r = run_simulation(m, *s, 4000, fam[t], Relation::FinBiembed);
    EXPECT_TRUE(r.converged) << fam[t].to_string();
  }
}

TEST(MStar, ExampleOneBothTargets) {
  for (const auto& target : {ex1_a(), ex1_b()}) {
    MStarLearner l({ex1_a(), ex1_b()});
    auto s = fair_informant(target, 0);
    auto r = run_simulation(l, *s, 10000, target);
    EXPECT_TRUE(r.converged) << target.to_string();
  }
}

TEST(MStar, SingletonFamilyIsImmediate) {
  MStarLearner l({ex1_b()});
  EXPECT_EQ(l.current(), ex1_b());
  auto s = fair_informant(ex1_b(), 2);
  auto r = run_simulation(l, *s, 500, ex1_b());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_EQ(r.mind_changes, 0u);
}

TEST(MStar, KroneckerSlice) {
  std::vector<Character> fam;
  for (std::uint64_t i = 1; i <= 5; ++i) fam.push_back(kron(i));
  MStarLearner proto(fam);
  EXPECT_EQ(proto.separators()[0].components.size(), 4u);
  for (const auto& t : fam)
    for (std::uint64_t seed : {0, 1}) {
      auto l = proto.clone();
      auto s = fair_informant(t, seed);
      EXPECT_TRUE(run_simulation(*l, *s, 10000, t).converged) << t.to_string() << " seed " << seed;
    }
}

TEST(MStar, NonSeparableFamilyStillRuns) {
  MStarLearner l({five_w(), five_w_two()}, false);
  // sep([5:w]) is empty and is realized from the start, so it is always oldest.
  auto s = fair_informant(five_w_two(), 0);
  auto r = run_simulation(l, *s, 3000, five_w_two());
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.trace.conjectures.back(), five_w());
}

TEST(Fin, ExampleOne) {
  FinLearner l({ex1_a(), ex1_b()});
  EXPECT_EQ(l.keys()[0], (std::vector<std::uint64_t>{6, 6}));
  EXPECT_EQ(l.keys()[1], (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(l.current(), std::nullopt);

  Prefix seven = blocks_prefix({5, 7});
  EXPECT_EQ(feed_all(l, seven), ex1_b());

  // Two 6-blocks are not enough until a negative fact separates them.
  Prefix sixes = blocks_prefix({6, 6});
  EXPECT_EQ(feed_all(l, sixes), std::nullopt);
  sixes.items.push_back(Item::negative(0, 6));
  EXPECT_EQ(feed_all(l, sixes), ex1_a());

  for (const auto& t : {ex1_a(), ex1_b()}) {
    auto s = fair_informant(t, 5);
    auto r = run_simulation(l, *s, 5000, t);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.trace.fin_shape(t));
    EXPECT_TRUE(r.trace.fin_mind_changes.empty());
  }
  EXPECT_THROW(FinLearner({five_w(), six_w()}), PreconditionError);
}

TEST(Fin, KeyFallbackAgreesWithSearch) {
  const std::vector<Character> fam = {ex1_a(), ex1_b()};
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto k = detail::fin_key(fam, i, 0);
    const Character kc = detail::char_of_sizes(k);
    EXPECT_TRUE(fin_embeds(kc, fam[i]));
    EXPECT_FALSE(fin_embeds(kc, fam[1 - i]));
  }
}

TEST(Txt, ConvergesLikeInformant) {
  for (const auto& t : {ex1_a(), ex1_b()}) {
    TxtLearner l(std::make_unique<MStarLearner>(std::vector<Character>{ex1_a(), ex1_b()}));
    auto s = fair_text(t, 1);
    auto r = run_simulation(l, *s, 6000, t);
    EXPECT_TRUE(r.converged) << t.to_string();
  }
  TxtLearner c(std::make_unique<ConstantLearner>(five_w()));
  EXPECT_EQ(c.current(), five_w());
  EXPECT_EQ(c.feed(Item::positive(0, 1)), five_w());
  EXPECT_THROW(c.feed(Item::negative(0, 2)), PreconditionError);
}

TEST(TwoStage, Examples) {
  TwoStageLearner l;
  auto one = fair_informant(Character::infinite_classes(1), 0);
  auto r1 = run_simulation(l, *one, 2000, Character::infinite_classes(1));
  EXPECT_TRUE(r1.converged);
  EXPECT_EQ(r1.mind_changes, 0u);
  auto two = fair_informant(Character::infinite_classes(2), 0);
  auto r2 = run_simulation(l, *two, 2000, Character::infinite_classes(2));
  EXPECT_TRUE(r2.converged);
  EXPECT_EQ(r2.mind_changes, 1u);
}

TEST(Constant, AlwaysSame) {
  ConstantLearner l(five_w());
  auto s = fair_informant(six_w(), 0);
  auto r = run_simulation(l, *s, 300, five_w());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_EQ(r.summary_json(), "{\"converged\": true, \"stage\": 0, \"mind_changes\": 0}");
}

TEST(Simulation, DeterministicReplay) {
  MStarLearner l({ex1_a(), ex1_b()});
  auto s = fair_informant(ex1_a(), 11);
  auto r = run_simulation(l, *s, 3000, ex1_a());
  ReplayStream replay(Prefix{PresentationKind::Informant, r.trace.items});
  auto again = run_simulation(l, replay, 3000, ex1_a());
  EXPECT_EQ(again.trace.conjectures, r.trace.conjectures);
  EXPECT_EQ(again.summary_json(), r.summary_json());
  ReplayStream short_replay(Prefix{PresentationKind::Informant, {Item::pause()}});
  EXPECT_THROW(run_simulation(l, short_replay, 5, ex1_a()), StreamExhausted);
}

TEST(Simulation, TraceMarksMindChanges) {
  Trace t;
  t.record(Item::pause(), std::nullopt);
  t.record(Item::pause(), five_w());
  t.record(Item::pause(), five_w());
  t.record(Item::pause(), six_w());
  EXPECT_EQ(t.ex_mind_changes, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(t.fin_mind_changes, (std::vector<std::size_t>{3}));
  std::ostringstream os;
  t.write(os);
  EXPECT_EQ(os.str(), "stage 0: ?\nstage 1: [5:w] MC\nstage 2: [5:w]\nstage 3: [6:w] MC\n");
}

TEST(CharFit, PicksClosestMember) {
  CharFitLearner l({five_w(), five_w_two()});
  EXPECT_EQ(feed_all(l, blocks_prefix({5, 2})), five_w_two());
  EXPECT_EQ(feed_all(l, blocks_prefix({5, 5})), five_w());
}

}  // namespace
