#include <gtest/gtest.h>

#include "limitlearn/adversary.hpp"

using namespace limitlearn;

namespace {

const ExtNat w = kOmega;

Character five_w() { return Character::of({{5, w}}); }
Character five_w_two() { return Character::of({{5, w}, {2, 1}}); }

std::vector<std::unique_ptr<Learner>> limit_roster() {
  const std::vector<Character> fam = {five_w(), five_w_two()};
  std::vector<std::unique_ptr<Learner>> r;
  r.push_back(std::make_unique<MLearner>(fam, false));
  r.push_back(std::make_unique<MStarLearner>(fam, false));
  r.push_back(std::make_unique<ConstantLearner>(five_w()));
  r.push_back(std::make_unique<ConstantLearner>(five_w_two()));
  r.push_back(std::make_unique<CharFitLearner>(fam));
  r.push_back(std::make_unique<EchoLearner>());
  r.push_back(std::make_unique<ParityLearner>(five_w(), five_w_two()));
  return r;
}

TEST(LimitAdversary, ConstantStaysOnWitness) {
  ConstantLearner l(five_w());
  LimitAdversary adv(l, five_w(), {five_w_two()});
  PrefixState st;
  for (std::size_t n = 0; n < 10000; ++n) ASSERT_NO_THROW(st.push(*adv.next(), n));
  const auto r = adv.report();
  EXPECT_EQ(r.phase_switches, 1u);
  EXPECT_FALSE(r.presenting_limit);
  EXPECT_EQ(r.presented, five_w_two());
  EXPECT_TRUE(r.wrong());
  const auto& h = st.size_histogram();
  EXPECT_EQ(h.at(2), 1u);
  EXPECT_GE(h.at(5), 5u);
}

TEST(LimitAdversary, RosterDisjunction) {
  for (const auto& l : limit_roster()) {
    LimitAdversary adv(*l, five_w(), {five_w(), five_w_two()});
    PrefixState st;
    for (std::size_t n = 0; n < 10000; ++n) {
      ASSERT_NO_THROW(st.push(*adv.next(), n)) << l->name();
      ASSERT_TRUE(fin_embeds(st.character(), five_w_two())) << l->name();
    }
    EXPECT_TRUE(adv.report().consistent()) << l->name() << " " << adv.report().verdict();
  }
}

TEST(LimitAdversary, AlternatingLearnerSwitchesOften) {
  ParityLearner l(five_w(), five_w_two());
  auto r = run_limit_adversary(l, five_w(), {five_w_two()}, 10000);
  EXPECT_GE(r.phase_switches, 10u);
  EXPECT_GE(r.mind_changes, 5u);
  EXPECT_THROW(LimitAdversary(l, five_w_two(), {five_w()}), PreconditionError);
}

TEST(Diagonalizer, ConstantHasNoExpansions) {
  ConstantLearner l(five_w());
  const auto run = diagonalize(l, 2, 200);
  const auto& r = run.report;
  EXPECT_TRUE(r.expansionary.empty());
  EXPECT_EQ(r.sigma_e_classes, 0u);
  EXPECT_EQ(r.tau_e_classes, 1u);
  EXPECT_EQ(r.sigma_singletons, 202u);
  EXPECT_EQ(r.tau_singletons, 200u);
  EXPECT_TRUE(r.consistent());
  EXPECT_TRUE(run.nu.items.empty());
}

TEST(Diagonalizer, EchoExpandsEveryStage) {
  EchoLearner l;
  const auto run = diagonalize(l, 3, 40);
  const auto& r = run.report;
  EXPECT_EQ(r.expansionary.size(), 40u);
  EXPECT_EQ(r.sigma_e_classes, 80u);
  EXPECT_EQ(r.tau_e_classes, 121u);
  EXPECT_TRUE(r.consistent());
  for (const auto* p : {&run.sigma, &run.tau, &run.nu}) EXPECT_NO_THROW(state_of(*p));
  EXPECT_EQ(state_of(run.sigma).element_count(), state_of(run.tau).element_count());
}

TEST(Diagonalizer, Roster) {
  const auto e_fam = std::vector<Character>{Character::of({{1, w}}), Character::of({{2, 1}, {1, w}})};
  std::vector<std::unique_ptr<Learner>> roster;
  roster.push_back(std::make_unique<ConstantLearner>(five_w()));
  roster.push_back(std::make_unique<ParityLearner>(five_w(), five_w_two()));
  roster.push_back(std::make_unique<EchoLearner>());
  roster.push_back(std::make_unique<MLearner>(e_fam, false));
  roster.push_back(std::make_unique<TwoStageLearner>());
  for (const auto& l : roster) {
    const auto r = diagonalize(*l, 2, 150).report;
    EXPECT_TRUE(r.consistent()) << l->name() << " m=" << r.expansionary.size();
  }
}

TEST(Locking, ConstantIsCandidate) {
  ConstantLearner l(five_w());
  const Prefix empty{PresentationKind::Informant, {}};
  const auto v = weak_locking_search(l, five_w(), empty, 50, 4);
  EXPECT_TRUE(v.is_candidate());
  EXPECT_TRUE(v.sigma.items.empty());
  EXPECT_GT(v.explored, 50u);
}

TEST(Locking, TwoStageViolatorOnTwoClasses) {
  TwoStageLearner l;
  const auto v = weak_locking_search(l, Character::infinite_classes(2), Prefix{}, 50, 4);
  ASSERT_FALSE(v.is_candidate());
  EXPECT_EQ(v.tau.items.back().kind, Item::Kind::Negative);
  l.reset();
  for (const auto& it : v.tau.items) l.feed(it);
  EXPECT_EQ(l.current(), Character::infinite_classes(2));
  // On [ω:1] no extension can separate two elements.
  EXPECT_TRUE(weak_locking_search(l, Character::infinite_classes(1), Prefix{}, 50, 4).is_candidate());
  Prefix bad{PresentationKind::Informant, {Item::negative(0, 1)}};
  EXPECT_THROW(weak_locking_search(l, Character::infinite_classes(1), bad, 5, 2), PreconditionError);
}

TEST(Locking, MStarLocksAfterSeparator) {
  const auto a = Character::of({{5, w}, {6, 2}}), b = Character::of({{5, w}, {7, 1}});
  MStarLearner l({a, b});
  // A 5-block and a 7-block, fully labelled.
  auto s = fair_informant(Character::of({{5, 1}, {7, 1}}), 0);
  Prefix sigma{PresentationKind::Informant, {}};
  for (int n = 0; n < 144; ++n) sigma.items.push_back(*s->next());
  ASSERT_EQ(state_of(sigma).element_count(), 12u);
  const auto v = weak_locking_search(l, b, sigma, 50, 3);
  EXPECT_TRUE(v.is_candidate()) << v.to_string();
}

TEST(Locking, ChainEndsOnCandidate) {
  TwoStageLearner l;
  const auto chain = find_locking_candidate(l, Character::infinite_classes(2), Prefix{}, 10, 4, 5);
  EXPECT_EQ(chain.violators.size(), 1u);
  ASSERT_TRUE(chain.candidate.has_value());
  EXPECT_EQ(chain.candidate->sigma, chain.violators[0].tau);
}

TEST(LockingTransform, SameFinalConjectures) {
  const auto a = Character::of({{5, w}, {6, 2}}), b = Character::of({{5, w}, {7, 1}});
  for (const auto& t : {a, b})
    for (std::uint64_t seed : {0, 1, 2}) {
      MStarLearner base({a, b});
      LockingTransform tr(base.clone());
      auto s1 = fair_informant(t, seed);
      auto s2 = fair_informant(t, seed);
      const auto r1 = run_simulation(base, *s1, 6000, t);
      const auto r2 = run_simulation(tr, *s2, 6000, t);
      ASSERT_TRUE(r1.converged);
      EXPECT_TRUE(r2.converged);
      EXPECT_EQ(r1.trace.conjectures.back(), r2.trace.conjectures.back());
      EXPECT_LE(tr.sigma_length(), r2.stage + 1);
    }
  ConstantLearner c(five_w());
  LockingTransform tc(c.clone());
  auto s = fair_informant(five_w(), 0);
  EXPECT_EQ(run_simulation(tc, *s, 500, five_w()).mind_changes, 0u);
  EXPECT_EQ(tc.extensions(), 0u);
}

TEST(TxtAdversary, Constants) {
  const auto one = Character::infinite_classes(1), two = Character::infinite_classes(2);
  TxtAdversaryOptions opt;
  opt.horizon = 2000;
  const auto r1 = txt_adversary(TxtLearner(std::make_unique<ConstantLearner>(one)), opt);
  EXPECT_EQ(r1.verdict_string(), "defeated");
  EXPECT_EQ(r1.wrong_on, two);
  const auto r2 = txt_adversary(TxtLearner(std::make_unique<ConstantLearner>(two)), opt);
  EXPECT_EQ(r2.verdict_string(), "defeated");
  EXPECT_EQ(r2.wrong_on, one);
  PrefixState st;
  for (const auto& it : r1.trace.items) ASSERT_NO_THROW(st.push(it));
  EXPECT_EQ(st.class_count(), 2u);
}

TEST(TxtAdversary, TwoStageThroughReordering) {
  TxtAdversaryOptions opt;
  opt.horizon = 2000;
  const auto r = txt_adversary(TxtLearner(std::make_unique<TwoStageLearner>()), opt);
  EXPECT_TRUE(r.defeated()) << r.verdict_string();
}

}  // namespace
