#include <gtest/gtest.h>

#include "limitlearn/separability.hpp"

using namespace limitlearn;

namespace {

const ExtNat w = kOmega;

Character five_w() { return Character::of({{5, w}}); }
Character five_w_two() { return Character::of({{5, w}, {2, 1}}); }
Character ex1_a() { return Character::of({{5, w}, {6, 2}}); }
Character ex1_b() { return Character::of({{5, w}, {7, 1}}); }
Character kron(std::uint64_t i) { return Character(1, {{i, 0}}, 0); }

std::vector<Character> kron_slice(std::uint64_t m) {
  std::vector<Character> out;
  for (std::uint64_t i = 1; i <= m; ++i) out.push_back(kron(i));
  return out;
}

TEST(Limits, FiniteFamily) {
  EXPECT_EQ(is_limit_finite(five_w(), {five_w_two()}), five_w_two());
  EXPECT_EQ(is_limit_finite(ex1_a(), {ex1_b()}), std::nullopt);
  EXPECT_EQ(is_limit_finite(ex1_b(), {ex1_b()}), std::nullopt);
  EXPECT_THROW(is_limit_finite(Character::infinite_classes(1), {five_w()}), PreconditionError);
}

TEST(Limits, Generators) {
  auto v = is_limit_infinite_bounded(five_w(), generators::five_n_tail(), 8);
  EXPECT_EQ(v.kind, BoundedVerdict::Kind::Limit);
  EXPECT_FALSE(v.heuristic);
  v = is_limit_infinite_bounded(five_w(), generators::six_n(), 32);
  EXPECT_EQ(v.kind, BoundedVerdict::Kind::NotLimit);
  EXPECT_EQ(v.refuting_member, 0u);
  for (std::int64_t i = 1; i <= 4; ++i)
    EXPECT_EQ(is_limit_infinite_bounded(kron(i), generators::kronecker(i), 32).kind, BoundedVerdict::Kind::Limit);
}

TEST(Limits, RegistryRefutesComponent) {
  // [6:2] has ⟨6,2⟩, which no kronecker member contains.
  auto v = is_limit_infinite_bounded(Character(1, {{6, 2}}, 0), generators::kronecker(), 40);
  EXPECT_EQ(v.kind, BoundedVerdict::Kind::NotLimit);
  ASSERT_TRUE(v.refuting_component.has_value());
  EXPECT_EQ(*v.refuting_component, (Component{6, 2}));
}

TEST(Limits, WithoutPredicateIsHeuristicOrUnknown) {
  auto g = generators::five_n_tail();
  g.recurs = nullptr;
  auto v = is_limit_infinite_bounded(five_w(), g, 32);
  EXPECT_EQ(v.kind, BoundedVerdict::Kind::Limit);
  EXPECT_TRUE(v.heuristic);
  auto k = generators::kronecker(2);
  k.recurs = nullptr;
  // ⟨6,2⟩ never appears in a kronecker member.
  EXPECT_EQ(is_limit_infinite_bounded(Character(1, {{6, 2}}, 0), k, 40).kind, BoundedVerdict::Kind::Unknown);
  EXPECT_THROW(is_limit_infinite_bounded(five_w(), Generator{}, 4), PreconditionError);
}

TEST(Separability, Examples) {
  auto r = finitely_separable({five_w_two(), five_w()});
  EXPECT_FALSE(r.separable);
  ASSERT_TRUE(r.counterexample.has_value());
  EXPECT_EQ(r.counterexample->first, five_w());
  EXPECT_EQ(r.counterexample->second, five_w_two());
  EXPECT_TRUE(finitely_separable({ex1_a(), ex1_b()}).separable);
  for (std::uint64_t m = 1; m <= 6; ++m) EXPECT_TRUE(finitely_separable(kron_slice(m)).separable);
}

TEST(Separability, AntiChain) {
  EXPECT_TRUE(fin_antichain({ex1_a(), ex1_b()}));
  EXPECT_FALSE(fin_antichain({five_w(), Character::of({{6, w}})}));
  EXPECT_TRUE(fin_antichain({five_w()}));
  // Every pair of kronecker members is ↪fin-comparable both ways.
  EXPECT_FALSE(fin_antichain(kron_slice(2)));
}

TEST(Separators, Examples) {
  EXPECT_EQ(separator_of(kron(1), kron_slice(2)).components, (std::set<Component>{{2, 1}}));
  EXPECT_TRUE(separator_of(ex1_b(), {ex1_b()}).components.empty());
  // These two are ↪fin-incomparable (2 vs 1 classes of size >= 6, 0 vs 1 of
  // size >= 7), so neither is in the other's ≈fin-class and the separator is empty.
  EXPECT_FALSE(fin_embeds(ex1_a(), ex1_b()));
  EXPECT_FALSE(fin_embeds(ex1_b(), ex1_a()));
  EXPECT_TRUE(separator_of(ex1_b(), {ex1_a(), ex1_b()}).components.empty());
  EXPECT_THROW(separator_of(five_w(), {five_w(), five_w_two()}), PreconditionError);
  EXPECT_THROW(separator_of(ex1_a(), {ex1_b()}), PreconditionError);
}

TEST(Separators, Realized) {
  Separator empty{ex1_b(), {}};
  EXPECT_TRUE(separator_realized(empty, FiniteStructure(2, {{0}, {1}})));
  Separator seven{ex1_b(), {{7, 1}}};
  EXPECT_TRUE(separator_realized(seven, FiniteStructure::from_block_sizes({5, 7})));
  EXPECT_FALSE(separator_realized(seven, FiniteStructure::from_block_sizes({5, 5})));
}

TEST(Separators, AntiChainWithinFinClass) {
  for (std::uint64_t m = 2; m <= 6; ++m) {
    const auto fam = kron_slice(m);
    std::vector<Separator> seps;
    for (const auto& c : fam) seps.push_back(separator_of(c, fam));
    for (std::size_t i = 0; i < seps.size(); ++i) {
      EXPECT_EQ(seps[i].components.size(), m - 1);
      for (std::size_t j = 0; j < seps.size(); ++j) {
        if (i == j) continue;
        EXPECT_FALSE(std::includes(seps[j].components.begin(), seps[j].components.end(),
                                   seps[i].components.begin(), seps[i].components.end()));
      }
    }
  }
}

TEST(Separability, SubfamilyMonotoneAndFinImpliesEx) {
  const std::vector<std::vector<Character>> corpus = {
      {ex1_a(), ex1_b()},
      {five_w(), Character::of({{6, w}})},
      {five_w(), five_w_two()},
      {five_w(), five_w_two(), ex1_a()},
      kron_slice(4),
      {Character::of({{3, 2}}), Character::of({{3, 1}, {2, 1}}), Character::of({{1, 4}})},
  };
  for (const auto& fam : corpus) {
    const bool sep = finitely_separable(fam).separable;
    if (fin_antichain(fam)) {
      EXPECT_TRUE(sep);
    }
    if (!sep) continue;
    for (std::size_t mask = 1; mask < (1u << fam.size()); ++mask) {
      std::vector<Character> sub;
      for (std::size_t i = 0; i < fam.size(); ++i)
        if (mask & (1u << i)) sub.push_back(fam[i]);
      EXPECT_TRUE(finitely_separable(sub).separable);
    }
  }
}

TEST(Family, RejectsDuplicates) {
  Family f{{five_w(), Character(0, {{5, w}, {3, 0}}, 0)}, std::nullopt};
  EXPECT_THROW(f.validate(), RepresentationError);
  EXPECT_THROW(make_generator("nope"), std::invalid_argument);
  EXPECT_EQ(make_generator("kronecker", {{"exclude", 3}}).member(2), kron(4));
}

}  // namespace
