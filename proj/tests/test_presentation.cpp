#include <gtest/gtest.h>

#include <sstream>

#include "limitlearn/presentation.hpp"

using namespace limitlearn;

namespace {

const ExtNat w = kOmega;

Character structure_char(const Prefix& p) { return char_of_finite(structure_from_prefix(p).structure); }

Prefix take(PresentationStream& s, std::size_t n) {
  Prefix p{s.kind(), {}};
  for (std::size_t i = 0; i < n; ++i) p.items.push_back(*s.next());
  return p;
}

TEST(Decode, Examples) {
  Prefix inf{PresentationKind::Informant, {Item::positive(0, 1), Item::negative(2, 3)}};
  EXPECT_EQ(structure_from_prefix(inf).structure, FiniteStructure(4, {{0, 1}, {2}, {3}}));
  Prefix txt{PresentationKind::Text, {Item::positive(0, 1), Item::positive(1, 2)}};
  EXPECT_EQ(structure_from_prefix(txt).structure, FiniteStructure(3, {{0, 1, 2}}));
  EXPECT_EQ(structure_from_prefix(Prefix{}).structure, FiniteStructure());
}

TEST(Decode, NamesAreNormalized) {
  Prefix p{PresentationKind::Informant, {Item::positive(40, 7), Item::pause(), Item::negative(7, 100)}};
  const auto d = structure_from_prefix(p);
  EXPECT_EQ(d.name_map.at(7), 0u);
  EXPECT_EQ(d.name_map.at(40), 1u);
  EXPECT_EQ(d.name_map.at(100), 2u);
  EXPECT_EQ(d.structure, FiniteStructure(3, {{0, 1}, {2}}));
}

TEST(Decode, InconsistencyReportsItem) {
  Prefix p{PresentationKind::Informant,
           {Item::positive(0, 1), Item::positive(2, 3), Item::negative(0, 3), Item::positive(1, 2)}};
  try {
    structure_from_prefix(p);
    FAIL();
  } catch (const InconsistentPrefix& e) {
    EXPECT_EQ(e.item_index, 3u);
  }
  Prefix q{PresentationKind::Informant, {Item::negative(4, 4)}};
  EXPECT_THROW(structure_from_prefix(q), InconsistentPrefix);
}

TEST(Decode, NegativesSurviveMerges) {
  PrefixState st;
  st.push(Item::negative(0, 5));
  st.push(Item::positive(0, 1));
  st.push(Item::positive(2, 1));
  EXPECT_THROW(st.push(Item::positive(5, 2), 7), InconsistentPrefix);
  EXPECT_EQ(st.class_count(), 2u);
}

TEST(Reorder, GoldenOrder) {
  Prefix txt{PresentationKind::Text, {Item::positive(0, 1), Item::positive(2, 3)}};
  const std::vector<Item> want = {
      Item::positive(0, 0), Item::positive(0, 1), Item::positive(1, 0), Item::positive(1, 1),
      Item::positive(2, 2), Item::positive(2, 3), Item::positive(3, 2), Item::positive(3, 3),
      Item::negative(0, 2), Item::negative(0, 3), Item::negative(1, 2), Item::negative(1, 3),
      Item::negative(2, 0), Item::negative(2, 1), Item::negative(3, 0), Item::negative(3, 1),
  };
  const auto got = reorder_to_informant(txt);
  EXPECT_EQ(got.kind, PresentationKind::Informant);
  EXPECT_EQ(got.items, want);
  EXPECT_TRUE(reorder_to_informant(Prefix{PresentationKind::Text, {}}).items.empty());
  EXPECT_EQ(reorder_to_informant(Prefix{PresentationKind::Text, {Item::positive(0, 0)}}).items,
            std::vector<Item>{Item::positive(0, 0)});
}

TEST(Reorder, ConsistentAndSameStructure) {
  FairStream s(Character::of({{3, w}, {1, 2}}), PresentationKind::Text, {4});
  Prefix txt{PresentationKind::Text, {}};
  for (int n = 0; n < 300; ++n) {
    txt.items.push_back(*s.next());
    const auto inf = reorder_to_informant(txt);
    EXPECT_EQ(structure_from_prefix(inf).structure, structure_from_prefix(txt).structure);
  }
}

TEST(Fair, SingletonsOnly) {
  FairStream s(Character::of({{1, w}}), PresentationKind::Informant, {3});
  for (int n = 0; n < 500; ++n) {
    auto it = *s.next();
    if (it.kind == Item::Kind::Positive) {
      EXPECT_EQ(it.x, it.y);
    }
  }
  FairStream t(Character::of({{1, w}}), PresentationKind::Text, {3});
  for (int n = 0; n < 500; ++n) {
    auto it = *t.next();
    EXPECT_NE(it.kind, Item::Kind::Negative);
    if (!it.is_pause()) {
      EXPECT_EQ(it.x, it.y);
    }
  }
}

TEST(Fair, PrefixesStayInsideCharacter) {
  const std::vector<Character> corpus = {
      Character::of({{5, w}}), Character::infinite_classes(2), Character::of({{5, w}, {7, 1}}),
      Character(1, {{2, 0}}, 0), Character::of({{2, 1}}), Character(2, {{1, 0}}, 1)};
  for (const auto& c : corpus)
    for (std::uint64_t seed : {0, 1, 2}) {
      for (const auto& opt : adversarial_reorders(seed)) {
        for (bool base : {true, false}) {
          FairStream s(c, PresentationKind::Informant, base ? StreamOptions{seed} : opt);
          PrefixState st;
          for (std::size_t n = 0; n < 3000; ++n) {
            ASSERT_NO_THROW(st.push(*s.next(), n));
            // Blocks under construction are smaller than their final size, so
            // the prefix can only be required to finitely embed.
            ASSERT_TRUE(fin_embeds(st.character(), c)) << c.to_string() << " " << n;
            if (c.omega_count() == ExtNat(2)) {
              ASSERT_LE(st.class_count(), 2u);
            }
          }
        }
      }
    }
}

TEST(Fair, SeedsAreReproducible) {
  auto a = take(*fair_informant(Character::of({{5, w}}), 0), 200);
  auto b = take(*fair_informant(Character::of({{5, w}}), 1), 200);
  EXPECT_EQ(a, take(*fair_informant(Character::of({{5, w}}), 0), 200));
  EXPECT_TRUE(fin_embeds(structure_char(a), Character::of({{5, w}})));
  EXPECT_TRUE(fin_embeds(structure_char(b), Character::of({{5, w}})));
  // Seeds shuffle the order in which pending classes are served.
  const auto mixed = Character::of({{2, w}, {3, w}, {4, w}});
  EXPECT_NE(take(*fair_informant(mixed, 0), 300), take(*fair_informant(mixed, 1), 300));
}

TEST(Fair, FiveOmegaTextReachesManyBlocks) {
  auto s = fair_text(Character::of({{5, w}}), 9);
  PrefixState st;
  for (int n = 0; n < 10000; ++n) st.push(*s->next());
  const auto& h = st.size_histogram();
  ASSERT_TRUE(h.count(5));
  EXPECT_GE(h.at(5), 20u);
  EXPECT_LE(h.size(), 2u);
}

TEST(Fair, FiniteTextEndsInPauses) {
  auto s = fair_text(Character::of({{2, 1}}), 0);
  std::size_t facts = 0;
  for (int n = 0; n < 100; ++n)
    if (!s->next()->is_pause()) ++facts;
  EXPECT_EQ(facts, 4u);
}

TEST(Fair, FiniteInformantCycles) {
  auto s = fair_informant(Character::of({{2, 1}, {1, 1}}), 0);
  PrefixState st;
  for (int n = 0; n < 100; ++n) ASSERT_TRUE(s->next().has_value());
  EXPECT_THROW(FairStream(Character(), PresentationKind::Text), PreconditionError);
}

TEST(TraceFormat, RoundTrip) {
  const auto p = take(*fair_text(Character::of({{3, 2}}), 1), 40);
  std::stringstream ss;
  write_items(ss, p.items);
  EXPECT_EQ(read_items(ss), p.items);
  std::stringstream bad("P 1 2\nQ 1 2\n");
  EXPECT_THROW(read_items(bad), ParseError);
}

}  // namespace
