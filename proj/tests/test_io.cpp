#include <gtest/gtest.h>

#include <random>

#include "limitlearn/io.hpp"
#include "oracles.hpp"

using namespace limitlearn;

namespace {

const ExtNat w = kOmega;

TEST(CharacterJson, ObjectAndShorthand) {
  const auto c = character_from_json(json::parse(R"({"default": 1, "exceptions": {"3": 0}, "omega_count": 0})"));
  EXPECT_EQ(c, Character(1, {{3, 0}}, 0));
  const auto s = character_from_json(json::parse(R"([[5, "omega"], [2, 1]])"));
  EXPECT_EQ(s, Character::of({{5, w}, {2, 1}}));
  const auto o = character_from_json(json::parse(R"([["omega", 2]])"));
  EXPECT_EQ(o, Character::infinite_classes(2));
  EXPECT_EQ(character_from_json(json::parse("[]")), Character());
}

TEST(CharacterJson, RoundTripRandom) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 500; ++t) {
    const auto c = oracle::random_character(rng, 6, true);
    EXPECT_EQ(character_from_json(json::parse(to_json(c).dump())), c);
    EXPECT_EQ(parse_character_arg(c.to_string()), c) << c.to_string();
  }
}

TEST(CharacterJson, Errors) {
  EXPECT_THROW(character_from_json(json::parse(R"([[0, 1]])")), RepresentationError);
  EXPECT_THROW(character_from_json(json::parse(R"({"exceptions": {"0": 1}})")), RepresentationError);
  // Non-canonical: exception equal to the default.
  EXPECT_THROW(character_from_json(json::parse(R"({"default": 1, "exceptions": {"4": 1}})")), RepresentationError);
  EXPECT_THROW(character_from_json(json::parse(R"([[2, 1], [2, 3]])")), RepresentationError);
  EXPECT_THROW(character_from_json(json::parse(R"([[2, -1]])")), RepresentationError);
  EXPECT_THROW(character_from_json(json::parse(R"([[2, "lots"]])")), ParseError);
  EXPECT_THROW(character_from_json(json::parse(R"({"defualt": 1})")), ParseError);
  EXPECT_THROW(character_from_json(json::parse(R"({"exceptions": {"x": 1}})")), ParseError);
  EXPECT_THROW(character_from_json(json::parse("7")), ParseError);
  EXPECT_THROW(parse_character_arg("[5:w"), ParseError);
  EXPECT_THROW(parse_character_arg("[0:1]"), RepresentationError);
}

TEST(FamilyJson, MembersAndGenerator) {
  const auto f = family_from_json(json::parse(R"({"members": [[[5, "omega"], [6, 2]], [[5, "omega"], [7, 1]]]})"));
  ASSERT_EQ(f.members.size(), 2u);
  EXPECT_EQ(f.members[1], Character::of({{5, w}, {7, 1}}));
  EXPECT_FALSE(f.generator.has_value());

  const auto g = family_from_json(json::parse(R"({"generator": {"name": "kronecker", "params": {"exclude": 2}}})"));
  ASSERT_TRUE(g.generator.has_value());
  EXPECT_EQ(g.generator->member(1), Character(1, {{3, 0}}, 0));
  const auto back = family_from_json(json::parse(to_json(g).dump()));
  EXPECT_EQ(back.generator->params, g.generator->params);

  EXPECT_THROW(family_from_json(json::parse(R"({"generator": {"name": "nope"}})")), ParseError);
  EXPECT_THROW(family_from_json(json::parse(R"({"generator": {"name": "six_n", "params": {"n": 1}}})")), ParseError);
  EXPECT_THROW(family_from_json(json::parse(R"({"members": [[[5, 1]], [[5, 1]]]})")), RepresentationError);
  EXPECT_THROW(family_from_json(json::parse(R"({})")), ParseError);
  EXPECT_THROW(parse_json_text("{\"members\": [", "f.json"), ParseError);
}

TEST(LanguageJson, Shape) {
  const auto l = Language::of(Character(1, {{3, 0}}, 0), FinitePermutation::transposition(0, 2));
  const auto j = to_json(l);
  EXPECT_EQ(j["permutation"], json::parse("[[0, 2], [2, 0]]"));
  EXPECT_EQ(j["g"]["prefix"], json::parse("[1, 2]"));
  EXPECT_EQ(j["g"]["streams"][0]["ascending_from"], 4);
}

TEST(TraceText, MarksMindChanges) {
  Trace t;
  t.record(Item::positive(0, 0), std::nullopt);
  t.record(Item::positive(0, 1), Character::of({{2, 1}}));
  t.record(Item::pause(), Character::of({{2, 1}}));
  std::ostringstream os;
  write_trace(os, t);
  EXPECT_EQ(os.str(), "stage 0: ?\nstage 1: [2:1] MC\nstage 2: [2:1]\n");
}

}  // namespace
