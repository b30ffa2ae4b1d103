#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "autfix/stallings.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace autfix;

namespace {

SubgroupGraph g2(std::string_view s) { return fold(parse_word_list(s, 2), 2); }
SubgroupGraph g3(std::string_view s) { return fold(parse_word_list(s, 3), 3); }

// Checks folded and core invariants directly on the transition table.
void expect_folded_core(const SubgroupGraph& g) {
  const int n = g.ambient_rank();
  for (int v = 0; v < g.vertex_count(); ++v) {
    int degree = 0;
    for (int k = 0; k < 2 * n; ++k) {
      Letter l = Letter::from_key(k);
      int t = g.target(v, l);
      if (t == SubgroupGraph::kNone) continue;
      ++degree;
      EXPECT_EQ(g.target(t, l.inverse()), v);
    }
    if (v != 0) EXPECT_GE(degree, 2);
  }
}

}  // namespace

TEST(Fold, Examples) {
  auto a = g2("x");
  EXPECT_EQ(a.vertex_count(), 1);
  EXPECT_EQ(a.rank(), 1);
  auto b = g2("x, y x Y");
  EXPECT_EQ(b.rank(), 2);
  EXPECT_FALSE(member(b, parse_word("y", 2)));
  auto e = fold(std::vector<Word>{}, 2);
  EXPECT_EQ(e.vertex_count(), 1);
  EXPECT_EQ(e.rank(), 0);
  EXPECT_FALSE(member(g2("x^2"), parse_word("x", 2)));
  EXPECT_EQ(rank(g3("x, y x Y, z x Z")), 3);
  EXPECT_EQ(to_string(basis(g2("x^2, x^3"))), "x");
}

TEST(Fold, Intersections) {
  EXPECT_EQ(intersect(g2("x^2"), g2("x^3")), g2("x^6"));
  EXPECT_EQ(intersect(g2("x, y x Y"), g2("x, y")), g2("x, y x Y"));
  auto i = intersect(g3("x, z, y x Y"), g3("x, y, z x Z"));
  EXPECT_EQ(i, g3("x, y x Y, z x Z"));
  EXPECT_THROW(intersect(g2("x"), g3("x")), RankMismatch);
}

TEST(Fold, Equality) {
  EXPECT_TRUE(equal_subgroups(g2("x, y"), g2("y, x")));
  EXPECT_FALSE(equal_subgroups(g2("x^2"), g2("x")));
  EXPECT_FALSE(equal_subgroups(g2("x y"), g2("y x")));
}

TEST(Fold, ConfluentUnderPermutation) {
  std::mt19937 rng(12);
  for (int t = 0; t < 200; ++t) {
    std::vector<Word> gens;
    for (int i = 0; i < 1 + t % 4; ++i) gens.push_back(sample::random_word(rng, 3, 6));
    auto a = fold(gens, 3);
    std::shuffle(gens.begin(), gens.end(), rng);
    auto b = fold(gens, 3);
    EXPECT_TRUE(equal_subgroups(a, b));
    EXPECT_EQ(a, b);
    expect_folded_core(a);
    EXPECT_EQ(fold(basis(a), 3), a);
  }
}

TEST(Fold, MembershipMatchesProducts) {
  std::mt19937 rng(13);
  for (int t = 0; t < 25; ++t) {
    std::vector<Word> gens;
    std::vector<oracle::Seq> seqs;
    for (int i = 0; i < 2; ++i) {
      gens.push_back(sample::random_nontrivial_word(rng, 2, 4));
      seqs.push_back(oracle::to_seq(gens.back()));
    }
    auto g = fold(gens, 2);
    for (const auto& s : oracle::products(seqs, 4, 8)) {
      EXPECT_TRUE(g.accepts(oracle::to_word(s, 2)));
    }
  }
}

TEST(Fold, IntersectionAgreesWithMembership) {
  std::mt19937 rng(14);
  auto all = oracle::all_reduced(2, 7);
  for (int t = 0; t < 20; ++t) {
    auto a = fold(std::vector<Word>{sample::random_nontrivial_word(rng, 2, 4), sample::random_nontrivial_word(rng, 2, 4)}, 2);
    auto b = fold(std::vector<Word>{sample::random_nontrivial_word(rng, 2, 4), sample::random_nontrivial_word(rng, 2, 4)}, 2);
    auto i = intersect(a, b);
    EXPECT_LE(i.rank(), std::max(1, (a.rank() - 1) * (b.rank() - 1) + 1) + a.rank() * b.rank());
    for (const auto& s : all) {
      Word w = oracle::to_word(s, 2);
      EXPECT_EQ(i.accepts(w), a.accepts(w) && b.accepts(w));
    }
  }
}

TEST(Fold, DotOutput) {
  auto dot = g2("x^2").to_dot();
  EXPECT_NE(dot.find("0 [shape=doublecircle]"), std::string::npos);
  EXPECT_NE(dot.find("0 -> 1 [label=\"x\"]"), std::string::npos);
  EXPECT_NE(dot.find("1 -> 0 [label=\"x\"]"), std::string::npos);
}
