#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "dgc/mrass.hpp"

using namespace dgc;

namespace {

ClassField sparse_field(Index rows, Index cols, int n_classes, std::initializer_list<std::tuple<Index, Index, int>> cells) {
  LabelArray L = LabelArray::Zero(rows, cols);
  Mask M = Mask::Constant(rows, cols, false);
  for (auto [r, c, q] : cells) {
    L(r, c) = q;
    M(r, c) = true;
  }
  return ClassField(L, M, n_classes);
}

// Brute force: the first stencil size with a unique plurality label, or the
// tied set at m_max (empty when no sampled cell is in range).
std::pair<int, std::set<int>> reference(const ClassField& f, Cell s, int m_max) {
  std::set<int> tied;
  for (Index l = 1; 2 * l + 1 <= m_max; ++l) {
    std::map<int, int> count;
    for (Index r = s.row - l; r <= s.row + l; ++r)
      for (Index c = s.col - l; c <= s.col + l; ++c)
        if (f.in_bounds(r, c) && f.is_sampled(r, c)) ++count[f.label(r, c)];
    if (count.empty()) continue;
    int best = 0;
    for (auto [q, n] : count) best = std::max(best, n);
    tied.clear();
    for (auto [q, n] : count)
      if (n == best) tied.insert(q);
    if (tied.size() == 1) return {*tied.begin(), tied};
  }
  return {0, tied};
}

}  // namespace

TEST(Mrass, SingleNeighbor) {
  const auto f = sparse_field(5, 5, 8, {{1, 1, 3}});
  Rng rng = make_rng(1);
  const auto out = mrass_initialize(f, {}, rng);
  EXPECT_EQ(out.label(2, 2), 3);
  EXPECT_EQ(out.label(0, 0), 3);
  EXPECT_EQ(out.label(1, 1), 3);
  EXPECT_TRUE(out.fully_labeled());
}

TEST(Mrass, TiedSetAtMaxStencil) {
  // 3x3 around (3,3) holds {2,2,5,5}; nothing else within m_max = 7
  std::map<int, int> seen;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto f = sparse_field(7, 7, 8, {{2, 2, 2}, {2, 4, 2}, {4, 2, 5}, {4, 4, 5}});
    Rng rng = make_rng(seed);
    ++seen[mrass_initialize(f, {7}, rng).label(3, 3)];
  }
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_GT(seen[2], 150);
  EXPECT_GT(seen[5], 150);
}

TEST(Mrass, LargerStencilBreaksTie) {
  // tie in 3x3, an extra 2 at distance 2 decides it
  const auto f = sparse_field(7, 7, 8, {{2, 3, 2}, {4, 3, 5}, {1, 3, 2}});
  Rng rng = make_rng(0);
  EXPECT_EQ(mrass_initialize(f, {5}, rng).label(3, 3), 2);
}

TEST(Mrass, EmptyStencilDrawsFromAllLabels) {
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto f = sparse_field(9, 9, 4, {{0, 0, 1}});
    Rng rng = make_rng(seed);
    const int q = mrass_initialize(f, {3}, rng).label(8, 8);
    ASSERT_GE(q, 1);
    ASSERT_LE(q, 4);
    seen.insert(q);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Mrass, FullySampledIsIdentity) {
  LabelArray L(3, 4);
  L << 1, 2, 3, 1, 2, 2, 3, 3, 1, 1, 1, 2;
  const ClassField f(L, Mask::Constant(3, 4, true), 3);
  Rng rng = make_rng(3);
  EXPECT_TRUE((mrass_initialize(f, {}, rng).labels() == L).all());
}

TEST(Mrass, MatchesBruteForceAndIsDeterministic) {
  std::mt19937_64 gen(33);
  for (int t = 0; t < 30; ++t) {
    const Index rows = 6 + t % 7, cols = 5 + t % 4;
    const int nc = 2 + t % 6;
    std::uniform_int_distribution<int> lab(1, nc);
    std::bernoulli_distribution keep(0.15 + 0.02 * t);
    LabelArray L = LabelArray::Zero(rows, cols);
    Mask M(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c)
        if ((M(r, c) = keep(gen))) L(r, c) = lab(gen);
    const ClassField f(L, M, nc);
    const int m_max = 3 + 2 * (t % 3);
    Rng a = make_rng(t), b = make_rng(t);
    const auto out = mrass_initialize(f, {m_max}, a);
    EXPECT_TRUE((out.labels() == mrass_initialize(f, {m_max}, b).labels()).all());
    EXPECT_TRUE(out.fully_labeled());
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        if (M(r, c)) {
          EXPECT_EQ(out.label(r, c), L(r, c));
          continue;
        }
        const auto [want, tied] = reference(f, {r, c}, m_max);
        if (want != 0)
          EXPECT_EQ(out.label(r, c), want) << r << "," << c;
        else if (!tied.empty())
          EXPECT_TRUE(tied.count(out.label(r, c))) << r << "," << c;
      }
  }
}

TEST(Mrass, ConfigValidation) {
  EXPECT_THROW(validate(MrassConfig{4}), InvalidArgument);
  EXPECT_THROW(validate(MrassConfig{1}), InvalidArgument);
  EXPECT_NO_THROW(validate(MrassConfig{3}));
}
