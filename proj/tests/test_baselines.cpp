#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "dgc/baselines.hpp"
#include "dgc/synth.hpp"

using namespace dgc;

namespace {

std::vector<Cell> brute_nearest(const Mask& m, Cell q, int k) {
  std::vector<std::tuple<Index, Index, Index>> all;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (m(r, c)) all.emplace_back((r - q.row) * (r - q.row) + (c - q.col) * (c - q.col), r, c);
  std::sort(all.begin(), all.end());
  std::vector<Cell> out;
  for (int i = 0; i < k && i < static_cast<int>(all.size()); ++i) out.push_back({std::get<1>(all[i]), std::get<2>(all[i])});
  return out;
}

Raster thinned(std::uint64_t seed, double p = 40.0) {
  return random_thin(generate_field(20, 20, MaternSpec{}, seed), p, seed).sample;
}

}  // namespace

TEST(NearestCells, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution on(0.2);
  for (int t = 0; t < 40; ++t) {
    Mask m(12, 9);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = on(rng);
    for (Index r = 0; r < 12; ++r)
      for (Index c = 0; c < 9; ++c)
        for (int k : {1, 3, 7}) ASSERT_EQ(nearest_cells(m, {r, c}, k), brute_nearest(m, {r, c}, k));
  }
}

TEST(Knn, MajorityAndTies) {
  LabelArray L = LabelArray::Zero(3, 3);
  Mask M = Mask::Constant(3, 3, false);
  auto put = [&](Index r, Index c, int q) { L(r, c) = q, M(r, c) = true; };
  put(0, 1, 7);
  put(1, 0, 7);
  put(1, 2, 2);
  // (1,1) is the third prediction cell in row-major order
  EXPECT_EQ(knn_predict(ClassField(L, M, 8), 3)(2), 7);

  put(2, 1, 2);
  const ClassField g(L, M, 8);
  EXPECT_EQ(knn_predict(g, 4)(2), 2);  // 2-2 tie goes to the smaller label
  EXPECT_EQ(knn_predict(g, 1)(2), 7);  // (0,1) comes first among equidistant cells
  EXPECT_THROW(knn_predict(g, 5), InvalidArgument);
}

TEST(Knn, KOneEqualsDiscretizedNn) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Raster g = thinned(s);
    const auto th = build_thresholds(g, 8);
    const ClassField f = discretize(g, th);
    const Eigen::VectorXd nn = nn_interpolate(g);
    const Eigen::VectorXi knn = knn_predict(f, 1);
    for (Index p = 0; p < nn.size(); ++p) EXPECT_EQ(knn(p), classify(nn(p), th));
  }
}

TEST(Knn, CrossValidationDeterministic) {
  const Raster g = thinned(7);
  const ClassField f = discretize(g, build_thresholds(g, 8));
  Rng a = make_rng(1), b = make_rng(1);
  const auto ra = knn_classify(f, {}, a), rb = knn_classify(f, {}, b);
  EXPECT_EQ(ra.k, rb.k);
  EXPECT_EQ(ra.cv_error, rb.cv_error);
  EXPECT_TRUE(ra.labels == rb.labels);
  EXPECT_EQ(ra.cv_error.size(), 8u);
  const auto best = std::min_element(ra.cv_error.begin(), ra.cv_error.end()) - ra.cv_error.begin();
  EXPECT_EQ(ra.k, KnnConfig{}.k_candidates[static_cast<std::size_t>(best)]);
  EXPECT_TRUE(ra.labels == knn_predict(f, ra.k));
  for (double e : ra.cv_error) {
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
}

TEST(Knn, TooFewSamples) {
  LabelArray L = LabelArray::Zero(4, 4);
  Mask M = Mask::Constant(4, 4, false);
  for (int i = 0; i < 6; ++i) L.data()[i] = 1, M.data()[i] = true;
  Rng rng = make_rng(0);
  EXPECT_THROW(knn_classify(ClassField(L, M, 2), {}, rng), InvalidArgument);
}

TEST(Nn, ExamplesAndTieBreak) {
  GridArray<double> v = GridArray<double>::Zero(3, 3);
  Mask m = Mask::Constant(3, 3, false);
  v(0, 1) = 4, m(0, 1) = true;
  v(1, 0) = 6, m(1, 0) = true;
  const Raster g(v, m);
  const auto out = nn_interpolate(g);
  // missing in row-major: (0,0) (0,2) (1,1) (1,2) (2,0) (2,1) (2,2)
  EXPECT_EQ(out(0), 4);  // tie, (0,1) first
  EXPECT_EQ(out(1), 4);
  EXPECT_EQ(out(2), 4);  // tie
  EXPECT_EQ(out(4), 6);
  EXPECT_EQ(nn_interpolate(Raster::fully_sampled(v)).size(), 0);
  EXPECT_THROW(nn_interpolate(Raster(2, 2)), InvalidArgument);
}

TEST(Idw, Examples) {
  GridArray<double> v = GridArray<double>::Zero(1, 3);
  Mask m = Mask::Constant(1, 3, true);
  v << 10, 0, 20;
  m(0, 1) = false;
  const Raster g(v, m);
  EXPECT_DOUBLE_EQ(idw_interpolate(g)(0), 15.0);

  Mask one = Mask::Constant(1, 3, false);
  one(0, 2) = true;
  EXPECT_DOUBLE_EQ(idw_interpolate(Raster(v, one))(0), 20.0);
  EXPECT_DOUBLE_EQ(idw_interpolate(Raster(v, one), 2.0, 2.0)(0), 20.0);
  EXPECT_THROW(idw_interpolate(Raster(v, one), 2.0, 1.5), InvalidArgument);
  EXPECT_THROW(idw_interpolate(g, 0.0), InvalidArgument);
}

TEST(Idw, HandWeights) {
  GridArray<double> v = GridArray<double>::Zero(1, 4);
  Mask m = Mask::Constant(1, 4, false);
  v(0, 0) = 10, m(0, 0) = true;
  v(0, 3) = 40, m(0, 3) = true;
  const auto out = idw_interpolate(Raster(v, m));
  // (0,1): d = 1, 2 -> w = 1, 1/4
  EXPECT_NEAR(out(0), (10 + 40 / 4.0) / 1.25, 1e-12);
  EXPECT_NEAR(out(1), (10 / 4.0 + 40) / 1.25, 1e-12);
}

TEST(Idw, ConvexHull) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Raster g = thinned(s, 60.0);
    const auto vals = g.sampled_values();
    const double lo = *std::min_element(vals.begin(), vals.end()), hi = *std::max_element(vals.begin(), vals.end());
    for (double p : {1.0, 2.0, 3.5})
      for (const auto& out : {idw_interpolate(g, p), idw_interpolate(g, p, 4.0)}) {
        EXPECT_GE(out.minCoeff(), lo - 1e-12);
        EXPECT_LE(out.maxCoeff(), hi + 1e-12);
      }
  }
}
