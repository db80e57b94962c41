#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dgc/grid.hpp"
#include "dgc/rng.hpp"

using namespace dgc;

namespace {

Thresholds<double> th_0_8(int n) {
  std::vector<double> v{0.0, 3.0, 8.0, 5.0};
  return build_thresholds<double>(v, n);
}

}  // namespace

TEST(Thresholds, UniformPartition) {
  const auto th = th_0_8(4);
  ASSERT_EQ(th.levels.size(), 3);
  EXPECT_DOUBLE_EQ(th.levels(0), 2.0);
  EXPECT_DOUBLE_EQ(th.levels(1), 4.0);
  EXPECT_DOUBLE_EQ(th.levels(2), 6.0);
  EXPECT_DOUBLE_EQ(th.lo, 0.0);
  EXPECT_DOUBLE_EQ(th.hi, 8.0);

  const auto two = th_0_8(2);
  ASSERT_EQ(two.levels.size(), 1);
  EXPECT_DOUBLE_EQ(two.levels(0), 4.0);
}

TEST(Thresholds, ThousandClassesOnGaussianSample) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(50.0, 10.0);
  std::vector<double> v(1675);
  for (auto& x : v) x = g(rng);
  const auto th = build_thresholds<double>(v, 1000);
  ASSERT_EQ(th.levels.size(), 999);
  const double mn = *std::min_element(v.begin(), v.end()), mx = *std::max_element(v.begin(), v.end());
  const double w = (mx - mn) / 1000.0;
  EXPECT_GT(th.levels(0), mn);
  EXPECT_LT(th.levels(998), mx);
  for (int k = 1; k <= 1000; ++k) EXPECT_NEAR(th.t(k + 1) - th.t(k), w, 1e-9 * (mx - mn));
}

TEST(Thresholds, Errors) {
  std::vector<double> flat{2.0, 2.0, 2.0};
  EXPECT_THROW(build_thresholds<double>(flat, 4), InvalidArgument);
  std::vector<double> ok{0.0, 1.0};
  EXPECT_THROW(build_thresholds<double>(ok, 1), InvalidArgument);
  EXPECT_THROW(build_thresholds<double>(std::vector<double>{}, 4), InvalidArgument);
}

TEST(Classify, Boundaries) {
  const auto th = th_0_8(4);
  EXPECT_EQ(classify(2.0, th), 1);  // right-closed
  EXPECT_EQ(classify(2.0000001, th), 2);
  EXPECT_EQ(classify(5.0, th), 3);
  EXPECT_EQ(classify(6.0, th), 3);
  EXPECT_EQ(classify(-100.0, th), 1);
  EXPECT_EQ(classify(100.0, th), 4);
  EXPECT_EQ(classify(0.0, th), 1);
  EXPECT_EQ(classify(8.0, th), 4);
}

TEST(BackTransform, Midpoints) {
  const auto th = th_0_8(4);
  EXPECT_DOUBLE_EQ(back_transform(1, th), 1.0);
  EXPECT_DOUBLE_EQ(back_transform(2, th), 3.0);
  EXPECT_DOUBLE_EQ(back_transform(3, th), 5.0);
  EXPECT_DOUBLE_EQ(back_transform(4, th), 7.0);
  EXPECT_THROW(back_transform(0, th), InvalidArgument);
  EXPECT_THROW(back_transform(5, th), InvalidArgument);
}

TEST(BackTransform, RoundTripWithinOneWidth) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 11.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(40);
    for (auto& x : v) x = u(rng);
    const int n = 2 + trial % 20;
    const auto th = build_thresholds<double>(v, n);
    int prev = 0;
    for (int k = 1; k <= n; ++k) {
      EXPECT_GT(back_transform(k, th), k > 1 ? back_transform(k - 1, th) : -1e300);
      prev = k;
    }
    EXPECT_EQ(prev, n);
    for (double x : v) {
      const int q = classify(x, th);
      ASSERT_GE(q, 1);
      ASSERT_LE(q, n);
      EXPECT_LE(std::abs(x - back_transform(q, th)), th.width() + 1e-12);
      // the interval actually contains x
      if (q > 1) EXPECT_GT(x, th.t(q));
      if (q < n) EXPECT_LE(x, th.t(q + 1));
    }
  }
}

TEST(RasterGrid, MaskAndValues) {
  GridArray<double> v(2, 3);
  v << 1, 2, 3, 4, 5, 6;
  Mask m(2, 3);
  m << true, false, true, true, true, false;
  Raster g(v, m);
  EXPECT_EQ(g.n_sampled(), 4);
  EXPECT_EQ(g.n_missing(), 2);
  EXPECT_TRUE(std::isnan(g.value(0, 1)));
  EXPECT_EQ(g.sampled_values(), (std::vector<double>{1, 3, 4, 5}));
  const auto miss = g.missing_cells();
  ASSERT_EQ(miss.size(), 2u);
  EXPECT_EQ(miss[0], (Cell{0, 1}));
  EXPECT_EQ(miss[1], (Cell{1, 2}));
  g.set(0, 1, 9.0);
  EXPECT_TRUE(g.is_sampled(0, 1));
  EXPECT_THROW(g.set(0, 0, NAN), InvalidArgument);
  v(0, 0) = INFINITY;
  EXPECT_THROW(Raster(v, m), InvalidArgument);
  EXPECT_THROW(Raster(0, 3), InvalidArgument);
}

TEST(Discretize, CarriesMask) {
  GridArray<double> v(2, 2);
  v << 0, 5, 8, 2;
  Mask m(2, 2);
  m << true, true, true, false;
  const Raster g(v, m);
  const auto th = build_thresholds(g, 4);
  const ClassField f = discretize(g, th);
  EXPECT_EQ(f.label(0, 0), 1);
  EXPECT_EQ(f.label(0, 1), 3);
  EXPECT_EQ(f.label(1, 0), 4);
  EXPECT_EQ(f.label(1, 1), 0);
  EXPECT_FALSE(f.is_sampled(1, 1));
  EXPECT_FALSE(f.fully_labeled());
  EXPECT_EQ(f.n_prediction(), 1);

  ClassField g2 = f;
  g2.set_label({1, 1}, 2);
  EXPECT_TRUE(g2.fully_labeled());
  EXPECT_THROW(g2.set_label({0, 0}, 2), InvalidArgument);
  EXPECT_THROW(g2.set_label({1, 1}, 5), InvalidArgument);
}
