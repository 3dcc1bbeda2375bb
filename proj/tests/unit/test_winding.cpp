#include "core/winding.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace hypdyn {
namespace {

// Oracle: unwrap through complex quotients in double precision.
double unwrap_oracle(const SampledPath& p) {
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) w += std::arg(p.value(i + 1) / p.value(i)) / kTwoPi;
  return w;
}

std::vector<double> grid(std::size_t n, double a = 0.0, double b = 1.0) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

SampledPath circle(std::size_t n, double turns) {
  const auto t = grid(n);
  std::vector<double> a;
  for (double s : t) a.push_back(turns * s);
  return SampledPath::from_turns(t, a, true);
}

TEST(Winding, Basics) {
  EXPECT_EQ(winding(SampledPath::from_turns(grid(5), {0.3, 0.3, 0.3, 0.3, 0.3})).turns, 0.0);
  const auto one = winding(circle(100, 1.0));
  EXPECT_EQ(one.turns, 1.0);
  EXPECT_TRUE(one.snapped);
  EXPECT_EQ(winding(circle(100, 2.0)).turns, 2.0);
  EXPECT_EQ(winding(circle(100, -3.0)).turns, -3.0);
}

TEST(Winding, FromValues) {
  const auto t = grid(200);
  std::vector<Scalar> v;
  for (double s : t) v.push_back(std::exp(Scalar(0, 4.0 * M_PI * s)));
  EXPECT_EQ(winding(SampledPath::from_values(t, v, true)).turns, 2.0);
}

TEST(Winding, RejectsHalfTurnSteps) {
  try {
    SampledPath::from_turns({0.0, 1.0}, {0.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_sampling);
  }
  EXPECT_THROW(SampledPath::from_turns({0.0, 0.0}, {0.0, 0.1}), Error);
  EXPECT_THROW(SampledPath::from_turns({0.0, 1.0}, {0.0, 0.1}, true), Error);
}

TEST(Winding, MatchesUnwrapOracle) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_open_path(rng, 50);
    EXPECT_NEAR(winding(p).turns, unwrap_oracle(p), 1e-10);
  }
}

TEST(Winding, ConcatenationAdds) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_open_path(rng, 30);
    auto q = random_open_path(rng, 20);
    q = scale(p.turns(p.size() - 1) - q.turns(0), q);
    const auto pq = concatenate(p, q);
    EXPECT_EQ(winding(pq).fixed, winding(p).fixed + winding(q).fixed);
    EXPECT_NEAR(winding(pq).turns, winding(p).turns + winding(q).turns, 1e-12);
  }
  EXPECT_THROW(concatenate(circle(10, 0.2), circle(10, 0.2)), Error);
}

TEST(Winding, ScalingIsExact) {
  Rng rng(2);
  const auto p = random_open_path(rng, 100);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(winding(scale(rng.uniform(-3, 3), p)).fixed, winding(p).fixed);
}

TEST(Winding, ReparametrizationIsExact) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_open_path(rng, 40);
    const double a = p.times().front(), b = p.times().back();
    // h(s) = a + (b - a) s^2 sampled on a grid plus p's own knots.
    std::vector<double> h = p.times();
    for (double v : grid(200)) h.push_back(a + (b - a) * v * v);
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    h.back() = b;
    std::vector<double> s;
    for (double v : h) s.push_back(std::sqrt((v - a) / (b - a)));
    for (std::size_t j = 1; j < s.size(); ++j) s[j] = std::max(s[j], std::nextafter(s[j - 1], 2.0));
    EXPECT_EQ(winding(reparametrize(p, s, h)).fixed, winding(p).fixed);
  }
  const auto p = circle(50, 1.0);
  EXPECT_THROW(reparametrize(p, {0, 1, 2}, {0, 0.7, 0.5}), Error);
  EXPECT_THROW(reparametrize(p, {0, 1}, {0, 0.5}), Error);
}

TEST(Winding, CoarseReparametrizationIsRefused) {
  // Two samples cannot carry a full turn.
  EXPECT_THROW(reparametrize(circle(50, 1.0), {0, 0.5, 1}, {0, 0.5, 1}), Error);
}

TEST(Winding, RefinementKeepsWinding) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_open_path(rng, 25);
    EXPECT_LT(std::fabs(winding(refine(p)).turns - winding(p).turns), 1e-12);
  }
}

TEST(Winding, ClosedPathsSnap) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const int k = static_cast<int>(rng.integer(-5, 5));
    const auto p = random_closed_path(rng, 80, k);
    const auto w = winding(p);
    EXPECT_TRUE(w.snapped);
    EXPECT_EQ(w.turns, k);
    EXPECT_NEAR(unwrap_oracle(p), k, 1e-9);
  }
}

TEST(Winding, OmittedPointBound) {
  const auto t = grid(50);
  std::vector<double> upper;
  for (double s : t) upper.push_back(0.5 * s);
  EXPECT_TRUE(omit_point_bound_check(SampledPath::from_turns(t, upper), 0.75, 0.1));
  EXPECT_THROW(omit_point_bound_check(circle(100, 1.0), 0.5), Error);

  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const double z0 = rng.uniform();
    const auto p = random_avoiding_path(rng, 60, z0, 1e-3);
    EXPECT_TRUE(omit_point_bound_check(p, z0, 1e-3));
  }
}

TEST(Winding, CsvRoundTrip) {
  Rng rng(8);
  const auto p = random_open_path(rng, 20);
  const auto q = SampledPath::from_csv(p.to_csv());
  ASSERT_EQ(q.size(), p.size());
  EXPECT_EQ(q.times(), p.times());
  EXPECT_NEAR(winding(q).turns, winding(p).turns, 1e-15);
  EXPECT_THROW(SampledPath::from_csv("t,angle\n0,x\n"), Error);
}

TEST(MapDemo, Examples) {
  auto r = lemma_map_demo(0.3, 7, 200);
  EXPECT_NEAR(r.w_beta, 0.3, 1e-12);
  EXPECT_NEAR(r.sum_mid, 2.1, 1e-12);
  EXPECT_TRUE(r.bound_ok);
  EXPECT_LE(r.additivity_residual, 1e-12);

  r = lemma_map_demo(0.5, 5, 200);
  EXPECT_EQ(r.path_kind, "arc");
  EXPECT_NEAR(r.sum_mid, 2.5, 1e-12);

  r = lemma_map_demo(-0.3, 7, 200);
  EXPECT_NEAR(r.sum_mid, -2.1, 1e-12);
  EXPECT_TRUE(r.bound_ok);

  EXPECT_THROW(lemma_map_demo(0.0, 7, 100), Error);
  EXPECT_THROW(lemma_map_demo(0.3, 6, 100), Error);
}

TEST(MapDemo, SegmentImageMatchesOracle) {
  // Sampled winding of the normalized segment [1, z] equals arg z.
  for (double th : {0.05, 0.2, 0.45, -0.4}) {
    const auto t = grid(500);
    const Scalar z = std::polar(1.0, kTwoPi * th);
    std::vector<Scalar> v;
    for (double s : t) {
      const Scalar p = (1.0 - s) + s * z;
      v.push_back(p / std::abs(p));
    }
    EXPECT_NEAR(winding(SampledPath::from_values(t, v)).turns, th, 1e-12);
  }
}

}  // namespace
}  // namespace hypdyn
