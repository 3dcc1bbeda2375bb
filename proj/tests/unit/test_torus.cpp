#include "core/random.hpp"
#include "core/torus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

namespace hypdyn {
namespace {

using Tuple = std::vector<std::int64_t>;

// Oracle: orbit of (p_i/q_i) written over the common denominator L, walked
// with plain integer addition until it returns to 0.
std::set<Tuple> orbit_by_walking(const std::vector<std::pair<std::int64_t, std::int64_t>>& z, std::int64_t& L) {
  L = 1;
  for (auto [p, q] : z) L = std::lcm(L, q);
  Tuple step, cur(z.size(), 0);
  for (auto [p, q] : z) step.push_back(((p % q + q) % q) * (L / q));
  std::set<Tuple> seen;
  do {
    seen.insert(cur);
    for (std::size_t i = 0; i < z.size(); ++i) cur[i] = (cur[i] + step[i]) % L;
  } while (!seen.count(cur));
  return seen;
}

TEST(Angle, ReducesAndAdds) {
  const Angle a = Angle::rational(3, 6);
  EXPECT_EQ(a.num(), 1);
  EXPECT_EQ(a.den(), 2);
  EXPECT_EQ(Angle::rational(-1, 4).num(), 3);
  EXPECT_EQ(Angle::rational(1, 3) + Angle::rational(2, 3), Angle::rational(0, 1));
  EXPECT_EQ(Angle::rational(1, 4).times(6), Angle::rational(1, 2));
  EXPECT_EQ(Angle::parse("2/8"), Angle::rational(1, 4));
  EXPECT_EQ(Angle::parse("0"), Angle::rational(0, 1));
  EXPECT_FALSE(Angle::parse("0.25").exact());
  EXPECT_DOUBLE_EQ(Angle::parse("1.25").turns(), 0.25);
  EXPECT_THROW(Angle::rational(1, 0), Error);
}

TEST(Angle, SpecRoundTrip) {
  for (const Angle& a : {Angle::rational(5, 7), Angle::approximate(std::sqrt(2.0) - 1.0),
                         Angle::approximate(0.1, 1e-6), Angle::rational(0, 1)}) {
    EXPECT_EQ(Angle::parse(a.spec()), a) << a.spec();
  }
}

TEST(Torus, ThirdHasOrderThree) {
  const auto g = closure_of_powers(TorusPoint::parse("1/3"));
  EXPECT_TRUE(g.finite);
  EXPECT_TRUE(g.exact);
  EXPECT_EQ(g.order, 3);
}

TEST(Torus, HalfQuarterElements) {
  const auto g = closure_of_powers(TorusPoint::parse("1/2,1/4"));
  ASSERT_TRUE(g.finite);
  EXPECT_EQ(g.order, 4);
  const auto el = g.elements();
  ASSERT_EQ(el.size(), 4u);
  EXPECT_EQ(el[0].spec(), "0,0");
  EXPECT_EQ(el[1].spec(), "1/2,1/4");
  EXPECT_EQ(el[2].spec(), "0,1/2");
  EXPECT_EQ(el[3].spec(), "1/2,3/4");
  EXPECT_EQ(g.index_of(TorusPoint::parse("1/2,3/4")), 3);
  EXPECT_EQ(g.index_of(TorusPoint::parse("1/2,1/2")), -1);
  EXPECT_FALSE(g.contains(TorusPoint::parse("1/4,0")));
}

TEST(Torus, MatchesWalkingOracle) {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const int k = static_cast<int>(rng.integer(1, 3));
    std::vector<std::pair<std::int64_t, std::int64_t>> z;
    std::vector<Angle> coords;
    for (int i = 0; i < k; ++i) {
      const std::int64_t q = rng.integer(1, 30), p = rng.integer(-40, 40);
      z.emplace_back(p, q);
      coords.push_back(Angle::rational(p, q));
    }
    std::int64_t L = 0;
    const auto oracle = orbit_by_walking(z, L);
    const TorusPoint pt(coords);
    const auto g = closure_of_powers(pt);
    ASSERT_TRUE(g.finite);
    EXPECT_EQ(g.order, static_cast<std::int64_t>(oracle.size()));
    std::set<std::string> mine, theirs;
    for (const auto& e : g.elements()) mine.insert(e.spec());
    for (const auto& e : enumerate_powers(pt)) EXPECT_TRUE(mine.count(e.spec()));
    for (const auto& tup : oracle) {
      std::vector<Angle> c;
      for (auto v : tup) c.push_back(Angle::rational(v, L));
      theirs.insert(TorusPoint(c).spec());
    }
    EXPECT_EQ(mine, theirs);
  }
}

TEST(Torus, IrrationalIsGeneratorUpToQ) {
  const auto g = closure_of_powers(TorusPoint({Angle::approximate(std::sqrt(2.0) - 1.0)}));
  EXPECT_FALSE(g.finite);
  EXPECT_FALSE(g.exact);
  EXPECT_EQ(g.identity_component_dim, 1);
  EXPECT_TRUE(g.relations.empty());

  const auto v = is_generator(Angle::approximate((std::sqrt(5.0) - 1.0) / 2.0));
  EXPECT_TRUE(v.generator);
  EXPECT_FALSE(v.exact);
  EXPECT_EQ(v.max_denominator, 1000000);
}

TEST(Torus, RationalsAreNotGenerators) {
  auto v = is_generator(Angle::rational(1, 2));
  EXPECT_FALSE(v.generator);
  EXPECT_TRUE(v.exact);
  EXPECT_EQ(v.order, 2);
  v = is_generator(Angle::rational(0, 1));
  EXPECT_FALSE(v.generator);
  EXPECT_EQ(v.order, 1);
  // A double that is 1/7 to rounding is detected as rational.
  v = is_generator(Angle::approximate(1.0 / 7.0));
  EXPECT_FALSE(v.generator);
  EXPECT_EQ(v.order, 7);
}

TEST(Torus, DetectRational) {
  EXPECT_EQ(detect_rational(3.0 / 11.0, 0x1p-52, 1000000), (std::pair<std::int64_t, std::int64_t>(3, 11)));
  EXPECT_EQ(detect_rational(std::sqrt(2.0) - 1.0, 0x1p-52, 1000000).second, 0);
  EXPECT_EQ(detect_rational(0.0, 0.0, 10).second, 1);
  // Coarse uncertainty makes pi - 3 look like 1/7.
  EXPECT_EQ(detect_rational(M_PI - 3.0, 2e-3, 1000).second, 7);
}

TEST(Torus, MixedRelations) {
  const double r = std::sqrt(2.0) - 1.0;
  // (r, 1/2): relation 2 e_2, one-dimensional identity component.
  auto g = closure_of_powers(TorusPoint({Angle::approximate(r), Angle::rational(1, 2)}));
  EXPECT_FALSE(g.finite);
  ASSERT_EQ(g.relations.size(), 1u);
  EXPECT_EQ(g.relations[0], (Tuple{0, 2}));
  EXPECT_EQ(g.identity_component_dim, 1);
  EXPECT_TRUE(g.contains(TorusPoint({Angle::approximate(0.123), Angle::rational(1, 2)})));
  EXPECT_FALSE(g.contains(TorusPoint({Angle::approximate(0.123), Angle::rational(1, 4)})));

  // (r, 2r): relation (2, -1).
  g = closure_of_powers(TorusPoint({Angle::approximate(r), Angle::approximate(2.0 * r)}));
  ASSERT_EQ(g.relations.size(), 1u);
  EXPECT_EQ(g.relations[0], (Tuple{2, -1}));
  EXPECT_EQ(g.identity_component_dim, 1);

  // (sqrt2, sqrt3) independent.
  g = closure_of_powers(TorusPoint({Angle::approximate(std::sqrt(2.0)), Angle::approximate(std::sqrt(3.0))}));
  EXPECT_TRUE(g.relations.empty());
  EXPECT_EQ(g.identity_component_dim, 2);
}

TEST(Torus, TooManyApproximateCoordinates) {
  std::vector<Angle> c(5, Angle::approximate(std::sqrt(2.0)));
  EXPECT_THROW(closure_of_powers(TorusPoint(c)), Error);
}

TEST(Torus, LatticeBasis) {
  const auto b = lattice_basis({{4, 6}, {6, 9}, {2, 3}});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0], (Tuple{2, 3}));
  const auto b2 = lattice_basis({{2, 0}, {0, 3}, {2, 3}});
  EXPECT_EQ(b2.size(), 2u);
}

TEST(Torus, Distance) {
  EXPECT_DOUBLE_EQ(torus_distance(TorusPoint::parse("1/8"), TorusPoint::parse("7/8")), 0.25);
  EXPECT_NEAR(torus_distance(TorusPoint::parse("0.95"), TorusPoint::parse("0.05")), 0.1, 1e-15);
}

TEST(Cosets, SubgroupRecovery) {
  // In Z_q, for every divisor d, the cosets of H = dZ_q are recovered.
  for (std::int64_t q = 1; q <= 12; ++q) {
    for (std::int64_t d = 1; d <= q; ++d) {
      if (q % d) continue;
      std::vector<Tuple> sets;
      for (std::int64_t shift = 0; shift < d; ++shift) {
        Tuple s;
        for (std::int64_t j = shift; j < q; j += d) s.push_back(j);
        sets.push_back(s);
      }
      sets.push_back({});
      const auto h = common_coset_subgroup(sets, q);
      ASSERT_TRUE(h);
      Tuple expect;
      for (std::int64_t j = 0; j < q; j += d) expect.push_back(j);
      EXPECT_EQ(*h, expect) << q << " " << d;
    }
  }
  EXPECT_FALSE(common_coset_subgroup({{0, 1}}, 4));
  EXPECT_FALSE(common_coset_subgroup({{0, 2}, {1}}, 4));
  EXPECT_EQ(*common_coset_subgroup({{}, {}}, 4), Tuple{0});
}

TEST(Cosets, EstimateFromRotationSamples) {
  // T = diag(-1, 1) with phases in Z_2: sample s T^n x with s = (-1)^n.
  const auto g = closure_of_powers(TorusPoint::parse("1/2"));
  const Vector x = Vector::real({1.0, 1.0});
  std::vector<std::pair<Vector, TorusPoint>> samples;
  for (int n = 0; n < 6; ++n) {
    CVector v(2);
    v << (n % 2 ? -1.0 : 1.0), 1.0;
    samples.emplace_back(Vector(Field::real, v), g.generator.power(n));
  }
  CVector y(2);
  y << -1.0, 1.0;
  const auto est = estimate_cosets(samples, x, {x, Vector(Field::real, y)}, 1e-6, CoverageMode::plain, g);
  EXPECT_TRUE(est.consistent);
  EXPECT_EQ(est.at_x, Tuple{0});
  EXPECT_EQ(est.sets[1], Tuple{1});
  EXPECT_EQ(est.subgroup, Tuple{0});
  EXPECT_TRUE(est.subgroup_matches_x);
}

}  // namespace
}  // namespace hypdyn
