#include "core/asymptotics.hpp"
#include "core/operator_model.hpp"

#include <gmpxx.h>
#include <gtest/gtest.h>
#include <mpfr.h>

#include <cmath>

namespace hypdyn {
namespace {

constexpr mpfr_prec_t kPrec = 700;  // a bit over 200 decimal digits

struct Mp {
  mpfr_t v;
  Mp() { mpfr_init2(v, kPrec); mpfr_set_ui(v, 0, MPFR_RNDN); }
  ~Mp() { mpfr_clear(v); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
};

// ln C(n, k) from the exact big integer.
double oracle_log_binomial(unsigned long n, unsigned long k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  Mp x;
  mpfr_set_z(x.v, c.get_mpz_t(), MPFR_RNDN);
  mpfr_log(x.v, x.v, MPFR_RNDN);
  return mpfr_get_d(x.v, MPFR_RNDN);
}

// sum_{k=0}^{n} C(n,k) y(j+k) e^{-k(k+1)-2kj} in high precision, all terms.
template <class Y>
double oracle_series(long n, long j, Y y, long shift = 0) {
  Mp sum, term, e, c;
  for (long k = 0; k <= n; ++k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    mpfr_set_si(e.v, -(k * (k + 1) + 2 * k * j + shift * (k + 1)), MPFR_RNDN);
    mpfr_exp(term.v, e.v, MPFR_RNDN);
    mpfr_set_z(c.v, b.get_mpz_t(), MPFR_RNDN);
    mpfr_mul(term.v, term.v, c.v, MPFR_RNDN);
    y(term.v, j + k);
    mpfr_add(sum.v, sum.v, term.v, MPFR_RNDN);
  }
  return mpfr_get_d(sum.v, MPFR_RNDN);
}

double oracle_a(long n) {
  return oracle_series(n, 0, [](mpfr_t t, long k) { mpfr_div_si(t, t, k + 1, MPFR_RNDN); });
}

// B_n = sum C(n,k) e^{-(k+1)(k+2)} = e^{-2} sum C(n,k) e^{-k(k+1) - 2k}.
double oracle_b(long n) {
  return oracle_series(n, 0, [](mpfr_t, long) {}, 2);
}

TEST(LogValue, Arithmetic) {
  const auto a = LogValue::from_double(3.0), b = LogValue::from_double(-5.0);
  EXPECT_DOUBLE_EQ((a + b).to_double(), -2.0);
  EXPECT_DOUBLE_EQ((a - b).to_double(), 8.0);
  EXPECT_DOUBLE_EQ((a * b).to_double(), -15.0);
  EXPECT_DOUBLE_EQ((b / a).to_double(), -5.0 / 3.0);
  EXPECT_EQ((a - a).sign(), 0);
  EXPECT_TRUE(b < a);
  EXPECT_TRUE(LogValue::from_double(-6.0) < b);
  EXPECT_TRUE(LogValue::zero() < a);
  EXPECT_TRUE(b < LogValue::zero());
  // Far outside double range.
  const auto huge = LogValue::from_log(1e6);
  EXPECT_DOUBLE_EQ((huge * huge).log_abs(), 2e6);
  EXPECT_DOUBLE_EQ((huge + huge).log_abs(), 1e6 + std::log(2.0));
}

TEST(LogBinomial, SmallExact) {
  for (long n = 0; n <= 60; ++n)
    for (long k = 0; k <= n; ++k) {
      const double want = oracle_log_binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(k));
      EXPECT_NEAR(log_binomial(n, k), want, 1e-14 * std::max(1.0, want)) << n << " " << k;
    }
  EXPECT_THROW(log_binomial(5, 6), Error);
  EXPECT_THROW(log_binomial(5, -1), Error);
}

TEST(LogBinomial, LargeAgainstBigInteger) {
  const std::vector<std::pair<unsigned long, unsigned long>> cases = {
      {1000000, 500}, {1000000, 1}, {1000000, 999000}, {1000000, 1001}, {1000000, 500000},
      {100000, 30000}, {61, 30}, {12345, 6000}};
  for (auto [n, k] : cases) {
    const double want = oracle_log_binomial(n, k);
    const double got = log_binomial(static_cast<std::int64_t>(n), static_cast<std::int64_t>(k));
    EXPECT_LE(std::fabs(got - want), 1e-10 * want) << n << " " << k;
  }
}

TEST(Series, BaseValues) {
  EXPECT_DOUBLE_EQ(a_n(0).to_double(), 1.0);
  EXPECT_DOUBLE_EQ(b_n(0).to_double(), std::exp(-2.0));
  EXPECT_NEAR(a_n(1).to_double(), 1.0 + std::exp(-2.0) / 2.0, 1e-15);
  EXPECT_NEAR(b_n(1).to_double(), std::exp(-2.0) + std::exp(-6.0), 1e-15);
}

TEST(Series, AgainstHighPrecision) {
  for (long n : {2L, 5L, 17L, 100L, 1000L, 5000L}) {
    const double a = oracle_a(n), b = oracle_b(n);
    EXPECT_NEAR(a_n(n).to_double() / a, 1.0, 1e-12) << n;
    EXPECT_NEAR(b_n(n).to_double() / b, 1.0, 1e-12) << n;
  }
}

TEST(Series, CoordinateMatchesAnBitwise) {
  const auto u = SequenceRule::parse("harmonic");
  for (long n : {0L, 1L, 7L, 100L, 123456L}) {
    const auto s = sn_coordinate(u, 0, n), a = a_n(n);
    EXPECT_EQ(s.sign(), a.sign());
    EXPECT_EQ(s.log_abs(), a.log_abs()) << n;
  }
}

TEST(Series, AlternatingAgainstHighPrecision) {
  const auto y = SequenceRule::parse("alternating");
  for (long j : {0L, 1L, 3L}) {
    const double want = oracle_series(100, j, [](mpfr_t t, long k) {
      if (k % 2) mpfr_neg(t, t, MPFR_RNDN);
    });
    const double got = sn_coordinate(y, j, 100).to_double();
    EXPECT_LE(std::fabs(got - want), 1e-8 * std::fabs(want)) << j;
  }
}

TEST(Series, CoordinateMatchesOperatorPowers) {
  // (I + B_w)^n applied to a truncated sequence; coordinates j with j + n < dim are exact.
  const Index dim = 48;
  const auto s = OperatorModel::identity_plus(OperatorModel::backward_shift(WeightSequence::exp2decay(), dim));
  for (const char* rule : {"harmonic", "alternating", "constant:2.5", "list:1,-3,0.5,0,7"}) {
    const auto y = SequenceRule::parse(rule);
    std::vector<double> ys(static_cast<std::size_t>(dim));
    for (Index k = 0; k < dim; ++k) ys[static_cast<std::size_t>(k)] = y.at(k);
    CVector v = Vector::real(ys).coords();
    const Index n = 12;
    for (Index i = 0; i < n; ++i) v = apply_raw(s, v);
    for (Index j = 0; j + n < dim; j += 5) {
      const double want = v(j).real();
      const double got = sn_coordinate(y, j, n).to_double();
      EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::fabs(want))) << rule << " j=" << j;
    }
  }
}

TEST(Series, RuleParsing) {
  EXPECT_EQ(SequenceRule::parse("list:1,-3,0.5").spec(), "list:1,-3,0.5");
  EXPECT_EQ(SequenceRule::parse("constant:2").spec(), "constant:2");
  EXPECT_DOUBLE_EQ(SequenceRule::parse("list:1,-3,0.5").bound(), 3.0);
  EXPECT_EQ(SequenceRule::parse("list:1").at(4), 0.0);
  EXPECT_THROW(SequenceRule::parse("sawtooth"), Error);
  EXPECT_THROW(SequenceRule::parse("constant:x"), Error);
}

TEST(Series, GrowthProperties) {
  LogValue prev = a_n(1);
  for (std::int64_t n = 2; n <= 100000; ++n) {
    const auto a = a_n(n);
    ASSERT_TRUE(prev < a) << n;
    prev = a;
  }
  double last_ratio = 0.0;
  for (std::int64_t n : {10, 100, 1000, 10000, 100000}) {
    const double r = (b_n(n) / a_n(n)).log_abs();
    EXPECT_LE(r, -2.0) << n;
    if (n > 10) EXPECT_LT(r, last_ratio) << n;
    last_ratio = r;
  }
  double last = 0.0;
  for (std::int64_t n = 100; n <= 1000000; n += (n < 10000 ? 1 : 97)) {
    const double l = std::log(static_cast<double>(n));
    const double v = a_n(n).log_abs() / (l * l);
    ASSERT_LT(v, 0.25) << n;
    if (n > 100) ASSERT_GT(v, last) << n;
    last = v;
  }
}

TEST(Stirling, BandStable) {
  std::vector<StirlingBand> bands;
  for (std::int64_t n : {1000, 10000, 100000}) bands.push_back(stirling_band_check(n));
  for (const auto& b : bands) {
    EXPECT_GT(b.alpha_hat, 0.0);
    EXPECT_LE(b.alpha_hat, b.beta_hat);
    EXPECT_LE(b.beta_hat / bands[0].beta_hat, 2.0);
    EXPECT_GE(b.beta_hat / bands[0].beta_hat, 0.5);
    EXPECT_LE(b.alpha_hat / bands[0].alpha_hat, 2.0);
    EXPECT_GE(b.alpha_hat / bands[0].alpha_hat, 0.5);
  }
  EXPECT_EQ(bands[0].k_max, 31);
}

TEST(Divergence, BoundTurnsPositive) {
  const std::vector<std::int64_t> grid = {1, 10, 100, 1000, 10000, 100000, 1000000};
  const auto rep = divergence_report({0.5, -6.0, 1.0}, grid);
  EXPECT_DOUBLE_EQ(rep.c, 6.0);
  ASSERT_EQ(rep.rows.size(), grid.size());
  ASSERT_GE(rep.positive_from, 0);
  for (std::size_t i = static_cast<std::size_t>(rep.positive_from); i < rep.rows.size(); ++i) {
    EXPECT_GT(rep.rows[i].bound.sign(), 0);
    const auto direct = rep.rows[i].a - LogValue::from_double(12.0) * rep.rows[i].b;
    EXPECT_NEAR(direct.log_abs(), rep.rows[i].bound.log_abs(), 1e-12);
  }
  // At n = 1: 1 + e^-2/2 - 12 (e^-2 + e^-6) < 0.
  EXPECT_LT(rep.rows[0].bound.sign(), 0);
  EXPECT_EQ(divergence_report({}, grid).positive_from, 0);
}

TEST(Tail, ThresholdIsMinimal) {
  for (std::int64_t n : {3, 10, 100, 1000, 100000, 1000000000}) {
    const auto k = tail_threshold(n);
    const double ln_n = std::log(static_cast<double>(n));
    auto lhs = [](double k) { return (k + 1.0) * std::exp(-2.0 * k - 2.0); };
    const double rhs = 4.0 * ln_n / (static_cast<double>(n) * static_cast<double>(n));
    EXPECT_LE(lhs(static_cast<double>(k)), rhs * (1 + 1e-12)) << n;
    if (k > 0) EXPECT_GT(lhs(static_cast<double>(k - 1)), rhs) << n;
  }
  EXPECT_THROW(tail_threshold(2), Error);
}

}  // namespace
}  // namespace hypdyn
