#include "core/operator_model.hpp"
#include "core/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace hypdyn {
namespace {

CMatrix random_matrix(Rng& rng, Index d, bool complex = false) {
  CMatrix m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = Scalar(rng.normal(), complex ? rng.normal() : 0.0);
  return m;
}

Vector random_vector(Rng& rng, Index d, Field f = Field::real) {
  CVector c(d);
  for (Index i = 0; i < d; ++i) c[i] = Scalar(rng.normal(), f == Field::complex ? rng.normal() : 0.0);
  return Vector(f, c);
}

std::vector<OperatorModel> catalogue() {
  Rng rng(7);
  const Vector u = random_vector(rng, 4);
  std::vector<OperatorModel> ops;
  ops.push_back(OperatorModel::dense(Field::complex, random_matrix(rng, 5, true)));
  ops.push_back(OperatorModel::backward_shift(WeightSequence::exp2decay(), 6));
  ops.push_back(OperatorModel::forward_shift(WeightSequence::constant(0.5), 6));
  ops.push_back(OperatorModel::identity_plus(OperatorModel::backward_shift(WeightSequence::harmonic(), 5)));
  ops.push_back(OperatorModel::volterra(9));
  ops.push_back(OperatorModel::composition_j(9));
  ops.push_back(OperatorModel::rotation2d(0.3));
  ops.push_back(OperatorModel::scalar_multiple(Scalar(0.0, 2.0), OperatorModel::rotation2d(0.1)));
  ops.push_back(OperatorModel::direct_sum({OperatorModel::volterra(3), OperatorModel::rotation2d(0.25)}));
  ops.push_back(OperatorModel::extension_su(OperatorModel::dense(Field::real, random_matrix(rng, 4)), u));
  ops.push_back(OperatorModel::matrix_exponential(OperatorModel::dense(Field::real, random_matrix(rng, 4)), 0.7));
  return ops;
}

TEST(OperatorModel, BackwardShiftMovesBasisVectorDown) {
  const auto w = WeightSequence::list({0.5, 3.0});
  const auto t = OperatorModel::backward_shift(w, 3);
  const Vector y = apply(t, Vector::basis(Field::real, 3, 1));
  EXPECT_EQ(y[0], Scalar(0.5));
  EXPECT_EQ(y[1], Scalar(0.0));
  EXPECT_EQ(y[2], Scalar(0.0));
}

TEST(OperatorModel, QuarterTurnRotation) {
  const Vector y = apply(OperatorModel::rotation2d(0.25), Vector::real({1.0, 0.0}));
  EXPECT_NEAR(y[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(y[1].real(), -1.0, 1e-15);
}

TEST(OperatorModel, VolterraIntegratesConstant) {
  for (Index m : {10, 100, 1000}) {
    const Vector one(Field::real, CVector::Ones(m));
    const Vector v = apply(OperatorModel::volterra(m), one);
    double worst = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double t = (2.0 * i + 1.0) / (2.0 * m);
      worst = std::max(worst, std::abs(v[i].real() - t));
    }
    EXPECT_LE(worst, 1.0 / m);
  }
}

TEST(OperatorModel, ApplyRejectsMismatches) {
  const auto t = OperatorModel::rotation2d(0.1);
  try {
    apply(t, Vector::real({1.0, 2.0, 3.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  try {
    apply(t, Vector::complex({Scalar(1.0, 1.0), 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::field_mismatch);
  }
  // Real vectors embed into complex operators.
  const auto zt = OperatorModel::scalar_multiple(Scalar(0.0, 1.0), t);
  EXPECT_EQ(apply(zt, Vector::real({1.0, 0.0})).field(), Field::complex);
}

TEST(OperatorModel, MaterializeMatchesApplyOnAllVariants) {
  Rng rng(11);
  for (const auto& op : catalogue()) {
    const CMatrix m = materialize(op);
    for (int trial = 0; trial < 3; ++trial) {
      const Vector x = random_vector(rng, op.dim(), op.field());
      const CVector direct = apply(op, x).coords();
      const double scale = std::max(1.0, direct.norm());
      EXPECT_LE((m * x.coords() - direct).norm(), 1e-12 * scale) << describe(op);
    }
  }
}

TEST(OperatorModel, MaterializeSmallCases) {
  const CMatrix two = materialize(OperatorModel::scalar_multiple(2.0, OperatorModel::identity(2)));
  EXPECT_EQ(two, (CMatrix(2, 2) << 2.0, 0.0, 0.0, 2.0).finished());

  const auto su = OperatorModel::extension_su(OperatorModel::dense_real(Eigen::MatrixXd::Zero(1, 1)), Vector::real({1.0}));
  EXPECT_EQ(materialize(su), (CMatrix(2, 2) << 0.0, 1.0, 0.0, 1.0).finished());

  const auto a = OperatorModel::rotation2d(0.2), b = OperatorModel::volterra(3);
  const CMatrix ds = materialize(OperatorModel::direct_sum({a, b}));
  EXPECT_EQ(ds.block(0, 0, 2, 2), materialize(a));
  EXPECT_EQ(ds.block(2, 2, 3, 3), materialize(b));
  EXPECT_TRUE(ds.block(0, 2, 2, 3).isZero(0.0));
  EXPECT_TRUE(ds.block(2, 0, 3, 2).isZero(0.0));
}

TEST(OperatorModel, DirectSumIsComponentwise) {
  Rng rng(3);
  const auto a = OperatorModel::dense(Field::real, random_matrix(rng, 3));
  const auto b = OperatorModel::backward_shift(WeightSequence::constant(2.0), 4);
  const Vector x = random_vector(rng, 7);
  const CVector got = apply(OperatorModel::direct_sum({a, b}), x).coords();
  EXPECT_EQ(got.head(3), apply_raw(a, x.coords().head(3)));
  EXPECT_EQ(got.tail(4), apply_raw(b, x.coords().tail(4)));
}

TEST(OperatorModel, AdjointIsInvolution) {
  Rng rng(5);
  const CMatrix m = random_matrix(rng, 6, true);
  const auto op = OperatorModel::dense(Field::complex, m);
  EXPECT_EQ(materialize(adjoint(adjoint(op))), m);
  for (const auto& c : catalogue()) {
    const CMatrix direct = materialize(c);
    EXPECT_LE((materialize(adjoint(c)) - direct.adjoint()).norm(), 1e-12 * std::max(1.0, direct.norm())) << describe(c);
    EXPECT_LE((materialize(adjoint(adjoint(c))) - direct).norm(), 1e-12 * std::max(1.0, direct.norm())) << describe(c);
  }
}

TEST(OperatorModel, AdjointOfBackwardShiftIsForwardShift) {
  const auto w = WeightSequence::list({0.25, 3.0, 5.0});
  const auto adj = adjoint(OperatorModel::backward_shift(w, 4));
  EXPECT_EQ(adj.kind(), OperatorModel::Kind::forward_shift);
  const Vector y = apply(adj, Vector::basis(Field::real, 4, 0));
  EXPECT_EQ(y[1], Scalar(0.25));
  EXPECT_EQ(y.coords().norm(), 0.25);
}

TEST(OperatorModel, VolterraAdjointApproximatesUpperLimitIntegral) {
  // V*g(x) = int_x^1 g; for g(s) = s the exact value is (1 - x^2)/2.
  for (Index m : {50, 500}) {
    CVector g(m);
    for (Index i = 0; i < m; ++i) g[i] = (2.0 * i + 1.0) / (2.0 * m);
    const CVector got = apply_raw(adjoint(OperatorModel::volterra(m)), g);
    double worst = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double x = (2.0 * i + 1.0) / (2.0 * m);
      worst = std::max(worst, std::abs(got[i].real() - (1.0 - x * x) / 2.0));
    }
    EXPECT_LE(worst, 1.0 / m);
  }
}

TEST(OperatorModel, VolterraCompositionIntertwiningDefectShrinks) {
  auto defect = [](Index m) {
    const CMatrix v = materialize(OperatorModel::volterra(m));
    const CMatrix j = materialize(OperatorModel::composition_j(m));
    const CMatrix d = 2.0 * j * v - v.transpose() * j;
    return Eigen::JacobiSVD<CMatrix>(d).singularValues()(0);
  };
  const double d20 = defect(20), d40 = defect(40), d80 = defect(80);
  EXPECT_LT(d40, d20);
  EXPECT_LT(d80, d40);
  EXPECT_LT(d80, 0.6 * d40);
}

TEST(OperatorModel, ApplyPowerFactorsNorm) {
  const Vector x = Vector::real({3.0, 4.0});
  const auto p0 = apply_power(OperatorModel::rotation2d(0.1), 0, x);
  EXPECT_DOUBLE_EQ(p0.lognorm, std::log(5.0));
  EXPECT_NEAR(p0.unit[0].real(), 0.6, 1e-15);

  const Vector e = Vector::real({1.0, 0.0});
  const auto p10 = apply_power(OperatorModel::scalar_multiple(2.0, OperatorModel::identity(2)), 10, e);
  EXPECT_NEAR(p10.lognorm, 10.0 * std::log(2.0), 1e-13);
  EXPECT_EQ(p10.unit.coords(), e.coords());

  for (Index n : {1, 17, 400}) EXPECT_NEAR(apply_power(OperatorModel::rotation2d(0.377), n, e).lognorm, 0.0, 1e-12);

  const auto nil = apply_power(OperatorModel::backward_shift(WeightSequence::constant(1.0), 3), 3, Vector::real({1, 1, 1}));
  EXPECT_TRUE(std::isinf(nil.lognorm) && nil.lognorm < 0);
  EXPECT_EQ(nil.unit.norm(), 0.0);
}

TEST(OperatorModel, ApplyPowerSurvivesOverflowingGrowth) {
  const auto big = OperatorModel::scalar_multiple(1e10, OperatorModel::identity(3));
  const auto p = apply_power(big, 100, Vector::real({1.0, 0.0, 0.0}));
  EXPECT_NEAR(p.lognorm, 1000.0 * std::log(10.0), 1e-9);
  EXPECT_NEAR(p.unit.norm(), 1.0, 1e-15);
}

TEST(MatrixExponential, ZeroTimeIsIdentity) {
  Rng rng(1);
  const auto g = OperatorModel::dense(Field::real, random_matrix(rng, 4));
  const Vector x = random_vector(rng, 4);
  EXPECT_EQ(exp_apply(g, 0.0, x).coords(), x.coords());
}

TEST(MatrixExponential, NilpotentSeriesTerminates) {
  const auto w = WeightSequence::list({0.75});
  const auto n = OperatorModel::backward_shift(w, 2);
  const Vector got = exp_apply(n, 1.0, Vector::basis(Field::real, 2, 1));
  EXPECT_EQ(got[0], Scalar(0.75));
  EXPECT_EQ(got[1], Scalar(1.0));
  EXPECT_TRUE(is_strictly_triangular(materialize(n)));
}

TEST(MatrixExponential, SemigroupLaw) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(rng, 6) / 2.0;
    const double t = rng.uniform(0.1, 2.0), s = rng.uniform(0.1, 2.0);
    const CMatrix lhs = expm(t * a) * expm(s * a);
    const CMatrix rhs = expm((t + s) * a);
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST(MatrixExponential, MatchesDiagonalClosedForm) {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = -3.0;
  d(2, 2) = Scalar(0.0, 20.0);
  const CMatrix e = expm(d);
  EXPECT_NEAR(std::abs(e(0, 0) - std::exp(1.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e(1, 1) - std::exp(-3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(2, 2) - std::exp(Scalar(0.0, 20.0))), 0.0, 1e-13);
}

TEST(OperatorModel, ForwardShiftReportsLeak) {
  const auto f = OperatorModel::forward_shift(WeightSequence::constant(1.0), 3);
  EXPECT_EQ(truncation_leak(f, Vector::real({1.0, 0.0, 0.0})), 0.0);
  EXPECT_DOUBLE_EQ(truncation_leak(f, Vector::real({0.0, 0.0, 1.0})), 1.0);
  EXPECT_NEAR(truncation_leak(f, Vector::real({1.0, 0.0, 1.0})), std::sqrt(0.5), 1e-15);
}

TEST(WeightSequence, ParseRoundTrip) {
  for (const char* s : {"exp2decay", "harmonic", "constant:2", "list:1,0.5,0.25"}) {
    EXPECT_EQ(WeightSequence::parse(s).spec(), s);
  }
  EXPECT_DOUBLE_EQ(WeightSequence::exp2decay()(3), std::exp(-6.0));
  EXPECT_THROW(WeightSequence::parse("constant:-1"), Error);
  EXPECT_THROW(WeightSequence::parse("bogus"), Error);
}

}  // namespace
}  // namespace hypdyn
