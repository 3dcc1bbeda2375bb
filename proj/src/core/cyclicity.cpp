#include "core/cyclicity.hpp"

#include "core/orbit.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypdyn {

KrylovReport krylov_rank(const OperatorModel& model, const Vector& x, double tol, Index max_powers) {
  require(x.dim() == model.dim(), ErrorCode::dimension_mismatch, "dimension mismatch in krylov_rank");
  require(x.norm() > 0.0, ErrorCode::invalid_argument, "Krylov start vector must be nonzero");
  const Index d = model.dim();
  const Index p = max_powers < 0 ? d : std::min(max_powers, d);
  require(p >= 1, ErrorCode::invalid_argument, "at least one Krylov column is needed");
  KrylovReport rep;
  rep.dim = d;
  rep.tol = tol;
  // Extended precision keeps the rounding floor of breakdown pivots well
  // below the default tolerance for the 20-dimensional direct sums.
  using LScalar = std::complex<long double>;
  using LMatrix = Eigen::Matrix<LScalar, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<LScalar, Eigen::Dynamic, 1>;
  const LMatrix m = materialize(model).cast<LScalar>();
  const long double scale = std::max(m.norm(), static_cast<long double>(std::numeric_limits<double>::min()));

  LMatrix q(d, p);
  q.col(0) = x.coords().cast<LScalar>() / static_cast<long double>(x.norm());
  rep.pivots.push_back(1.0);
  rep.rank = 1;
  for (Index j = 1; j < p; ++j) {
    LVector w = m * q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j) * (q.leftCols(j).adjoint() * w);
    const long double h = w.norm();
    rep.pivots.push_back(static_cast<double>(h / scale));
    if (h / scale < tol) break;
    q.col(j) = w / h;
    ++rep.rank;
  }
  rep.cyclic = rep.rank == d;
  return rep;
}

VandermondeReport vandermonde_span_check(const std::vector<Scalar>& z, Index d) {
  require(!z.empty() && d >= 1, ErrorCode::invalid_argument, "need at least one scalar and d >= 1");
  const Index n = static_cast<Index>(z.size());
  VandermondeReport rep;
  rep.n = n;
  rep.d = d;
  for (std::size_t i = 0; i < z.size(); ++i) {
    require(z[i] != Scalar(0.0), ErrorCode::invalid_argument, "scalars must be nonzero");
    for (std::size_t j = 0; j < i; ++j)
      if (z[i] == z[j]) rep.repeated = true;
  }
  // Column (k, a) has block i equal to z_i^k e_a.
  CMatrix a = CMatrix::Zero(n * d, n * d);
  for (Index k = 0; k < n; ++k)
    for (Index e = 0; e < d; ++e)
      for (Index i = 0; i < n; ++i) {
        Scalar zk(1.0);
        for (Index t = 0; t < k; ++t) zk *= z[static_cast<std::size_t>(i)];
        a(i * d + e, k * d + e) = zk;
      }
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double thresh = static_cast<double>(n * d) * std::numeric_limits<double>::epsilon() * s[0];
  rep.rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > thresh) ++rep.rank;
  rep.sigma_ratio = s[s.size() - 1] / s[0];
  rep.full_rank = rep.rank == n * d;
  return rep;
}

RatioReport ratio_structure_check(const OperatorModel& T, const std::vector<Scalar>& z, const Vector& u, Index n_max) {
  require(!z.empty(), ErrorCode::invalid_argument, "need at least one scalar");
  require(z[0] != Scalar(0.0), ErrorCode::invalid_argument, "z_1 must be nonzero");
  require(u.norm() > 0.0, ErrorCode::invalid_argument, "u must be nonzero");
  require(u.dim() == T.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  std::vector<OperatorModel> parts;
  for (const auto& zi : z) parts.push_back(OperatorModel::scalar_multiple(zi, T));
  const auto S = OperatorModel::direct_sum(parts);
  const Index d = T.dim();
  CVector x(d * static_cast<Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) x.segment(static_cast<Index>(i) * d, d) = u.coords();
  const Field f = std::any_of(z.begin(), z.end(), [](Scalar s) { return s.imag() != 0.0; }) ? Field::complex
                                                                                             : join(T.field(), u.field());
  const auto orb = orbit(S, Vector(f, x), n_max);
  RatioReport rep;
  rep.n_max = n_max;
  for (Index k = 0; k <= n_max; ++k) {
    const auto& p = orb[static_cast<std::size_t>(k)];
    if (p.is_zero()) break;
    const CVector c1 = p.unit.segment(0, d);
    for (std::size_t i = 1; i < z.size(); ++i) {
      const Scalar r = std::pow(z[i] / z[0], static_cast<double>(k));
      const CVector ci = p.unit.segment(static_cast<Index>(i) * d, d);
      const CVector pred = r * c1;
      const double denom = std::max(ci.norm(), pred.norm());
      if (denom == 0.0) continue;
      rep.max_relative_residual = std::max(rep.max_relative_residual, (ci - pred).norm() / denom);
    }
  }
  return rep;
}

DirectSumReport direct_sum_cyclicity(const OperatorModel& T, const std::vector<Scalar>& z, const Vector& u,
                                     double tol) {
  require(!z.empty(), ErrorCode::invalid_argument, "need at least one scalar");
  require(u.dim() == T.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  const CMatrix m = materialize(T);
  const Index d = m.rows();
  Eigen::ComplexEigenSolver<CMatrix> es(m);
  require(es.info() == Eigen::Success, ErrorCode::internal, "eigensolver did not converge");
  DirectSumReport rep;
  const CVector lam = es.eigenvalues();
  rep.eigenvalues.assign(lam.data(), lam.data() + d);
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < i; ++j)
      require(std::abs(lam[i] - lam[j]) > 1e-8 * scale, ErrorCode::precondition, "T must have distinct eigenvalues");
  const CVector c = es.eigenvectors().fullPivLu().solve(u.coords());
  for (Index j = 0; j < d; ++j)
    require(std::abs(c[j]) * es.eigenvectors().col(j).norm() > 1e-10 * u.norm(), ErrorCode::precondition,
            "u has no component along an eigendirection of T");

  // Eigenvalues of the sum are the products z_i l_j.
  std::vector<Scalar> prod;
  for (const auto& zi : z)
    for (Index j = 0; j < d; ++j) prod.push_back(zi * lam[j]);
  double pscale = 0.0;
  for (const auto& p : prod) pscale = std::max(pscale, std::abs(p));
  rep.min_product_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prod.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) rep.min_product_gap = std::min(rep.min_product_gap, std::abs(prod[i] - prod[j]));
  rep.predicted_cyclic = prod.size() == 1 || rep.min_product_gap > 1e-9 * std::max(pscale, 1.0);

  std::vector<OperatorModel> parts;
  for (const auto& zi : z) parts.push_back(OperatorModel::scalar_multiple(zi, T));
  CVector x(d * static_cast<Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) x.segment(static_cast<Index>(i) * d, d) = u.coords();
  const bool complex = T.field() == Field::complex || u.field() == Field::complex ||
                       std::any_of(z.begin(), z.end(), [](Scalar s) { return s.imag() != 0.0; });
  rep.krylov = krylov_rank(OperatorModel::direct_sum(parts), Vector(complex ? Field::complex : Field::real, x), tol);
  rep.agrees = rep.krylov.cyclic == rep.predicted_cyclic;
  return rep;
}

double volterra_intertwine_residual(Index m) {
  require(m >= 8, ErrorCode::invalid_argument, "grid must have at least 8 cells");
  const CMatrix v = materialize(OperatorModel::volterra(m));
  const CMatrix j = materialize(OperatorModel::composition_j(m));
  const CMatrix defect = 2.0 * j * v - v.transpose() * j;
  Eigen::JacobiSVD<CMatrix> svd(defect);
  return svd.singularValues()[0];
}

PhiReport phi_annihilation_check(const std::vector<double>& f, const std::vector<double>& g, Index m, Index n_max) {
  require(m >= 8, ErrorCode::invalid_argument, "grid must have at least 8 cells");
  require(static_cast<Index>(f.size()) == m && static_cast<Index>(g.size()) == m, ErrorCode::dimension_mismatch,
          "grid functions must have m samples");
  require(n_max >= 0, ErrorCode::invalid_argument, "n_max must be nonnegative");
  const auto V = OperatorModel::volterra(m);
  const CMatrix j = materialize(OperatorModel::composition_j(m));
  CVector fv(m), gv(m);
  for (Index i = 0; i < m; ++i) {
    fv[i] = f[static_cast<std::size_t>(i)];
    gv[i] = g[static_cast<std::size_t>(i)];
  }
  const double h = 1.0 / static_cast<double>(m);
  auto pair = [&](const CVector& a, const CVector& b) { return (a.array() * b.array()).sum().real() * h; };
  const CVector jg = j * gv, jtf = j.transpose() * fv;
  PhiReport rep;
  rep.m = m;
  rep.n_max = n_max;
  CVector a = fv, b = gv;
  for (Index n = 0; n <= n_max; ++n) {
    const double phi = pair(a, jg) - pair(b, jtf);
    rep.phi.push_back(phi);
    rep.max_abs = std::max(rep.max_abs, std::abs(phi));
    a = apply_raw(V, a);
    b = 2.0 * apply_raw(V, b);
  }
  rep.defect = volterra_intertwine_residual(m) * std::sqrt(fv.squaredNorm() * h) * std::sqrt(gv.squaredNorm() * h);
  return rep;
}

DirectSumInstance direct_sum_instance(std::uint64_t seed, Index max_d, Index max_n) {
  require(max_d >= 1 && max_n >= 1, ErrorCode::invalid_argument, "instance bounds must be positive");
  Rng rng(seed);
  DirectSumInstance inst;
  const Index d = rng.integer(1, max_d), n = rng.integer(1, max_n);
  // Distinct nonzero integer eigenvalues.
  std::vector<double> lam;
  while (static_cast<Index>(lam.size()) < d) {
    const double l = static_cast<double>(rng.integer(-4, 4));
    if (l != 0.0 && std::find(lam.begin(), lam.end(), l) == lam.end()) lam.push_back(l);
  }
  // Unit lower-triangular P and its inverse are both integer matrices.
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
  for (Index r = 1; r < d; ++r)
    for (Index c = 0; c < r; ++c) p(r, c) = static_cast<double>(rng.integer(-1, 1));
  const Eigen::MatrixXd pinv = p.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(d, d);
  for (Index j = 0; j < d; ++j) diag(j, j) = lam[static_cast<std::size_t>(j)];
  inst.T = (p * diag * pinv).cast<Scalar>();
  Eigen::VectorXd c(d);
  for (Index j = 0; j < d; ++j) c[j] = rng.integer(0, 1) ? static_cast<double>(rng.integer(1, 2)) : -static_cast<double>(rng.integer(1, 2));
  inst.u = (p * c).cast<Scalar>();

  auto gaussian = [&] {
    Scalar s;
    do {
      s = Scalar(static_cast<double>(rng.integer(-2, 2)), rng.integer(0, 2) ? 0.0 : static_cast<double>(rng.integer(-2, 2)));
    } while (s == Scalar(0.0));
    return s;
  };
  for (Index i = 0; i < n; ++i) inst.z.push_back(gaussian());
  if (n >= 2 && rng.integer(0, 2) == 0) {
    // z_1 = a l_b and z_2 = a l_c give z_1 l_c = z_2 l_b.
    const Scalar a = gaussian();
    const auto b = static_cast<std::size_t>(rng.integer(0, d - 1)), cc = static_cast<std::size_t>(rng.integer(0, d - 1));
    inst.z[0] = a * lam[b];
    inst.z[1] = a * lam[cc];
    inst.engineered_collision = true;
  }
  return inst;
}

SquareSumScan square_sum_scan(std::uint64_t seed, std::size_t instances, Index d, unsigned jobs) {
  require(d >= 1 && d <= 6, ErrorCode::invalid_argument, "scan dimension must lie in [1, 6]");
  std::vector<int> sum_cyc(instances, 0), sq_cyc(instances, 0);
  parallel_for(instances, jobs, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    Eigen::MatrixXd t(d, d);
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c) t(r, c) = static_cast<double>(rng.integer(-2, 2));
    const auto T = OperatorModel::dense_real(t);
    // T + T needs a cyclic vector; the best candidate is (x, y) for generic x, y.
    std::vector<double> xy(static_cast<std::size_t>(2 * d)), x(static_cast<std::size_t>(d));
    for (auto& v : xy) v = rng.normal();
    for (auto& v : x) v = rng.normal();
    sum_cyc[i] = krylov_rank(OperatorModel::direct_sum({T, T}), Vector::real(xy)).cyclic;
    sq_cyc[i] = krylov_rank(OperatorModel::dense_real(t * t), Vector::real(x)).cyclic;
  });
  SquareSumScan scan;
  scan.instances = instances;
  for (std::size_t i = 0; i < instances; ++i) {
    scan.sum_cyclic += static_cast<std::size_t>(sum_cyc[i]);
    scan.square_cyclic += static_cast<std::size_t>(sq_cyc[i]);
    if (sum_cyc[i] && !sq_cyc[i]) ++scan.candidates;
  }
  return scan;
}

}  // namespace hypdyn
