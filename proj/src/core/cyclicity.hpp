#pragma once

#include "core/operator_model.hpp"

#include <cstdint>
#include <vector>

namespace hypdyn {

struct KrylovReport {
  Index dim = 0;
  Index rank = 0;
  double tol = 1e-8;
  // pivots[0] = 1 for the normalized start; pivots[j] = h_{j+1,j} / |M|_F.
  std::vector<double> pivots;
  bool cyclic = false;
};

// Arnoldi with full reorthogonalization on [x, Mx, ..., M^{p-1}x],
// p = max_powers (default d). The rank is the number of leading pivots that
// stay above tol.
KrylovReport krylov_rank(const OperatorModel& model, const Vector& x, double tol = 1e-8, Index max_powers = -1);

struct VandermondeReport {
  Index n = 0, d = 0;
  Index rank = 0;
  double sigma_ratio = 0.0;  // smallest / largest singular value
  bool repeated = false;     // some z_i coincide
  bool full_rank = false;
};

// Rank of the nd vectors (z_1^k a, ..., z_n^k a), k < n, a over the standard
// basis of K^d; the rank threshold is nd * eps * sigma_max.
VandermondeReport vandermonde_span_check(const std::vector<Scalar>& z, Index d);

struct RatioReport {
  double max_relative_residual = 0.0;
  Index n_max = 0;
};

// Component i of (z_1 T + ... + z_n T)^k (u, ..., u) against (z_i/z_1)^k times
// component 1, k <= n_max, in lognorm bookkeeping.
RatioReport ratio_structure_check(const OperatorModel& T, const std::vector<Scalar>& z, const Vector& u, Index n_max);

struct DirectSumReport {
  KrylovReport krylov;
  std::vector<Scalar> eigenvalues;  // of T
  double min_product_gap = 0.0;     // min |z_i l_j - z_k l_l| over distinct index pairs
  bool predicted_cyclic = false;    // all products pairwise distinct
  bool agrees = false;
};

DirectSumReport direct_sum_cyclicity(const OperatorModel& T, const std::vector<Scalar>& z, const Vector& u,
                                     double tol = 1e-8);

// Seeded instance with integer T = P diag(l) P^{-1} (distinct integer l),
// integer u with nonzero weight on every eigenvector, and Gaussian-integer z.
// Roughly a third of the instances with n >= 2 have a planted collision.
struct DirectSumInstance {
  CMatrix T;
  std::vector<Scalar> z;
  CVector u;
  bool engineered_collision = false;
};

DirectSumInstance direct_sum_instance(std::uint64_t seed, Index max_d, Index max_n);

// Operator 2-norm of 2 J_m V_m - V_m^T J_m.
double volterra_intertwine_residual(Index m);

struct PhiReport {
  Index m = 0;
  Index n_max = 0;
  std::vector<double> phi;     // Phi at n = 0..n_max
  double max_abs = 0.0;
  double defect = 0.0;         // |D|_2 |f|_m |g|_m, the single-step bound
};

// Phi_n = <V^n f, J g> - <(2V)^n g, J^T f> with <x, y> = sum x_i y_i / m.
PhiReport phi_annihilation_check(const std::vector<double>& f, const std::vector<double>& g, Index m, Index n_max);

// Seeded scan over small integer matrices for T with T + T cyclic but T^2
// not cyclic. Nothing is asserted; counts are reported.
struct SquareSumScan {
  std::size_t instances = 0;
  std::size_t sum_cyclic = 0;
  std::size_t square_cyclic = 0;
  std::size_t candidates = 0;
};

SquareSumScan square_sum_scan(std::uint64_t seed, std::size_t instances, Index d, unsigned jobs = 1);

}  // namespace hypdyn
