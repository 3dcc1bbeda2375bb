#pragma once

#include "core/operator_model.hpp"
#include "core/torus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypdyn {

// ---------------------------------------------------------------------------
// Supercyclicity Criterion witnesses

// One direct summand of a witness: S_{i,k} = right_inverse^{n_k}, scalars
// s_{i,k} > 0 (one per k).
struct WitnessComponent {
  Index dim = 0;
  OperatorModel right_inverse;
  std::vector<double> s;
};

struct CriterionWitness {
  std::vector<Index> n;  // strictly increasing
  std::vector<WitnessComponent> components;
  std::vector<Vector> E, F;  // vectors of the full (summed) space

  Index dim() const;
  void validate() const;
};

// Residual curves; norms are block maxima of the component 2-norms, which
// reduces to the 2-norm for a single component.
struct CriterionReport {
  std::vector<Index> n;
  std::vector<double> r1, r2, r3;
  std::size_t tail_start = 0;
  double tol = 0.0;
  bool pass = false;
};

CriterionReport verify_criterion(const OperatorModel& model, const CriterionWitness& w, std::size_t tail_start,
                                 double tol);

CriterionWitness combine_witnesses(const std::vector<CriterionWitness>& parts);

// Witness for T = c B on dimension `dim`: S_k = (F / c)^{n_k}, with E and F
// the first `depth` basis vectors plus any `extra_E` vectors.
CriterionWitness shift_witness(double c, Index dim, Index depth, std::vector<Index> n, std::vector<double> s,
                               std::vector<Vector> extra_E = {});

// ---------------------------------------------------------------------------
// Dual point spectrum and the R+ classification

struct SpectrumDescriptor {
  enum class Kind { empty, singleton, full_numeric };
  enum class Provenance { symbolic_fact, dense_eigensolve };

  Kind kind = Kind::empty;
  std::vector<Scalar> values;  // eigenvalues of the dual (transpose) map
  std::optional<Angle> phase;  // singleton only: arg z in turns
  Provenance provenance = Provenance::symbolic_fact;
  bool truncation_unreliable = false;
  std::string source;  // which table entry or solver produced it

  static SpectrumDescriptor empty(std::string source);
  // z != 0; the phase is exact when z lies on an axis, approximate otherwise.
  static SpectrumDescriptor singleton(Scalar z, std::string source);
  static SpectrumDescriptor singleton(Scalar z, Angle phase, std::string source);
  static SpectrumDescriptor numeric(std::vector<Scalar> values, std::string source);
};

const char* spectrum_kind_name(SpectrumDescriptor::Kind k);
const char* provenance_name(SpectrumDescriptor::Provenance p);

// Exact turns for axis-aligned z, approximate otherwise.
Angle phase_of(Scalar z);

SpectrumDescriptor spectrum_of_adjoint(const OperatorModel& model);

struct RPlusVerdict {
  enum class Verdict { rplus_supercyclic, not_rplus, indeterminate };
  Verdict verdict = Verdict::indeterminate;
  std::string branch;  // which arm of the dichotomy decided
  std::string reason;
  bool exact = true;  // false: holds up to the denominator bound
  std::int64_t order = 0;
  std::int64_t max_denominator = 0;
};

const char* verdict_name(RPlusVerdict::Verdict v);

RPlusVerdict classify_rplus(bool supercyclic_assumed, const SpectrumDescriptor& spec,
                            std::int64_t max_denominator = 1000000);

// ---------------------------------------------------------------------------
// Ray obstruction

struct RayObstructionReport {
  double eigen_residual = 0.0;
  std::int64_t order = 0;  // exact order of z/|z|, 0 when infinite or unknown
  bool applicable = false;
  std::size_t n_max = 0;
  std::size_t distinct_phases = 0;
  std::size_t distinct_phases_half = 0;  // over n <= n_max / 2
  bool bound_ok = false;                 // distinct <= order (applicable only)
};

// f acts as the bilinear functional v -> sum_i f_i v_i; (f, z) must satisfy
// T' f = z f with T' the transpose.
RayObstructionReport ray_obstruction_check(const OperatorModel& model, const Vector& f, Scalar z,
                                           std::optional<Angle> phase, const Vector& x, std::size_t n_max);

// Number of clusters of circle points (turns) separated by more than tol.
std::size_t count_distinct_phases(std::vector<double> turns, double tol);

// ---------------------------------------------------------------------------
// S_u algebra

// sum_{j<n} S^j v by Horner's rule.
Vector pn_apply(const OperatorModel& S, Index n, const Vector& v);

struct IdentityResidual {
  double residual = 0.0;
  double scale = 1.0;
  double relative() const { return residual / scale; }
};

// |p_n(S)(I - S)x - (x - S^n x)|, scale = sum_{j<=n} |S^j x|.
IdentityResidual telescoping_check(const OperatorModel& S, const Vector& x, Index n);

// Max-norm gap between S_u^n (y, 1) and (y + p_n(S)(u - (I - S)y), 1).
IdentityResidual su_orbit_identity_check(const OperatorModel& S, const Vector& u, const Vector& y, Index n);

// |L^{-1} S_u L - (S + I_1)| in Frobenius norm, u = (I - S)v, L(x, s) = (x + s v, s).
IdentityResidual su_similarity_check(const OperatorModel& S, const Vector& v);

struct NotInRangeReport {
  double optimum_residual = 0.0;  // min over v, by least squares
  double optimum_check = 0.0;     // similarity residual evaluated at the optimum v
  double sampled_min = 0.0;       // min over a seeded random family of v
  std::size_t samples = 0;
  bool bounded_away = false;
};

// Similarity gap for u outside the range of I - S.
NotInRangeReport su_not_in_range_demo(const OperatorModel& S, const Vector& u, std::size_t samples,
                                      std::uint64_t seed);

}  // namespace hypdyn
