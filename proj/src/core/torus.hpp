#pragma once

#include "core/metric.hpp"
#include "core/operator_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hypdyn {

// One coordinate of a point of T^k, measured in turns and reduced to [0, 1).
// Exact angles are reduced fractions p/q; approximate ones carry an
// uncertainty (in turns) that every verdict derived from them inherits.
class Angle {
 public:
  static Angle rational(std::int64_t p, std::int64_t q);
  static Angle approximate(double turns, double uncertainty = 0x1p-52);

  bool exact() const { return exact_; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double turns() const { return value_; }
  double uncertainty() const { return uncertainty_; }

  Angle operator+(const Angle& other) const;
  Angle times(std::int64_t n) const;
  bool operator==(const Angle& other) const;

  // "p/q" for exact angles, shortest round-trip decimal otherwise.
  std::string spec() const;
  static Angle parse(std::string_view text);

 private:
  bool exact_ = true;
  std::int64_t num_ = 0, den_ = 1;
  double value_ = 0.0;
  double uncertainty_ = 0.0;
};

class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<Angle> coords);
  static TorusPoint identity(std::size_t k);
  // Comma-separated angles, e.g. "1/2,1/4" or "0.41421356237309503".
  static TorusPoint parse(std::string_view text);

  std::size_t k() const { return coords_.size(); }
  const Angle& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<Angle>& coords() const { return coords_; }
  bool all_exact() const;

  TorusPoint operator+(const TorusPoint& other) const;
  TorusPoint power(std::int64_t n) const;
  bool operator==(const TorusPoint& other) const;
  std::string spec() const;

 private:
  std::vector<Angle> coords_;
};

// Max over coordinates of the circular distance in turns, in [0, 1/2].
double torus_distance(const TorusPoint& a, const TorusPoint& b);

struct SearchBounds {
  std::int64_t max_denominator = 1000000;  // Q
  std::int64_t relation_bound = 20;        // M
};

// Closed subgroup generated by the powers of one element.
struct SubgroupDescriptor {
  bool finite = false;
  std::int64_t order = 0;  // finite only
  TorusPoint generator;
  // Integer vectors m with m . theta in Z, in echelon form (infinite only).
  std::vector<std::vector<std::int64_t>> relations;
  int identity_component_dim = 0;
  bool exact = true;  // false: verdict holds up to `bounds`
  SearchBounds bounds;

  // Exact for finite exact groups; relation residual <= tol otherwise.
  bool contains(const TorusPoint& p, double tol = 1e-9) const;
  // g^0..g^{order-1} (finite groups only).
  std::vector<TorusPoint> elements() const;
  // j with g^j == p, or -1.
  std::int64_t index_of(const TorusPoint& p) const;
};

SubgroupDescriptor closure_of_powers(const TorusPoint& z, SearchBounds bounds = {});

// Brute-force orbit {z^n} for exact points, enumerated until it repeats.
std::vector<TorusPoint> enumerate_powers(const TorusPoint& z, std::int64_t cap = 1000000);

struct GeneratorVerdict {
  bool generator = false;
  bool exact = true;          // false: "up to Q"
  std::int64_t order = 0;     // 0 when no finite order was found
  std::int64_t max_denominator = 0;
};

// k = 1 only.
GeneratorVerdict is_generator(const Angle& z, std::int64_t max_denominator = 1000000);

// Best rational approximation p/q with q <= max_den whose residual |q x - p|
// is within the tolerance implied by `uncertainty`; {0, 0} when none exists.
std::pair<std::int64_t, std::int64_t> detect_rational(double turns, double uncertainty, std::int64_t max_den);

// Row-echelon basis of the integer lattice spanned by `rows`.
std::vector<std::vector<std::int64_t>> lattice_basis(std::vector<std::vector<std::int64_t>> rows);

struct CosetEstimate {
  // For each net point, the sorted indices j of the elements g^j observed
  // within epsilon. Finite sampling only ever under-approximates these sets.
  std::vector<std::vector<std::int64_t>> sets;
  std::vector<std::int64_t> at_x;        // the set attached to x itself
  bool consistent = false;               // all nonempty sets are cosets of one H
  std::vector<std::int64_t> subgroup;    // H, when consistent
  bool subgroup_matches_x = false;       // H == set at x
};

CosetEstimate estimate_cosets(const std::vector<std::pair<Vector, TorusPoint>>& samples, const Vector& x,
                              const std::vector<Vector>& net, double epsilon, CoverageMode mode,
                              const SubgroupDescriptor& group);

// Coset test in Z_q on index sets: H when every nonempty set is a coset of
// the same subgroup H, nullopt otherwise. With no nonempty set at all the
// structure is vacuously consistent and H is reported as {0}.
std::optional<std::vector<std::int64_t>> common_coset_subgroup(const std::vector<std::vector<std::int64_t>>& sets,
                                                               std::int64_t q);

}  // namespace hypdyn
