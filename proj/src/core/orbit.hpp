#pragma once

#include "core/metric.hpp"
#include "core/operator_model.hpp"
#include "core/torus.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace hypdyn {

// T^k x kept as a unit direction plus ln of its norm, so expanding models
// never overflow.
struct OrbitPoint {
  CVector unit;
  double lognorm = 0.0;

  bool is_zero() const { return lognorm == -std::numeric_limits<double>::infinity(); }
  CVector value() const;
};

// Entries 0..n; entry k is bitwise apply_power(model, k, x).
std::vector<OrbitPoint> orbit(const OperatorModel& model, const Vector& x, Index n);

// Seeded normalized Gaussian draws; complex field draws both parts.
std::vector<Vector> sphere_net(Index dim, std::size_t count, std::uint64_t seed, Field field = Field::real);

struct CoverageReport {
  std::size_t net_size = 0;
  double epsilon = 0.0;
  CoverageMode mode = CoverageMode::plain;
  double fraction = 0.0;
  // curve[k]: fraction covered by orbit entries 0..k.
  std::vector<double> curve;
  // Orbit entries ignored because they vanish (quotient modes only).
  std::size_t skipped_zero = 0;
  std::uint64_t seed = 0;
};

// Orbit entries given as vectors; in quotient modes only directions matter.
CoverageReport coverage(const std::vector<OrbitPoint>& orbit, const std::vector<Vector>& net, double epsilon,
                        CoverageMode mode, unsigned jobs = 1);

struct CoupledPoint {
  OrbitPoint state;
  TorusPoint phase;
};

std::vector<CoupledPoint> coupled_orbit(const OperatorModel& model, const Vector& x, const TorusPoint& g, Index n);

struct CoupledNetPoint {
  Vector state;
  TorusPoint phase;
};

// Product metric: max of the mode distance and the torus distance.
CoverageReport coupled_coverage(const std::vector<CoupledPoint>& orbit, const std::vector<CoupledNetPoint>& net,
                                double epsilon, CoverageMode mode, unsigned jobs = 1);

}  // namespace hypdyn
