#pragma once

#include "core/common.hpp"

#include <cstddef>
#include <cstdint>

namespace hypdyn {

// Seeded property batches shared by the CLI experiments and the acceptance
// runner. Instance i always draws from mix_seed(seed, i).

struct WindingSuite {
  std::size_t paths = 0;
  double concat_max = 0.0;    // |w(p.q) - w(p) - w(q)|
  double reparam_max = 0.0;   // |w(p o h) - w(p)|
  double scale_max = 0.0;     // |w(u p) - w(p)|
  double closed_max = 0.0;    // |w - k| on closed paths with k turns
  std::size_t closed_snapped = 0;
  double avoid_max_abs = 0.0;  // max |w| over paths omitting a point
  std::size_t avoid_bound_ok = 0;
};

WindingSuite winding_suite(std::uint64_t seed, std::size_t paths, std::size_t samples, unsigned jobs);

struct IdentitySuite {
  std::size_t instances = 0;
  double telescoping_max = 0.0;
  double su_orbit_max = 0.0;
  double su_similarity_max = 0.0;
  double ratio_max = 0.0;
  double orbit_shift_max = 0.0;
};

IdentitySuite identity_suite(std::uint64_t seed, std::size_t instances, Index max_dim, Index max_power,
                             unsigned jobs);

struct VandermondeBatch {
  std::size_t tuples = 0;
  std::size_t full_rank = 0;
  double min_sigma_ratio = 1.0;
};

VandermondeBatch vandermonde_batch(std::uint64_t seed, std::size_t tuples, Index max_n, Index max_d, unsigned jobs);

struct DirectSumBatch {
  std::size_t instances = 0;
  std::size_t agree = 0;
  std::size_t predicted_cyclic = 0;
  std::size_t engineered = 0;
};

DirectSumBatch direct_sum_batch(std::uint64_t seed, std::size_t instances, Index max_d, Index max_n, unsigned jobs);

struct TorusBatch {
  std::size_t tuples = 0;
  std::size_t matches = 0;  // closure equals brute-force enumeration
  std::int64_t max_order = 0;
};

TorusBatch torus_batch(std::uint64_t seed, std::size_t tuples, std::size_t max_k, std::int64_t max_q, unsigned jobs);

// Coverage of the unit circle by the rotation orbit of (1, 0).
double rotation_coverage(double turns, Index n, double epsilon, std::size_t net, std::uint64_t seed, unsigned jobs);

}  // namespace hypdyn
