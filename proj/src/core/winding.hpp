#pragma once

#include "core/common.hpp"
#include "core/random.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hypdyn {

// Angles are stored as 64-bit fixed point turns (2^64 units per turn), so
// rotation is exact modular addition and every step between adjacent
// samples is an exact signed 64-bit difference.
using FixedTurns = std::uint64_t;

FixedTurns to_fixed(double turns);
double from_fixed(FixedTurns a);

class SampledPath {
 public:
  SampledPath() = default;
  // Times must be strictly increasing; adjacent angles must differ by less
  // than half a turn. `closed` asks for value(t0) == value(tm) within 1e-12.
  SampledPath(std::vector<double> times, std::vector<FixedTurns> angles, bool closed = false);
  static SampledPath from_turns(std::vector<double> times, const std::vector<double>& turns, bool closed = false);
  static SampledPath from_values(std::vector<double> times, const std::vector<Scalar>& values, bool closed = false);

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<FixedTurns>& angles() const { return angles_; }
  double turns(std::size_t i) const { return from_fixed(angles_[i]); }
  Scalar value(std::size_t i) const;
  bool closed() const { return closed_; }

  // Exact lift increment between samples i and i+1.
  std::int64_t step(std::size_t i) const { return static_cast<std::int64_t>(angles_[i + 1] - angles_[i]); }

  std::string to_csv() const;
  static SampledPath from_csv(std::string_view text, bool closed = false);

 private:
  std::vector<double> times_;
  std::vector<FixedTurns> angles_;
  bool closed_ = false;
};

struct Winding {
  double turns = 0.0;
  __int128 fixed = 0;    // exact sum of steps
  bool snapped = false;  // closed path, snapped to an integer
};

Winding winding(const SampledPath& p);

// q is shifted in time to start where p ends.
SampledPath concatenate(const SampledPath& p, const SampledPath& q);
// New sample times s_j mapped through h_j = h(s_j) into p's time range; h
// must be nondecreasing with h_0 = t_0 and h_last = t_m. Values between
// samples follow p's piecewise-linear lift.
SampledPath reparametrize(const SampledPath& p, const std::vector<double>& s, const std::vector<double>& h);
SampledPath scale(double u_turns, const SampledPath& p);
// Inserts the lift midpoint between every pair of samples.
SampledPath refine(const SampledPath& p);

// |w(p)| < 1 for a path that keeps at least `margin` turns away from z0.
bool omit_point_bound_check(const SampledPath& p, double z0_turns, double margin = 1e-9);

struct LemmaMapReport {
  double z_turns = 0.0;  // arg z in (-1/2, 1/2]
  int m = 0;
  std::size_t samples = 0;
  std::string path_kind;  // "segment" or "arc"
  double w_beta = 0.0;
  double sum_mid = 0.0;
  double additivity_residual = 0.0;  // |sum_mid - m w_beta|
  bool bound_ok = false;
};

// beta is the normalized image of the segment [1, z]; when that segment runs
// through 0 (z = -1) the unit arc from 1 to z is used instead.
LemmaMapReport lemma_map_demo(double z_turns, int m, std::size_t samples);

// Generators used by tests and the winding experiment.
SampledPath random_open_path(Rng& rng, std::size_t samples);
// Closed path with exactly `turns` full turns.
SampledPath random_closed_path(Rng& rng, std::size_t samples, int turns);
// Reflected walk that keeps `margin` turns away from z0.
SampledPath random_avoiding_path(Rng& rng, std::size_t samples, double z0_turns, double margin);

}  // namespace hypdyn
