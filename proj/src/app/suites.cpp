#include "app/suites.hpp"

#include "core/criteria.hpp"
#include "core/cyclicity.hpp"
#include "core/orbit.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"
#include "core/torus.hpp"
#include "core/winding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hypdyn {

namespace {

Vector random_real(Rng& rng, Index d) {
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = rng.normal();
  return Vector::real(v);
}

OperatorModel random_dense(Rng& rng, Index d) {
  CMatrix m(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = scale * rng.normal();
  return OperatorModel::dense(Field::real, m);
}

template <class T, class F>
double max_of(const std::vector<T>& v, F f) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, f(x));
  return m;
}

}  // namespace

WindingSuite winding_suite(std::uint64_t seed, std::size_t paths, std::size_t samples, unsigned jobs) {
  require(samples >= 4, ErrorCode::invalid_argument, "winding suite needs at least 4 samples per path");
  struct Slot {
    double concat, reparam, scale, closed, avoid;
    bool snapped, bound_ok;
  };
  std::vector<Slot> slots(paths);
  parallel_for(paths, jobs, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    Slot s{};
    const auto p = random_open_path(rng, samples);
    auto q = random_open_path(rng, samples);
    q = scale(p.turns(p.size() - 1) - q.turns(0), q);
    const double wp = winding(p).turns;
    s.concat = std::fabs(winding(concatenate(p, q)).turns - wp - winding(q).turns);

    // h(v) = a + (b - a) v^2 on a fine grid plus p's own knots.
    const double a = p.times().front(), b = p.times().back();
    std::vector<double> h = p.times();
    const std::size_t fine = 4 * samples;
    for (std::size_t j = 0; j <= fine; ++j) {
      const double v = static_cast<double>(j) / static_cast<double>(fine);
      h.push_back(a + (b - a) * v * v);
    }
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    h.front() = a;
    h.back() = b;
    std::vector<double> sv;
    for (double v : h) sv.push_back(std::sqrt((v - a) / (b - a)));
    for (std::size_t j = 1; j < sv.size(); ++j) sv[j] = std::max(sv[j], std::nextafter(sv[j - 1], 2.0));
    s.reparam = std::fabs(winding(reparametrize(p, sv, h)).turns - wp);

    s.scale = std::fabs(winding(scale(rng.uniform(-3.0, 3.0), p)).turns - wp);

    const int k = static_cast<int>(rng.integer(-5, 5));
    const auto w = winding(random_closed_path(rng, 2 * samples, k));
    s.snapped = w.snapped;
    s.closed = std::fabs(w.turns - k);

    const double z0 = rng.uniform();
    const auto av = random_avoiding_path(rng, samples, z0, 1e-3);
    s.avoid = std::fabs(winding(av).turns);
    s.bound_ok = omit_point_bound_check(av, z0, 1e-3) && s.avoid < 1.0;
    slots[i] = s;
  });
  WindingSuite out;
  out.paths = paths;
  out.concat_max = max_of(slots, [](const Slot& s) { return s.concat; });
  out.reparam_max = max_of(slots, [](const Slot& s) { return s.reparam; });
  out.scale_max = max_of(slots, [](const Slot& s) { return s.scale; });
  out.closed_max = max_of(slots, [](const Slot& s) { return s.closed; });
  out.avoid_max_abs = max_of(slots, [](const Slot& s) { return s.avoid; });
  for (const auto& s : slots) {
    out.closed_snapped += s.snapped;
    out.avoid_bound_ok += s.bound_ok;
  }
  return out;
}

IdentitySuite identity_suite(std::uint64_t seed, std::size_t instances, Index max_dim, Index max_power,
                             unsigned jobs) {
  require(max_dim >= 2 && max_power >= 1, ErrorCode::invalid_argument, "identity suite needs max_dim >= 2, max_power >= 1");
  struct Slot {
    double tele, orbit, sim, ratio, shift;
  };
  std::vector<Slot> slots(instances);
  parallel_for(instances, jobs, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const Index d = rng.integer(2, max_dim);
    const Index n = rng.integer(1, max_power);
    const auto S = random_dense(rng, d);
    const Vector x = random_real(rng, d), u = random_real(rng, d), y = random_real(rng, d), v = random_real(rng, d);
    Slot s{};
    s.tele = telescoping_check(S, x, n).relative();
    s.orbit = su_orbit_identity_check(S, u, y, n).relative();
    s.sim = su_similarity_check(S, v).relative();

    const Index k = rng.integer(1, 4);
    std::vector<Scalar> z;
    for (Index j = 0; j < k; ++j) z.push_back(std::polar(rng.uniform(0.5, 2.0), kTwoPi * rng.uniform()));
    s.ratio = ratio_structure_check(S, z, x, n).max_relative_residual;

    const auto a = orbit(S, x, n), b = orbit(S, apply(S, x), n - 1);
    for (Index j = 0; j + 1 < static_cast<Index>(a.size()) && j < static_cast<Index>(b.size()); ++j) {
      const auto& p = a[static_cast<std::size_t>(j + 1)];
      const auto& q = b[static_cast<std::size_t>(j)];
      if (p.is_zero() || q.is_zero()) continue;
      s.shift = std::max(s.shift, (p.unit - std::exp(q.lognorm - p.lognorm) * q.unit).norm());
    }
    slots[i] = s;
  });
  IdentitySuite out;
  out.instances = instances;
  out.telescoping_max = max_of(slots, [](const Slot& s) { return s.tele; });
  out.su_orbit_max = max_of(slots, [](const Slot& s) { return s.orbit; });
  out.su_similarity_max = max_of(slots, [](const Slot& s) { return s.sim; });
  out.ratio_max = max_of(slots, [](const Slot& s) { return s.ratio; });
  out.orbit_shift_max = max_of(slots, [](const Slot& s) { return s.shift; });
  return out;
}

VandermondeBatch vandermonde_batch(std::uint64_t seed, std::size_t tuples, Index max_n, Index max_d, unsigned jobs) {
  std::vector<VandermondeReport> reps(tuples);
  parallel_for(tuples, jobs, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const Index n = rng.integer(1, max_n), d = rng.integer(1, max_d);
    std::vector<Scalar> z;
    for (Index j = 0; j < n; ++j) z.push_back(std::polar(1.0, kTwoPi * rng.uniform()));
    reps[i] = vandermonde_span_check(z, d);
  });
  VandermondeBatch out;
  out.tuples = tuples;
  for (const auto& r : reps) {
    out.full_rank += r.full_rank;
    out.min_sigma_ratio = std::min(out.min_sigma_ratio, r.sigma_ratio);
  }
  return out;
}

DirectSumBatch direct_sum_batch(std::uint64_t seed, std::size_t instances, Index max_d, Index max_n, unsigned jobs) {
  struct Slot {
    bool agree, predicted, engineered;
  };
  std::vector<Slot> slots(instances);
  parallel_for(instances, jobs, [&](std::size_t i) {
    const auto inst = direct_sum_instance(mix_seed(seed, i), max_d, max_n);
    const auto rep = direct_sum_cyclicity(OperatorModel::dense(Field::complex, inst.T), inst.z, Vector(Field::complex, inst.u));
    slots[i] = {rep.agrees, rep.predicted_cyclic, inst.engineered_collision};
  });
  DirectSumBatch out;
  out.instances = instances;
  for (const auto& s : slots) {
    out.agree += s.agree;
    out.predicted_cyclic += s.predicted;
    out.engineered += s.engineered;
  }
  return out;
}

TorusBatch torus_batch(std::uint64_t seed, std::size_t tuples, std::size_t max_k, std::int64_t max_q, unsigned jobs) {
  std::vector<std::pair<bool, std::int64_t>> slots(tuples);
  parallel_for(tuples, jobs, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_k)));
    std::vector<Angle> c;
    for (std::size_t j = 0; j < k; ++j) {
      const auto q = rng.integer(1, max_q);
      c.push_back(Angle::rational(rng.integer(0, q - 1), q));
    }
    const TorusPoint g(c);
    const auto sub = closure_of_powers(g);
    const auto brute = enumerate_powers(g);
    bool ok = sub.finite && sub.exact && sub.order == static_cast<std::int64_t>(brute.size());
    if (ok) {
      std::set<std::string> a, b;
      for (const auto& e : sub.elements()) a.insert(e.spec());
      for (const auto& e : brute) b.insert(e.spec());
      ok = a == b;
    }
    slots[i] = {ok, sub.order};
  });
  TorusBatch out;
  out.tuples = tuples;
  for (const auto& [ok, order] : slots) {
    out.matches += ok;
    out.max_order = std::max(out.max_order, order);
  }
  return out;
}

double rotation_coverage(double turns, Index n, double epsilon, std::size_t net, std::uint64_t seed, unsigned jobs) {
  const auto orb = orbit(OperatorModel::rotation2d(turns), Vector::real({1.0, 0.0}), n);
  return coverage(orb, sphere_net(2, net, seed), epsilon, CoverageMode::plain, jobs).fraction;
}

}  // namespace hypdyn
