#include "core/orbit.hpp"

#include "core/parallel.hpp"
#include "core/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypdyn {

namespace {

// Representation used for comparisons, together with a 1-Lipschitz scalar key
// that lets the search skip candidates: |key(a) - key(b)| <= d(a, b).
struct Prepared {
  CVector v;
  double key = 0.0;
};

Prepared prepare(const CVector& raw, CoverageMode mode) {
  Prepared p;
  if (mode == CoverageMode::plain) {
    p.v = raw;
    p.key = raw.size() ? raw[0].real() : 0.0;
  } else {
    p.v = raw / raw.norm();
    // The modulus of a coordinate does not depend on the phase representative.
    p.key = p.v.size() ? (mode == CoverageMode::projective_complex ? std::abs(p.v[0]) : p.v[0].real()) : 0.0;
  }
  return p;
}

double prepared_distance(const Prepared& a, const Prepared& b, CoverageMode mode) {
  return mode == CoverageMode::plain ? (a.v - b.v).norm() : unit_distance(a.v, b.v, mode);
}

// Turn the first orbit index that hits each net point into the report.
CoverageReport summarize(const std::vector<std::size_t>& first_hit, std::size_t orbit_len, double epsilon,
                         CoverageMode mode, std::size_t skipped) {
  CoverageReport rep;
  rep.net_size = first_hit.size();
  rep.epsilon = epsilon;
  rep.mode = mode;
  rep.skipped_zero = skipped;
  std::vector<std::size_t> hist(orbit_len + 1, 0);
  for (auto j : first_hit) ++hist[std::min(j, orbit_len)];
  rep.curve.resize(orbit_len);
  std::size_t acc = 0;
  for (std::size_t k = 0; k < orbit_len; ++k) {
    acc += hist[k];
    rep.curve[k] = static_cast<double>(acc) / static_cast<double>(rep.net_size);
  }
  rep.fraction = orbit_len ? rep.curve.back() : 0.0;
  return rep;
}

}  // namespace

CVector OrbitPoint::value() const {
  if (is_zero()) return CVector::Zero(unit.size());
  return unit * std::exp(lognorm);
}

std::vector<OrbitPoint> orbit(const OperatorModel& model, const Vector& x, Index n) {
  require(n >= 0, ErrorCode::invalid_argument, "orbit length must be nonnegative");
  const PowerResult start = apply_power(model, 0, x);  // validates dims and field
  std::vector<OrbitPoint> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back({start.unit.coords(), start.lognorm});
  CVector unit = start.unit.coords();
  double lognorm = start.lognorm;
  for (Index k = 0; k < n; ++k) {
    if (lognorm != -std::numeric_limits<double>::infinity()) lognorm += step_normalized(model, unit);
    out.push_back({unit, lognorm});
  }
  return out;
}

std::vector<Vector> sphere_net(Index dim, std::size_t count, std::uint64_t seed, Field field) {
  require(dim >= 1, ErrorCode::invalid_argument, "net dimension must be positive");
  require(count >= 1, ErrorCode::invalid_argument, "net needs at least one point");
  Rng rng(seed);
  std::vector<Vector> net;
  net.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CVector c(dim);
    double n = 0.0;
    do {
      for (Index j = 0; j < dim; ++j) c[j] = Scalar(rng.normal(), field == Field::complex ? rng.normal() : 0.0);
      n = c.norm();
    } while (n == 0.0);
    net.emplace_back(field, c / n);
  }
  return net;
}

CoverageReport coverage(const std::vector<OrbitPoint>& orb, const std::vector<Vector>& net, double epsilon,
                        CoverageMode mode, unsigned jobs) {
  require(epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
  require(!net.empty(), ErrorCode::invalid_argument, "empty net");
  const std::size_t len = orb.size();

  // Orbit entries sorted by key; ties keep orbit order.
  std::vector<Prepared> pts;
  std::vector<std::size_t> index;
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < len; ++k) {
    require(orb[k].unit.size() == net.front().dim(), ErrorCode::dimension_mismatch,
            "orbit and net dimensions differ");
    if (mode != CoverageMode::plain) {
      if (orb[k].is_zero()) {
        ++skipped;
        continue;
      }
      pts.push_back(prepare(orb[k].unit, mode));
    } else {
      pts.push_back(prepare(orb[k].value(), mode));
    }
    index.push_back(k);
  }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].key < pts[b].key; });
  std::vector<double> keys(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) keys[i] = pts[order[i]].key;

  std::vector<std::size_t> first_hit(net.size(), len);
  parallel_for(net.size(), jobs, [&](std::size_t i) {
    require(net[i].dim() == net.front().dim(), ErrorCode::dimension_mismatch, "net points of different dimension");
    const Prepared y = prepare(net[i].coords(), mode);
    auto lo = std::lower_bound(keys.begin(), keys.end(), y.key - epsilon);
    auto hi = std::upper_bound(keys.begin(), keys.end(), y.key + epsilon);
    std::size_t best = len;
    for (auto it = lo; it != hi; ++it) {
      const std::size_t p = order[static_cast<std::size_t>(it - keys.begin())];
      if (index[p] >= best) continue;
      if (prepared_distance(pts[p], y, mode) <= epsilon) best = index[p];
    }
    first_hit[i] = best;
  });
  return summarize(first_hit, len, epsilon, mode, skipped);
}

std::vector<CoupledPoint> coupled_orbit(const OperatorModel& model, const Vector& x, const TorusPoint& g, Index n) {
  auto states = orbit(model, x, n);
  std::vector<CoupledPoint> out;
  out.reserve(states.size());
  TorusPoint phase = TorusPoint::identity(g.k());
  for (auto& s : states) {
    out.push_back({std::move(s), phase});
    // Exact angles add in rational arithmetic; approximate ones as powers so
    // that rounding does not accumulate.
    phase = g.all_exact() ? phase + g : g.power(static_cast<std::int64_t>(out.size()));
  }
  return out;
}

CoverageReport coupled_coverage(const std::vector<CoupledPoint>& orb, const std::vector<CoupledNetPoint>& net,
                                double epsilon, CoverageMode mode, unsigned jobs) {
  require(epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
  require(!net.empty(), ErrorCode::invalid_argument, "empty net");
  const std::size_t len = orb.size();
  std::vector<Prepared> pts(len);
  std::vector<bool> usable(len, true);
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < len; ++k) {
    if (mode != CoverageMode::plain && orb[k].state.is_zero()) {
      usable[k] = false;
      ++skipped;
      continue;
    }
    pts[k] = prepare(mode == CoverageMode::plain ? orb[k].state.value() : orb[k].state.unit, mode);
  }
  std::vector<std::size_t> first_hit(net.size(), len);
  parallel_for(net.size(), jobs, [&](std::size_t i) {
    const Prepared y = prepare(net[i].state.coords(), mode);
    for (std::size_t k = 0; k < len; ++k) {
      if (!usable[k] || std::abs(pts[k].key - y.key) > epsilon) continue;
      if (torus_distance(orb[k].phase, net[i].phase) > epsilon) continue;
      if (prepared_distance(pts[k], y, mode) <= epsilon) {
        first_hit[i] = k;
        break;
      }
    }
  });
  return summarize(first_hit, len, epsilon, mode, skipped);
}

}  // namespace hypdyn
