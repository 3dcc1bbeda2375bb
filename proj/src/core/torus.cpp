#include "core/torus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

namespace hypdyn {

namespace {

using i128 = __int128;

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const i128 l = static_cast<i128>(a / std::gcd(a, b)) * b;
  require(l <= INT64_MAX, ErrorCode::capacity, "group order overflows 64-bit integers");
  return static_cast<std::int64_t>(l);
}

// Distance from x to the nearest integer.
long double dist_to_int(long double x) { return std::fabs(x - std::nearbyint(x)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::invalid_argument,
          "cannot parse integer '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::invalid_argument,
          "cannot parse angle '" + std::string(s) + "'");
  return v;
}

double effective_uncertainty(const Angle& a) { return a.exact() ? 0x1p-53 : std::max(a.uncertainty(), 0x1p-53); }

}  // namespace

// ---------------------------------------------------------------------------
// Angle

Angle Angle::rational(std::int64_t p, std::int64_t q) {
  require(q > 0, ErrorCode::invalid_argument, "angle denominator must be positive");
  std::int64_t r = p % q;
  if (r < 0) r += q;
  const std::int64_t g = std::gcd(r, q);
  Angle a;
  a.exact_ = true;
  a.num_ = g ? r / g : 0;
  a.den_ = g ? q / g : 1;
  if (a.num_ == 0) a.den_ = 1;
  a.value_ = static_cast<double>(a.num_) / static_cast<double>(a.den_);
  return a;
}

Angle Angle::approximate(double turns, double uncertainty) {
  require(std::isfinite(turns), ErrorCode::invalid_argument, "angle must be finite");
  require(uncertainty >= 0.0, ErrorCode::invalid_argument, "angle uncertainty must be nonnegative");
  Angle a;
  a.exact_ = false;
  double v = turns - std::floor(turns);
  if (v >= 1.0) v = 0.0;
  a.value_ = v;
  a.uncertainty_ = uncertainty;
  return a;
}

Angle Angle::operator+(const Angle& other) const {
  if (exact_ && other.exact_) {
    const std::int64_t l = checked_lcm(den_, other.den_);
    const i128 n = static_cast<i128>(num_) * (l / den_) + static_cast<i128>(other.num_) * (l / other.den_);
    return rational(static_cast<std::int64_t>(n % l), l);
  }
  return approximate(value_ + other.value_, uncertainty_ + other.uncertainty_);
}

Angle Angle::times(std::int64_t n) const {
  if (exact_) {
    i128 r = (static_cast<i128>(num_) * n) % den_;
    if (r < 0) r += den_;
    return rational(static_cast<std::int64_t>(r), den_);
  }
  const long double v = static_cast<long double>(value_) * static_cast<long double>(n);
  const long double f = v - std::floor(v);
  return approximate(static_cast<double>(f), uncertainty_ * std::fabs(static_cast<double>(n)));
}

bool Angle::operator==(const Angle& other) const {
  if (exact_ != other.exact_) return false;
  if (exact_) return num_ == other.num_ && den_ == other.den_;
  return value_ == other.value_ && uncertainty_ == other.uncertainty_;
}

std::string Angle::spec() const {
  if (exact_) return den_ == 1 ? std::string("0") : std::to_string(num_) + "/" + std::to_string(den_);
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  std::string s(buf, ptr);
  if (uncertainty_ != 0x1p-52) {
    auto [p2, e2] = std::to_chars(buf, buf + sizeof buf, uncertainty_);
    s += "~" + std::string(buf, p2);
  }
  return s;
}

Angle Angle::parse(std::string_view text) {
  text = trim(text);
  require(!text.empty(), ErrorCode::invalid_argument, "empty angle");
  if (const auto slash = text.find('/'); slash != std::string_view::npos)
    return rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  if (const auto tilde = text.find('~'); tilde != std::string_view::npos)
    return approximate(parse_real(text.substr(0, tilde)), parse_real(text.substr(tilde + 1)));
  if (text.find_first_of(".eE") == std::string_view::npos) return rational(parse_int(text), 1);
  return approximate(parse_real(text));
}

// ---------------------------------------------------------------------------
// TorusPoint

TorusPoint::TorusPoint(std::vector<Angle> coords) : coords_(std::move(coords)) {}

TorusPoint TorusPoint::identity(std::size_t k) { return TorusPoint(std::vector<Angle>(k, Angle::rational(0, 1))); }

TorusPoint TorusPoint::parse(std::string_view text) {
  std::vector<Angle> coords;
  while (true) {
    const auto comma = text.find(',');
    coords.push_back(Angle::parse(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return TorusPoint(std::move(coords));
}

bool TorusPoint::all_exact() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Angle& a) { return a.exact(); });
}

TorusPoint TorusPoint::operator+(const TorusPoint& other) const {
  require(k() == other.k(), ErrorCode::dimension_mismatch, "torus points of different rank");
  std::vector<Angle> out;
  out.reserve(k());
  for (std::size_t i = 0; i < k(); ++i) out.push_back(coords_[i] + other.coords_[i]);
  return TorusPoint(std::move(out));
}

TorusPoint TorusPoint::power(std::int64_t n) const {
  std::vector<Angle> out;
  out.reserve(k());
  for (const auto& a : coords_) out.push_back(a.times(n));
  return TorusPoint(std::move(out));
}

bool TorusPoint::operator==(const TorusPoint& other) const { return coords_ == other.coords_; }

std::string TorusPoint::spec() const {
  std::string s;
  for (std::size_t i = 0; i < k(); ++i) {
    if (i) s += ',';
    s += coords_[i].spec();
  }
  return s;
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  require(a.k() == b.k(), ErrorCode::dimension_mismatch, "torus points of different rank");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.k(); ++i) {
    double d;
    if (a[i].exact() && b[i].exact()) {
      const Angle diff = a[i] + b[i].times(-1);
      d = diff.turns();
    } else {
      d = std::fabs(a[i].turns() - b[i].turns());
      d -= std::floor(d);
    }
    worst = std::max(worst, std::min(d, 1.0 - d));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Rational detection and lattices

std::pair<std::int64_t, std::int64_t> detect_rational(double turns, double uncertainty, std::int64_t max_den) {
  const long double x = static_cast<long double>(turns) - std::floor(static_cast<long double>(turns));
  const long double u = std::max<long double>(uncertainty, 0x1p-53L);
  // Continued-fraction convergents h/k of x.
  std::int64_t h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  long double r = x;
  for (int iter = 0; iter < 96; ++iter) {
    const long double a_ld = std::floor(r);
    if (a_ld > static_cast<long double>(max_den)) break;
    const std::int64_t a = static_cast<std::int64_t>(a_ld);
    const i128 h = static_cast<i128>(a) * h1 + h2;
    const i128 k = static_cast<i128>(a) * k1 + k2;
    if (k > max_den) break;
    h2 = h1;
    h1 = static_cast<std::int64_t>(h);
    k2 = k1;
    k1 = static_cast<std::int64_t>(k);
    const long double residual = std::fabs(static_cast<long double>(k1) * x - static_cast<long double>(h1));
    if (residual <= 4.0L * static_cast<long double>(k1) * u) return {h1, k1};
    const long double frac = r - a_ld;
    if (frac <= 0.0L) break;
    r = 1.0L / frac;
  }
  return {0, 0};
}

std::vector<std::vector<std::int64_t>> lattice_basis(std::vector<std::vector<std::int64_t>> rows) {
  if (rows.empty()) return rows;
  const std::size_t k = rows.front().size();
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < k && pivot_row < rows.size(); ++col) {
    while (true) {
      // Bring the row with the smallest nonzero |entry| in `col` to the pivot.
      std::size_t best = rows.size();
      for (std::size_t r = pivot_row; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
          best = r;
      if (best == rows.size()) break;
      std::swap(rows[pivot_row], rows[best]);
      bool reduced = false;
      for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        const std::int64_t q = rows[r][col] / rows[pivot_row][col];
        for (std::size_t c = 0; c < k; ++c) rows[r][c] -= q * rows[pivot_row][c];
        reduced = reduced || rows[r][col] != 0;
      }
      if (!reduced) break;
    }
    if (rows[pivot_row][col] != 0) {
      if (rows[pivot_row][col] < 0)
        for (auto& v : rows[pivot_row]) v = -v;
      ++pivot_row;
    }
  }
  rows.resize(pivot_row);
  return rows;
}

// ---------------------------------------------------------------------------
// Subgroups

std::vector<TorusPoint> SubgroupDescriptor::elements() const {
  require(finite, ErrorCode::precondition, "elements() needs a finite group");
  require(order <= 10000000, ErrorCode::capacity, "group too large to enumerate");
  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(order));
  for (std::int64_t j = 0; j < order; ++j) out.push_back(generator.power(j));
  return out;
}

std::int64_t SubgroupDescriptor::index_of(const TorusPoint& p) const {
  require(finite, ErrorCode::precondition, "index_of() needs a finite group");
  require(p.k() == generator.k(), ErrorCode::dimension_mismatch, "torus point of wrong rank");
  for (std::int64_t j = 0; j < order; ++j) {
    const TorusPoint g = generator.power(j);
    if (exact && p.all_exact()) {
      if (g == p) return j;
    } else if (torus_distance(g, p) <= 1e-9) {
      return j;
    }
  }
  return -1;
}

bool SubgroupDescriptor::contains(const TorusPoint& p, double tol) const {
  require(p.k() == generator.k(), ErrorCode::dimension_mismatch, "torus point of wrong rank");
  if (finite) return index_of(p) >= 0;
  for (const auto& m : relations) {
    long double s = 0.0L;
    double l1 = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      s += static_cast<long double>(m[i]) * static_cast<long double>(p[i].turns());
      l1 += std::fabs(static_cast<double>(m[i]));
    }
    if (dist_to_int(s) > tol * std::max(1.0, l1)) return false;
  }
  return true;
}

std::vector<TorusPoint> enumerate_powers(const TorusPoint& z, std::int64_t cap) {
  require(z.all_exact(), ErrorCode::precondition, "power enumeration needs exact angles");
  std::vector<TorusPoint> out{TorusPoint::identity(z.k())};
  TorusPoint cur = z;
  const TorusPoint start = out.front();
  while (!(cur == start)) {
    require(static_cast<std::int64_t>(out.size()) < cap, ErrorCode::capacity, "power enumeration exceeded cap");
    out.push_back(cur);
    cur = cur + z;
  }
  return out;
}

SubgroupDescriptor closure_of_powers(const TorusPoint& z, SearchBounds bounds) {
  require(z.k() >= 1, ErrorCode::invalid_argument, "torus point needs at least one coordinate");
  SubgroupDescriptor out;
  out.generator = z;
  out.bounds = bounds;
  if (z.all_exact()) {
    std::int64_t order = 1;
    for (const auto& a : z.coords()) order = checked_lcm(order, a.den());
    out.finite = true;
    out.order = order;
    out.exact = true;
    return out;
  }
  require(z.k() <= 4, ErrorCode::invalid_argument, "relation search supports at most 4 approximate coordinates");
  out.exact = false;

  std::int64_t order = 1;
  bool all_rational = true;
  for (const auto& a : z.coords()) {
    if (a.exact()) {
      order = checked_lcm(order, a.den());
      continue;
    }
    const auto [p, q] = detect_rational(a.turns(), a.uncertainty(), bounds.max_denominator);
    if (q == 0) {
      all_rational = false;
      break;
    }
    order = checked_lcm(order, q);
  }
  if (all_rational) {
    out.finite = true;
    out.order = order;
    return out;
  }

  // Exhaustive search for m in [-M, M]^k with m . theta in Z; the first
  // nonzero entry is kept positive so each relation appears once.
  const std::size_t k = z.k();
  const std::int64_t M = bounds.relation_bound;
  std::vector<std::vector<std::int64_t>> found;
  std::vector<std::int64_t> m(k, -M);
  while (true) {
    std::size_t first = 0;
    while (first < k && m[first] == 0) ++first;
    if (first < k && m[first] > 0) {
      long double s = 0.0L, tol = 0.0L;
      for (std::size_t i = 0; i < k; ++i) {
        s += static_cast<long double>(m[i]) * static_cast<long double>(z[i].turns());
        tol += 4.0L * std::fabs(static_cast<long double>(m[i])) * effective_uncertainty(z[i]);
      }
      if (dist_to_int(s) <= tol) found.push_back(m);
    }
    std::size_t i = 0;
    while (i < k && m[i] == M) m[i++] = -M;
    if (i == k) break;
    ++m[i];
  }
  out.relations = lattice_basis(std::move(found));
  out.identity_component_dim = static_cast<int>(k - out.relations.size());
  out.finite = false;
  return out;
}

GeneratorVerdict is_generator(const Angle& z, std::int64_t max_denominator) {
  GeneratorVerdict v;
  v.max_denominator = max_denominator;
  if (z.exact()) {
    v.generator = false;
    v.exact = true;
    v.order = z.den();
    return v;
  }
  v.exact = false;
  const auto [p, q] = detect_rational(z.turns(), z.uncertainty(), max_denominator);
  if (q != 0) {
    v.generator = false;
    v.order = q;
  } else {
    v.generator = true;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Cosets

std::optional<std::vector<std::int64_t>> common_coset_subgroup(const std::vector<std::vector<std::int64_t>>& sets,
                                                               std::int64_t q) {
  std::optional<std::set<std::int64_t>> common;
  for (const auto& f : sets) {
    if (f.empty()) continue;
    std::set<std::int64_t> diffs;
    for (auto a : f)
      for (auto b : f) diffs.insert(((a - b) % q + q) % q);
    if (diffs.size() != std::set<std::int64_t>(f.begin(), f.end()).size()) return std::nullopt;
    if (common && *common != diffs) return std::nullopt;
    common = std::move(diffs);
  }
  if (!common) return std::vector<std::int64_t>{0};
  return std::vector<std::int64_t>(common->begin(), common->end());
}

CosetEstimate estimate_cosets(const std::vector<std::pair<Vector, TorusPoint>>& samples, const Vector& x,
                              const std::vector<Vector>& net, double epsilon, CoverageMode mode,
                              const SubgroupDescriptor& group) {
  require(!samples.empty(), ErrorCode::invalid_argument, "estimate_cosets needs at least one sample");
  require(group.finite, ErrorCode::precondition, "estimate_cosets needs a finite group");
  require(epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");

  // Element lookup, exact keys where possible.
  const auto elems = group.elements();
  std::map<std::string, std::int64_t> exact_index;
  if (group.exact)
    for (std::int64_t j = 0; j < group.order; ++j) exact_index.emplace(elems[static_cast<std::size_t>(j)].spec(), j);
  auto locate = [&](const TorusPoint& h) -> std::int64_t {
    if (group.exact && h.all_exact()) {
      const auto it = exact_index.find(h.spec());
      return it == exact_index.end() ? -1 : it->second;
    }
    for (std::int64_t j = 0; j < group.order; ++j)
      if (torus_distance(elems[static_cast<std::size_t>(j)], h) <= 1e-9) return j;
    return -1;
  };
  std::vector<std::int64_t> sample_index;
  sample_index.reserve(samples.size());
  for (const auto& [v, h] : samples) {
    const auto j = locate(h);
    require(j >= 0, ErrorCode::precondition, "sample phase " + h.spec() + " is not an element of G");
    sample_index.push_back(j);
  }

  auto collect = [&](const Vector& y) {
    std::set<std::int64_t> hits;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& v = samples[s].first;
      if (mode != CoverageMode::plain && v.norm() == 0.0) continue;
      if (distance(v, y, mode) <= epsilon) hits.insert(sample_index[s]);
    }
    return std::vector<std::int64_t>(hits.begin(), hits.end());
  };

  CosetEstimate est;
  est.sets.reserve(net.size());
  for (const auto& y : net) est.sets.push_back(collect(y));
  est.at_x = collect(x);

  auto all_sets = est.sets;
  all_sets.push_back(est.at_x);
  if (auto h = common_coset_subgroup(all_sets, group.order)) {
    est.consistent = true;
    est.subgroup = std::move(*h);
    est.subgroup_matches_x = est.at_x == est.subgroup;
  }
  return est;
}

}  // namespace hypdyn
