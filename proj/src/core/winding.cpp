#include "core/winding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hypdyn {

namespace {

constexpr long double kUnit = 18446744073709551616.0L;  // 2^64

double frac(double t) { return t - std::floor(t); }

void check_times(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], ErrorCode::invalid_argument, "sample times must be strictly increasing");
}

// Lift of p at sample i relative to sample 0, exact.
std::vector<__int128> lift(const SampledPath& p) {
  std::vector<__int128> out(p.size(), 0);
  for (std::size_t i = 1; i < p.size(); ++i) out[i] = out[i - 1] + p.step(i - 1);
  return out;
}

std::string format(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

FixedTurns to_fixed(double turns) {
  require(std::isfinite(turns), ErrorCode::invalid_argument, "angle must be finite");
  const long double f = static_cast<long double>(frac(turns)) * kUnit;
  const long double r = std::nearbyint(f);
  return r >= kUnit ? 0 : static_cast<FixedTurns>(r);
}

double from_fixed(FixedTurns a) { return static_cast<double>(static_cast<long double>(a) / kUnit); }

SampledPath::SampledPath(std::vector<double> times, std::vector<FixedTurns> angles, bool closed)
    : times_(std::move(times)), angles_(std::move(angles)), closed_(closed) {
  require(times_.size() == angles_.size(), ErrorCode::dimension_mismatch, "times and angles differ in length");
  require(!times_.empty(), ErrorCode::invalid_argument, "path needs at least one sample");
  check_times(times_);
  for (std::size_t i = 0; i + 1 < size(); ++i) {
    // -2^63 is exactly half a turn: direction ambiguous.
    require(step(i) != INT64_MIN, ErrorCode::insufficient_sampling,
            "half-turn step between samples " + std::to_string(i) + " and " + std::to_string(i + 1));
  }
  if (closed_) {
    const std::int64_t gap = static_cast<std::int64_t>(angles_.back() - angles_.front());
    require(std::fabs(static_cast<double>(gap) / static_cast<double>(kUnit)) <= 1e-12, ErrorCode::invalid_argument,
            "closed path must end where it starts");
  }
}

SampledPath SampledPath::from_turns(std::vector<double> times, const std::vector<double>& turns, bool closed) {
  std::vector<FixedTurns> a;
  a.reserve(turns.size());
  for (double t : turns) a.push_back(to_fixed(t));
  return SampledPath(std::move(times), std::move(a), closed);
}

SampledPath SampledPath::from_values(std::vector<double> times, const std::vector<Scalar>& values, bool closed) {
  std::vector<double> turns;
  turns.reserve(values.size());
  for (const auto& v : values) {
    require(std::abs(std::abs(v) - 1.0) <= 1e-9, ErrorCode::invalid_argument, "path values must be unimodular");
    turns.push_back(std::arg(v) / kTwoPi);
  }
  return from_turns(std::move(times), turns, closed);
}

Scalar SampledPath::value(std::size_t i) const { return std::polar(1.0, kTwoPi * turns(i)); }

std::string SampledPath::to_csv() const {
  std::string s = "t,angle\n";
  for (std::size_t i = 0; i < size(); ++i) s += format(times_[i]) + "," + format(turns(i)) + "\n";
  return s;
}

SampledPath SampledPath::from_csv(std::string_view text, bool closed) {
  std::vector<double> t, a;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line == "t,angle") continue;
    const auto comma = line.find(',');
    require(comma != std::string_view::npos, ErrorCode::config, "line " + std::to_string(line_no) + ": expected t,angle");
    double tv = 0, av = 0;
    const auto r1 = std::from_chars(line.data(), line.data() + comma, tv);
    const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), av);
    require(r1.ec == std::errc() && r2.ec == std::errc() && r2.ptr == line.data() + line.size(), ErrorCode::config,
            "line " + std::to_string(line_no) + ": bad number");
    t.push_back(tv);
    a.push_back(av);
  }
  return from_turns(std::move(t), a, closed);
}

Winding winding(const SampledPath& p) {
  Winding w;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) w.fixed += p.step(i);
  w.turns = static_cast<double>(static_cast<long double>(w.fixed) / kUnit);
  if (p.closed()) {
    const double n = std::nearbyint(w.turns);
    require(std::fabs(w.turns - n) <= 1e-9, ErrorCode::internal, "closed path with non-integer winding");
    w.turns = n;
    w.snapped = true;
  }
  return w;
}

SampledPath concatenate(const SampledPath& p, const SampledPath& q) {
  const std::int64_t gap = static_cast<std::int64_t>(q.angles().front() - p.angles().back());
  require(std::fabs(static_cast<double>(gap) / static_cast<double>(kUnit)) <= 1e-12, ErrorCode::invalid_argument,
          "concatenate: p must end where q starts");
  std::vector<double> t = p.times();
  std::vector<FixedTurns> a = p.angles();
  const double shift = p.times().back() - q.times().front();
  // Keep q's steps verbatim so the winding adds exactly.
  FixedTurns cur = p.angles().back();
  for (std::size_t i = 1; i < q.size(); ++i) {
    t.push_back(q.times()[i] + shift);
    cur += static_cast<FixedTurns>(q.step(i - 1));
    a.push_back(cur);
  }
  return SampledPath(std::move(t), std::move(a), false);
}

SampledPath reparametrize(const SampledPath& p, const std::vector<double>& s, const std::vector<double>& h) {
  require(s.size() == h.size() && s.size() >= 2, ErrorCode::invalid_argument, "reparametrize needs matching samples");
  require(h.front() == p.times().front() && h.back() == p.times().back(), ErrorCode::invalid_argument,
          "reparametrization must preserve the endpoints");
  for (std::size_t j = 1; j < h.size(); ++j)
    require(h[j] >= h[j - 1], ErrorCode::invalid_argument, "reparametrization must be monotone");
  const auto L = lift(p);
  const auto& t = p.times();
  std::vector<FixedTurns> a;
  a.reserve(h.size());
  const __int128 half_turn = static_cast<__int128>(1) << 63;
  __int128 prev = 0;
  std::size_t i = 0;
  for (double hj : h) {
    while (i + 2 < t.size() && t[i + 1] <= hj) ++i;
    __int128 l;
    if (p.size() == 1 || hj <= t[i]) {
      l = L[i];
    } else if (hj >= t[i + 1]) {
      l = L[i + 1];
    } else {
      const long double f = (static_cast<long double>(hj) - t[i]) / (static_cast<long double>(t[i + 1]) - t[i]);
      l = L[i] + static_cast<__int128>(std::nearbyint(f * static_cast<long double>(p.step(i))));
    }
    // The new steps must stay resolvable, otherwise the lift is lost.
    require(a.empty() || (l - prev > -half_turn && l - prev < half_turn), ErrorCode::insufficient_sampling,
            "reparametrized samples are too coarse to follow the path");
    prev = l;
    a.push_back(p.angles().front() + static_cast<FixedTurns>(static_cast<unsigned __int128>(l)));
  }
  return SampledPath(s, std::move(a), p.closed());
}

SampledPath scale(double u_turns, const SampledPath& p) {
  const FixedTurns u = to_fixed(u_turns);
  std::vector<FixedTurns> a = p.angles();
  for (auto& v : a) v += u;
  return SampledPath(p.times(), std::move(a), p.closed());
}

SampledPath refine(const SampledPath& p) {
  std::vector<double> t;
  std::vector<FixedTurns> a;
  for (std::size_t i = 0; i < p.size(); ++i) {
    t.push_back(p.times()[i]);
    a.push_back(p.angles()[i]);
    if (i + 1 == p.size()) break;
    const double mid = 0.5 * (p.times()[i] + p.times()[i + 1]);
    if (!(mid > p.times()[i] && mid < p.times()[i + 1])) continue;
    t.push_back(mid);
    a.push_back(p.angles()[i] + static_cast<FixedTurns>(p.step(i) / 2));
  }
  return SampledPath(std::move(t), std::move(a), p.closed());
}

bool omit_point_bound_check(const SampledPath& p, double z0_turns, double margin) {
  const FixedTurns z0 = to_fixed(z0_turns);
  // Positions measured counterclockwise from z0, in (0, 1) turns.
  for (std::size_t i = 0; i < p.size(); ++i) {
    const FixedTurns r = p.angles()[i] - z0;
    const double d = static_cast<double>(static_cast<long double>(std::min<FixedTurns>(r, -r)) / kUnit);
    require(d >= margin, ErrorCode::precondition, "path comes within the margin of the omitted point");
  }
  // No step may sweep across z0 either.
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const __int128 end = static_cast<__int128>(p.angles()[i] - z0) + p.step(i);
    require(end > 0 && end < static_cast<__int128>(kUnit), ErrorCode::precondition, "path crosses the omitted point");
  }
  return std::fabs(winding(p).turns) < 1.0;
}

LemmaMapReport lemma_map_demo(double z_turns, int m, std::size_t samples) {
  require(samples >= 2, ErrorCode::invalid_argument, "lemma_map_demo needs at least two samples");
  double theta = frac(z_turns);
  if (theta > 0.5) theta -= 1.0;
  require(theta != 0.0, ErrorCode::precondition, "z must differ from 1");
  require(m >= 1, ErrorCode::invalid_argument, "m must be positive");
  require(m * std::fabs(theta) > 2.0, ErrorCode::precondition,
          "m |w(beta)| must exceed 2 (m = " + std::to_string(m) + ", |w| = " + format(std::fabs(theta)) + ")");

  LemmaMapReport rep;
  rep.z_turns = theta;
  rep.m = m;
  rep.samples = samples;
  const Scalar z = std::polar(1.0, kTwoPi * theta);
  std::vector<double> t(samples);
  std::vector<Scalar> v(samples);
  rep.path_kind = theta == 0.5 ? "arc" : "segment";
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(samples - 1);
    t[i] = s;
    if (rep.path_kind == "arc") {
      v[i] = std::polar(1.0, kTwoPi * theta * s);
    } else {
      const Scalar p = (1.0 - s) * Scalar(1.0) + s * z;
      v[i] = p / std::abs(p);
    }
  }
  // Endpoints exact so the rotated copies join.
  SampledPath beta = SampledPath::from_turns(t, [&] {
    std::vector<double> a(samples);
    for (std::size_t i = 0; i < samples; ++i) a[i] = std::arg(v[i]) / kTwoPi;
    a.front() = 0.0;
    a.back() = theta;
    return a;
  }());
  rep.w_beta = winding(beta).turns;

  // Middle section: z^{j-1} beta for j = 1..m, joined end to end.
  SampledPath mid = beta;
  for (int j = 2; j <= m; ++j) mid = concatenate(mid, scale(theta * (j - 1), beta));
  rep.sum_mid = winding(mid).turns;
  rep.additivity_residual = std::fabs(rep.sum_mid - m * rep.w_beta);
  rep.bound_ok = std::fabs(rep.sum_mid) > 2.0;
  return rep;
}

SampledPath random_open_path(Rng& rng, std::size_t samples) {
  require(samples >= 1, ErrorCode::invalid_argument, "path needs samples");
  std::vector<double> t(samples);
  std::vector<FixedTurns> a(samples);
  const double width = rng.uniform(0.01, 0.45);
  a[0] = to_fixed(rng.uniform());
  t[0] = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 1; i < samples; ++i) {
    t[i] = t[i - 1] + rng.uniform(0.001, 1.0);
    a[i] = a[i - 1] + static_cast<FixedTurns>(static_cast<std::int64_t>(rng.uniform(-width, width) * static_cast<double>(kUnit)));
  }
  return SampledPath(std::move(t), std::move(a), false);
}

SampledPath random_closed_path(Rng& rng, std::size_t samples, int turns) {
  require(samples >= 2, ErrorCode::invalid_argument, "closed path needs two samples");
  const double drift = static_cast<double>(turns) / static_cast<double>(samples - 1);
  require(std::fabs(drift) < 0.3, ErrorCode::invalid_argument, "too few samples for the requested winding");
  while (true) {
    std::vector<std::int64_t> steps(samples - 1);
    __int128 total = 0;
    const double width = std::min(0.15, 0.45 - std::fabs(drift));
    for (auto& s : steps) {
      s = static_cast<std::int64_t>((drift + rng.uniform(-width, width)) * static_cast<double>(kUnit));
      total += s;
    }
    // Spread the correction so the total is exactly `turns` turns.
    const __int128 target = static_cast<__int128>(turns) * static_cast<__int128>(static_cast<unsigned __int128>(1) << 64);
    __int128 excess = total - target;
    const __int128 n = static_cast<__int128>(steps.size());
    bool ok = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const __int128 share = excess / (n - static_cast<__int128>(i));
      const __int128 s = static_cast<__int128>(steps[i]) - share;
      excess -= share;
      if (s <= INT64_MIN || s > INT64_MAX) ok = false;
      steps[i] = static_cast<std::int64_t>(s);
    }
    if (!ok) continue;
    std::vector<double> t(samples);
    std::vector<FixedTurns> a(samples);
    a[0] = to_fixed(rng.uniform());
    t[0] = 0.0;
    for (std::size_t i = 1; i < samples; ++i) {
      t[i] = t[i - 1] + rng.uniform(0.001, 1.0);
      a[i] = a[i - 1] + static_cast<FixedTurns>(steps[i - 1]);
    }
    return SampledPath(std::move(t), std::move(a), true);
  }
}

SampledPath random_avoiding_path(Rng& rng, std::size_t samples, double z0_turns, double margin) {
  require(margin > 0.0 && margin < 0.5, ErrorCode::invalid_argument, "margin must lie in (0, 1/2)");
  // Walk in the lift on the interval (z0 + margin, z0 + 1 - margin).
  const double lo = margin, hi = 1.0 - margin;
  double x = rng.uniform(lo, hi);
  const double width = rng.uniform(0.01, 0.3);
  std::vector<double> t(samples), a(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = static_cast<double>(i);
    a[i] = z0_turns + x;
    x += rng.uniform(-width, width);
    // Reflect at the walls.
    while (x < lo || x > hi) x = x < lo ? 2 * lo - x : 2 * hi - x;
  }
  return SampledPath::from_turns(std::move(t), a, false);
}

}  // namespace hypdyn
