#include "core/asymptotics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hypdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Terms further than this below the running maximum are dropped once the
// sequence is known to decay geometrically.
constexpr double kCutoff = 60.0;

// Streaming signed sum of terms sign * e^{log}, kept as separate positive and
// negative accumulators.
class LogAccumulator {
 public:
  void add(double log_mag, int sign) {
    if (sign == 0 || log_mag == kNegInf) return;
    (sign > 0 ? pos_ : neg_) = (sign > 0 ? pos_ : neg_) + LogValue::from_log(log_mag);
  }
  LogValue total() const { return pos_ - neg_; }
  double max_log() const { return std::max(pos_.log_abs(), neg_.log_abs()); }

 private:
  LogValue pos_, neg_;
};

// sum_{k=0}^n C(n,k) y(k) e^{-q(k)} with q(k) >= k(k+1), |y| <= bound.
// `log_y(k)` returns ln |y(k)| and `sign_y(k)` its sign.
template <class LogY, class SignY, class Penalty>
LogValue binomial_series(std::int64_t n, double log_bound, LogY log_y, SignY sign_y, Penalty penalty) {
  require(n >= 0, ErrorCode::invalid_argument, "n must be nonnegative");
  LogAccumulator acc;
  double log_c = 0.0;  // ln C(n, k), updated incrementally
  const double ln_n = n > 0 ? std::log(static_cast<double>(n)) : 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    if (k > 0) log_c += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k));
    acc.add(log_c + log_y(k) - penalty(k), sign_y(k));
    // Beyond 2(k+1) > ln n + 1 consecutive envelopes shrink by at least 1/e.
    if (2.0 * static_cast<double>(k + 1) > ln_n + 1.0) {
      const double envelope = log_c + log_bound - static_cast<double>(k) * static_cast<double>(k + 1);
      if (envelope < acc.max_log() - kCutoff) break;
    }
  }
  return acc.total();
}

}  // namespace

// ---------------------------------------------------------------------------
// LogValue

LogValue LogValue::from_log(double log_mag, int sign) {
  LogValue v;
  if (sign == 0 || log_mag == kNegInf) return v;
  v.sign_ = sign > 0 ? 1 : -1;
  v.log_ = log_mag;
  return v;
}

LogValue LogValue::from_double(double x) {
  if (x == 0.0) return LogValue();
  return from_log(std::log(std::fabs(x)), x > 0 ? 1 : -1);
}

double LogValue::to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_); }

LogValue LogValue::negated() const {
  LogValue v = *this;
  v.sign_ = -v.sign_;
  return v;
}

LogValue LogValue::operator+(const LogValue& o) const {
  if (sign_ == 0) return o;
  if (o.sign_ == 0) return *this;
  const LogValue& big = log_ >= o.log_ ? *this : o;
  const LogValue& small = log_ >= o.log_ ? o : *this;
  const double d = small.log_ - big.log_;  // <= 0
  if (big.sign_ == small.sign_) return from_log(big.log_ + std::log1p(std::exp(d)), big.sign_);
  if (d == 0.0) return LogValue();
  return from_log(big.log_ + std::log1p(-std::exp(d)), big.sign_);
}

LogValue LogValue::operator*(const LogValue& o) const {
  if (sign_ == 0 || o.sign_ == 0) return LogValue();
  return from_log(log_ + o.log_, sign_ * o.sign_);
}

LogValue LogValue::operator/(const LogValue& o) const {
  require(o.sign_ != 0, ErrorCode::invalid_argument, "division by zero LogValue");
  if (sign_ == 0) return LogValue();
  return from_log(log_ - o.log_, sign_ * o.sign_);
}

bool LogValue::operator<(const LogValue& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_;
  if (sign_ == 0) return false;
  return sign_ > 0 ? log_ < o.log_ : log_ > o.log_;
}

// ---------------------------------------------------------------------------
// Binomials and sequences

double log_binomial(std::int64_t n, std::int64_t k) {
  require(n >= 0 && k >= 0 && k <= n, ErrorCode::invalid_argument,
          "log_binomial needs 0 <= k <= n (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  const std::int64_t kk = std::min(k, n - k);
  if (n <= 60) {
    unsigned __int128 c = 1;
    for (std::int64_t i = 1; i <= kk; ++i) c = c * static_cast<unsigned __int128>(n - kk + i) / static_cast<unsigned __int128>(i);
    return std::log(static_cast<double>(c));
  }
  if (kk <= 1000) {
    double s = 0.0;
    for (std::int64_t i = 1; i <= kk; ++i) s += std::log(static_cast<double>(n - i + 1) / static_cast<double>(i));
    return s;
  }
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(kk) + 1.0) -
         std::lgamma(static_cast<double>(n - kk) + 1.0);
}

SequenceRule SequenceRule::parse(const std::string& text) {
  SequenceRule r;
  auto number = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::config, "bad number '" + std::string(s) + "'");
    return v;
  };
  if (text == "harmonic") {
    r.kind = Kind::harmonic;
  } else if (text == "alternating") {
    r.kind = Kind::alternating;
  } else if (text.rfind("constant:", 0) == 0) {
    r.kind = Kind::constant;
    r.value = number(std::string_view(text).substr(9));
  } else if (text.rfind("list:", 0) == 0) {
    r.kind = Kind::list;
    std::string_view rest = std::string_view(text).substr(5);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      r.values.push_back(number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else {
    fail(ErrorCode::config, "unknown sequence rule '" + text + "' (harmonic, alternating, constant:<c>, list:<a,b,...>)");
  }
  return r;
}

std::string SequenceRule::spec() const {
  auto fmt = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  switch (kind) {
    case Kind::harmonic: return "harmonic";
    case Kind::alternating: return "alternating";
    case Kind::constant: return "constant:" + fmt(value);
    case Kind::list: {
      std::string s = "list:";
      for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + fmt(values[i]);
      return s;
    }
  }
  return "";
}

double SequenceRule::at(std::int64_t k) const {
  switch (kind) {
    case Kind::harmonic: return 1.0 / static_cast<double>(k + 1);
    case Kind::alternating: return k % 2 == 0 ? 1.0 : -1.0;
    case Kind::constant: return value;
    case Kind::list: return k < static_cast<std::int64_t>(values.size()) ? values[static_cast<std::size_t>(k)] : 0.0;
  }
  return 0.0;
}

double SequenceRule::bound() const {
  switch (kind) {
    case Kind::harmonic:
    case Kind::alternating: return 1.0;
    case Kind::constant: return std::fabs(value);
    case Kind::list: {
      double b = 0.0;
      for (double v : values) b = std::max(b, std::fabs(v));
      return b;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// A_n, B_n and the coordinate formula

LogValue a_n(std::int64_t n) {
  return binomial_series(
      n, 0.0, [](std::int64_t k) { return -std::log(static_cast<double>(k + 1)); }, [](std::int64_t) { return 1; },
      [](std::int64_t k) { return static_cast<double>(k) * static_cast<double>(k + 1); });
}

LogValue b_n(std::int64_t n) {
  return binomial_series(
      n, 0.0, [](std::int64_t) { return 0.0; }, [](std::int64_t) { return 1; },
      [](std::int64_t k) { return static_cast<double>(k + 1) * static_cast<double>(k + 2); });
}

LogValue sn_coordinate(const SequenceRule& y, std::int64_t j, std::int64_t n) {
  require(j >= 0, ErrorCode::invalid_argument, "coordinate index must be nonnegative");
  const double bound = y.bound();
  if (bound == 0.0) return LogValue::zero();
  const bool harmonic = y.kind == SequenceRule::Kind::harmonic;
  return binomial_series(
      n, std::log(bound),
      [&](std::int64_t k) {
        // Same expression as a_n for the harmonic rule.
        if (harmonic) return -std::log(static_cast<double>(j + k + 1));
        const double v = y.at(j + k);
        return v == 0.0 ? kNegInf : std::log(std::fabs(v));
      },
      [&](std::int64_t k) {
        const double v = y.at(j + k);
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
      },
      [&](std::int64_t k) {
        const double kd = static_cast<double>(k);
        return j == 0 ? kd * static_cast<double>(k + 1) : kd * static_cast<double>(k + 1) + 2.0 * kd * static_cast<double>(j);
      });
}

StirlingBand stirling_band_check(std::int64_t n, std::int64_t k_max) {
  require(n >= 4, ErrorCode::invalid_argument, "Stirling band needs n >= 4");
  StirlingBand band;
  band.n = n;
  band.k_max = k_max > 0 ? std::min(k_max, n) : static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const double ln_n = std::log(static_cast<double>(n));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double log_c = 0.0;
  for (std::int64_t k = 1; k <= band.k_max; ++k) {
    log_c += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k));
    const double kd = static_cast<double>(k), ln_k = std::log(kd);
    const double term = log_c - std::log(kd + 1.0) - kd * (kd + 1.0);
    const double model = -1.5 * ln_k + kd * (ln_n - ln_k - kd);
    lo = std::min(lo, term - model);
    hi = std::max(hi, term - model);
  }
  band.alpha_hat = std::exp(lo);
  band.beta_hat = std::exp(hi);
  return band;
}

DivergenceReport divergence_report(const std::vector<double>& x, const std::vector<std::int64_t>& n_grid) {
  DivergenceReport rep;
  for (double v : x) {
    require(std::isfinite(v), ErrorCode::invalid_argument, "x must be finite");
    rep.c = std::max(rep.c, std::fabs(v));
  }
  const LogValue two_c = LogValue::from_double(2.0 * rep.c);
  for (std::int64_t n : n_grid) {
    DivergenceRow row;
    row.n = n;
    row.a = a_n(n);
    row.b = b_n(n);
    row.bound = row.a - two_c * row.b;
    rep.rows.push_back(row);
  }
  // Last run of rows that are positive and increasing.
  std::int64_t start = -1;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const bool positive = rep.rows[i].bound.sign() > 0;
    const bool rising = i == 0 || rep.rows[i - 1].bound < rep.rows[i].bound;
    if (!positive) {
      start = -1;
    } else if (start < 0 || !rising) {
      start = static_cast<std::int64_t>(i);
    }
  }
  rep.positive_from = start;
  return rep;
}

std::int64_t tail_threshold(std::int64_t n) {
  require(n >= 3, ErrorCode::invalid_argument, "tail threshold needs n >= 3");
  const double ln_n = std::log(static_cast<double>(n));
  const double rhs = std::log(4.0) - 2.0 * ln_n + std::log(ln_n);
  std::int64_t k = 0;
  while (std::log(static_cast<double>(k + 1)) - 2.0 * static_cast<double>(k) - 2.0 > rhs) ++k;
  return k;
}

}  // namespace hypdyn
