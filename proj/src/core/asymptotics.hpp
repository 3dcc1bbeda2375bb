#pragma once

#include "core/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hypdyn {

// Sign plus natural log of the magnitude; zero has sign 0 and log -inf.
class LogValue {
 public:
  LogValue() = default;
  static LogValue from_log(double log_mag, int sign = 1);
  static LogValue from_double(double v);
  static LogValue zero() { return LogValue(); }

  int sign() const { return sign_; }
  double log_abs() const { return log_; }
  double to_double() const;

  LogValue operator+(const LogValue& o) const;
  LogValue operator-(const LogValue& o) const { return *this + o.negated(); }
  LogValue operator*(const LogValue& o) const;
  LogValue operator/(const LogValue& o) const;
  LogValue negated() const;
  bool operator<(const LogValue& o) const;
  bool operator==(const LogValue& o) const { return sign_ == o.sign_ && (sign_ == 0 || log_ == o.log_); }

 private:
  int sign_ = 0;
  double log_ = -std::numeric_limits<double>::infinity();
};

// ln C(n, k); exact integer binomial for n <= 60, a direct sum of
// ln((n-i+1)/i) for min(k, n-k) <= 1000, log-gamma differences beyond.
double log_binomial(std::int64_t n, std::int64_t k);

// Sequence rules for the coordinate formula.
struct SequenceRule {
  enum class Kind { harmonic, alternating, constant, list };
  Kind kind = Kind::harmonic;  // harmonic: y_k = 1/(k+1)
  double value = 1.0;          // constant
  std::vector<double> values;  // list, zero beyond its end

  static SequenceRule parse(const std::string& text);
  std::string spec() const;
  double at(std::int64_t k) const;
  double bound() const;  // sup |y_k|
};

LogValue a_n(std::int64_t n);
LogValue b_n(std::int64_t n);

// (S^n y)_j for S = I + B_w, w_k = e^{-2k}:
//   sum_k C(n,k) y_{j+k} e^{-k(k+1) - 2kj}.
// At j = 0 with the harmonic rule this is the same summation as a_n.
LogValue sn_coordinate(const SequenceRule& y, std::int64_t j, std::int64_t n);

struct StirlingBand {
  std::int64_t n = 0, k_max = 0;
  double alpha_hat = 0.0, beta_hat = 0.0;
};

// min / max over 1 <= k <= k_max of C(n,k) (k+1)^-1 e^{-k(k+1)} divided by
// k^{-3/2} (n k^{-1} e^{-k})^k. k_max <= 0 means floor(sqrt n).
StirlingBand stirling_band_check(std::int64_t n, std::int64_t k_max = 0);

struct DivergenceRow {
  std::int64_t n = 0;
  LogValue a, b, bound;  // bound = A_n - 2 c B_n
};

struct DivergenceReport {
  double c = 0.0;
  std::vector<DivergenceRow> rows;
  // Index into rows from which the bound is positive and increasing; -1 if never.
  std::int64_t positive_from = -1;
};

DivergenceReport divergence_report(const std::vector<double>& x, const std::vector<std::int64_t>& n_grid);

// Smallest k with (k+1) e^{-2k-2} <= 4 n^{-2} ln n (n >= 3).
std::int64_t tail_threshold(std::int64_t n);

}  // namespace hypdyn
