#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hypdyn {

using Scalar = std::complex<double>;
using Index = Eigen::Index;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class ErrorCode : int {
  ok = 0,
  dimension_mismatch = 1,
  field_mismatch = 2,
  invalid_argument = 3,
  precondition = 4,
  capacity = 5,
  insufficient_sampling = 6,
  config = 7,
  unknown_experiment = 8,
  io = 9,
  internal = 10,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the core carries a code so the C boundary can
// translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace hypdyn
