#include "core/metric.hpp"

namespace hypdyn {

const char* mode_name(CoverageMode mode) {
  switch (mode) {
    case CoverageMode::plain: return "plain";
    case CoverageMode::projective_complex: return "projective_complex";
    case CoverageMode::ray_positive: return "ray_positive";
  }
  return "unknown";
}

std::optional<CoverageMode> parse_mode(std::string_view name) {
  if (name == "plain") return CoverageMode::plain;
  if (name == "projective_complex" || name == "projective") return CoverageMode::projective_complex;
  if (name == "ray_positive" || name == "ray") return CoverageMode::ray_positive;
  return std::nullopt;
}

double unit_distance(const CVector& xu, const CVector& yu, CoverageMode mode) {
  if (mode == CoverageMode::projective_complex) {
    const Scalar ip = yu.dot(xu);  // conj(y) . x
    const double a = std::abs(ip);
    const Scalar phase = a > 0.0 ? ip / a : Scalar(1.0);
    return (xu - phase * yu).norm();
  }
  return (xu - yu).norm();
}

double distance(const CVector& x, const CVector& y, CoverageMode mode) {
  require(x.size() == y.size(), ErrorCode::dimension_mismatch, "distance between vectors of different dimension");
  if (mode == CoverageMode::plain) return (x - y).norm();
  const double nx = x.norm(), ny = y.norm();
  require(nx > 0.0 && ny > 0.0, ErrorCode::precondition,
          std::string("zero vector has no direction in ") + mode_name(mode) + " mode");
  return unit_distance(x / nx, y / ny, mode);
}

double distance(const Vector& x, const Vector& y, CoverageMode mode) { return distance(x.coords(), y.coords(), mode); }

}  // namespace hypdyn
