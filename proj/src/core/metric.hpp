#pragma once

#include "core/operator_model.hpp"

#include <optional>
#include <string_view>

namespace hypdyn {

// Which universality notion a coverage measurement stands for:
//   plain              orbit {T^n x}            (hypercyclic)
//   projective_complex family {s T^n x, s in K} (supercyclic)
//   ray_positive       family {s T^n x, s > 0}  (R+-supercyclic)
enum class CoverageMode { plain, projective_complex, ray_positive };

const char* mode_name(CoverageMode mode);
std::optional<CoverageMode> parse_mode(std::string_view name);

// plain: |x - y|.
// projective_complex: min over unimodular l of |x/|x| - l y/|y||, evaluated at
//   the minimizing phase l = <y,x>/|<y,x>| rather than through 2 - 2|<x,y>|,
//   which loses half the digits near zero.
// ray_positive: |x/|x| - y/|y||.
// Quotient modes throw `precondition` on a zero argument.
double distance(const CVector& x, const CVector& y, CoverageMode mode);
double distance(const Vector& x, const Vector& y, CoverageMode mode);

// Same metric for inputs already normalized to unit length.
double unit_distance(const CVector& xu, const CVector& yu, CoverageMode mode);

}  // namespace hypdyn
