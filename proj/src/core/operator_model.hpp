#pragma once

#include "core/common.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hypdyn {

enum class Field { real, complex };

inline Field join(Field a, Field b) {
  return (a == Field::complex || b == Field::complex) ? Field::complex : Field::real;
}

const char* field_name(Field f);

// Finite coordinate vector over R or C. Real vectors are stored in complex
// storage with identically zero imaginary parts.
class Vector {
 public:
  Vector() = default;
  Vector(Field field, CVector coords);

  static Vector real(const std::vector<double>& values);
  static Vector complex(const std::vector<Scalar>& values);
  static Vector zero(Field field, Index dim);
  static Vector basis(Field field, Index dim, Index k);

  Field field() const { return field_; }
  Index dim() const { return coords_.size(); }
  const CVector& coords() const { return coords_; }
  Scalar operator[](Index i) const { return coords_[i]; }
  double norm() const { return coords_.norm(); }

  // Embeds a real vector into a complex experiment; a no-op otherwise.
  Vector embed(Field target) const;

 private:
  Field field_ = Field::real;
  CVector coords_;
};

// Positive weight sequence w_1, w_2, ... for shift operators.
class WeightSequence {
 public:
  enum class Kind { list, constant, exp2decay, harmonic };

  static WeightSequence constant(double c);
  static WeightSequence exp2decay();  // w_n = e^{-2n}
  static WeightSequence harmonic();   // w_n = 1/n
  static WeightSequence list(std::vector<double> values);

  // Accepts "exp2decay", "harmonic", "constant:<c>", "list:<w1>,<w2>,...".
  static WeightSequence parse(std::string_view text);
  std::string spec() const;

  Kind kind() const { return kind_; }
  // n >= 1.
  double operator()(Index n) const;
  // Number of weights available; -1 for generated sequences.
  Index available() const;

 private:
  Kind kind_ = Kind::constant;
  double value_ = 1.0;
  std::vector<double> values_;
};

struct OperatorNode;

// Immutable operator description. Copies share the underlying node.
class OperatorModel {
 public:
  enum class Kind {
    dense,
    backward_shift,
    forward_shift,
    identity_plus,
    volterra,
    composition_j,
    rotation2d,
    scalar_multiple,
    direct_sum,
    extension_su,
    matrix_exponential,
  };

  static OperatorModel dense(Field field, CMatrix entries);
  static OperatorModel dense_real(const Eigen::MatrixXd& entries);
  static OperatorModel identity(Index dim, Field field = Field::real);
  // (Tx)_j = w_{j+1} x_{j+1}; coordinate N reads as zero.
  static OperatorModel backward_shift(WeightSequence weights, Index dim);
  // (Fx)_0 = 0, (Fx)_j = w_j x_{j-1}; mass pushed past N-1 is dropped.
  static OperatorModel forward_shift(WeightSequence weights, Index dim);
  static OperatorModel identity_plus(OperatorModel inner);
  static OperatorModel volterra(Index grid);
  static OperatorModel composition_j(Index grid);
  static OperatorModel rotation2d(double turns);
  static OperatorModel scalar_multiple(Scalar z, OperatorModel inner);
  static OperatorModel direct_sum(std::vector<OperatorModel> parts);
  static OperatorModel extension_su(OperatorModel base, Vector u);
  static OperatorModel matrix_exponential(OperatorModel generator, double t);

  Kind kind() const;
  Index dim() const;
  Field field() const;
  const OperatorNode& node() const { return *node_; }

 private:
  explicit OperatorModel(std::shared_ptr<const OperatorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const OperatorNode> node_;
};

const char* kind_name(OperatorModel::Kind kind);

struct DenseNode {
  Field field;
  CMatrix entries;
};
struct ShiftNode {
  WeightSequence weights;
  Index dim;
  bool forward;
};
struct IdentityPlusNode {
  OperatorModel inner;
};
struct VolterraNode {
  Index grid;
};
struct CompositionJNode {
  Index grid;
};
struct Rotation2DNode {
  double turns;
};
struct ScalarMultipleNode {
  Scalar z;
  OperatorModel inner;
};
struct DirectSumNode {
  std::vector<OperatorModel> parts;
  std::vector<Index> offsets;  // offsets[i] = first coordinate of part i
};
struct ExtensionSuNode {
  OperatorModel base;
  Vector u;
};
struct MatrixExponentialNode {
  OperatorModel generator;
  double t;
  CMatrix value;  // e^{tG}, computed once at construction
};

struct OperatorNode {
  std::variant<DenseNode, ShiftNode, IdentityPlusNode, VolterraNode, CompositionJNode, Rotation2DNode,
               ScalarMultipleNode, DirectSumNode, ExtensionSuNode, MatrixExponentialNode>
      data;
  Index dim;
  Field field;
};

// Exact application of the variant's defining formula.
Vector apply(const OperatorModel& model, const Vector& x);
// Same, without field bookkeeping; x.size() must equal dim(model).
CVector apply_raw(const OperatorModel& model, const CVector& x);

CMatrix materialize(const OperatorModel& model);

// Conjugate transpose; symbolic where a closed form exists.
OperatorModel adjoint(const OperatorModel& model);

struct PowerResult {
  Vector unit;      // T^n x / |T^n x|, zero vector when T^n x = 0
  double lognorm;   // ln |T^n x|, -inf for the zero vector
};

// T^n x, renormalized at every step.
PowerResult apply_power(const OperatorModel& model, Index n, const Vector& x);

// One renormalized step from a unit vector; returns ln of the growth factor.
double step_normalized(const OperatorModel& model, CVector& unit);

// e^{A} by scaling and squaring with the degree-13 Pade approximant; the
// exact terminating series is used when A is strictly triangular.
CMatrix expm(const CMatrix& a);
bool is_strictly_triangular(const CMatrix& a);

Vector exp_apply(const OperatorModel& generator, double t, const Vector& x);

// Fraction of |Tx| lost by truncation; nonzero only for forward shifts (and
// composites containing them).
double truncation_leak(const OperatorModel& model, const Vector& x);

std::string describe(const OperatorModel& model);

}  // namespace hypdyn
