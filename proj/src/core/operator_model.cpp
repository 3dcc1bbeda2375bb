#include "core/operator_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Index kMaxMaterializeEntries = Index{1} << 26;

bool all_real(const CVector& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (v[i].imag() != 0.0) return false;
  return true;
}

bool all_real(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j).imag() != 0.0) return false;
  return true;
}

double parse_double(std::string_view s, std::string_view what) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::invalid_argument, std::string("cannot parse ") + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::field_mismatch: return "field_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::insufficient_sampling: return "insufficient_sampling";
    case ErrorCode::config: return "config";
    case ErrorCode::unknown_experiment: return "unknown_experiment";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

const char* field_name(Field f) { return f == Field::real ? "real" : "complex"; }

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(Field field, CVector coords) : field_(field), coords_(std::move(coords)) {
  if (field_ == Field::real)
    require(all_real(coords_), ErrorCode::field_mismatch, "real vector with nonzero imaginary part");
}

Vector Vector::real(const std::vector<double>& values) {
  CVector c(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) c[static_cast<Index>(i)] = values[i];
  return Vector(Field::real, std::move(c));
}

Vector Vector::complex(const std::vector<Scalar>& values) {
  CVector c(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) c[static_cast<Index>(i)] = values[i];
  return Vector(Field::complex, std::move(c));
}

Vector Vector::zero(Field field, Index dim) { return Vector(field, CVector::Zero(dim)); }

Vector Vector::basis(Field field, Index dim, Index k) {
  require(k >= 0 && k < dim, ErrorCode::invalid_argument, "basis index out of range");
  CVector c = CVector::Zero(dim);
  c[k] = 1.0;
  return Vector(field, std::move(c));
}

Vector Vector::embed(Field target) const {
  Vector out = *this;
  out.field_ = join(field_, target);
  return out;
}

// ---------------------------------------------------------------------------
// WeightSequence

WeightSequence WeightSequence::constant(double c) {
  require(c > 0.0 && std::isfinite(c), ErrorCode::invalid_argument, "shift weights must be positive");
  WeightSequence w;
  w.kind_ = Kind::constant;
  w.value_ = c;
  return w;
}

WeightSequence WeightSequence::exp2decay() {
  WeightSequence w;
  w.kind_ = Kind::exp2decay;
  return w;
}

WeightSequence WeightSequence::harmonic() {
  WeightSequence w;
  w.kind_ = Kind::harmonic;
  return w;
}

WeightSequence WeightSequence::list(std::vector<double> values) {
  for (double v : values)
    require(v > 0.0 && std::isfinite(v), ErrorCode::invalid_argument, "shift weights must be positive");
  WeightSequence w;
  w.kind_ = Kind::list;
  w.values_ = std::move(values);
  return w;
}

WeightSequence WeightSequence::parse(std::string_view text) {
  if (text == "exp2decay") return exp2decay();
  if (text == "harmonic") return harmonic();
  if (text.rfind("constant:", 0) == 0) return constant(parse_double(text.substr(9), "weight constant"));
  if (text.rfind("list:", 0) == 0) {
    std::vector<double> values;
    std::string_view rest = text.substr(5);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), "weight"));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return list(std::move(values));
  }
  fail(ErrorCode::invalid_argument, "unknown weight sequence '" + std::string(text) + "'");
}

std::string WeightSequence::spec() const {
  switch (kind_) {
    case Kind::exp2decay: return "exp2decay";
    case Kind::harmonic: return "harmonic";
    case Kind::constant: return "constant:" + format_double(value_);
    case Kind::list: {
      std::string s = "list:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) s += ',';
        s += format_double(values_[i]);
      }
      return s;
    }
  }
  return {};
}

double WeightSequence::operator()(Index n) const {
  switch (kind_) {
    case Kind::exp2decay: return std::exp(-2.0 * static_cast<double>(n));
    case Kind::harmonic: return 1.0 / static_cast<double>(n);
    case Kind::constant: return value_;
    case Kind::list:
      require(n >= 1 && n <= static_cast<Index>(values_.size()), ErrorCode::invalid_argument,
              "weight index beyond explicit list");
      return values_[static_cast<std::size_t>(n - 1)];
  }
  return 0.0;
}

Index WeightSequence::available() const {
  return kind_ == Kind::list ? static_cast<Index>(values_.size()) : Index{-1};
}

// ---------------------------------------------------------------------------
// OperatorModel factories

OperatorModel::Kind OperatorModel::kind() const {
  return std::visit(overloaded{
                        [](const DenseNode&) { return Kind::dense; },
                        [](const ShiftNode& n) { return n.forward ? Kind::forward_shift : Kind::backward_shift; },
                        [](const IdentityPlusNode&) { return Kind::identity_plus; },
                        [](const VolterraNode&) { return Kind::volterra; },
                        [](const CompositionJNode&) { return Kind::composition_j; },
                        [](const Rotation2DNode&) { return Kind::rotation2d; },
                        [](const ScalarMultipleNode&) { return Kind::scalar_multiple; },
                        [](const DirectSumNode&) { return Kind::direct_sum; },
                        [](const ExtensionSuNode&) { return Kind::extension_su; },
                        [](const MatrixExponentialNode&) { return Kind::matrix_exponential; },
                    },
                    node_->data);
}
Index OperatorModel::dim() const { return node_->dim; }
Field OperatorModel::field() const { return node_->field; }

const char* kind_name(OperatorModel::Kind kind) {
  using K = OperatorModel::Kind;
  switch (kind) {
    case K::dense: return "dense";
    case K::backward_shift: return "weighted_backward_shift";
    case K::forward_shift: return "weighted_forward_shift";
    case K::identity_plus: return "identity_plus";
    case K::volterra: return "volterra";
    case K::composition_j: return "composition_j";
    case K::rotation2d: return "rotation2d";
    case K::scalar_multiple: return "scalar_multiple";
    case K::direct_sum: return "direct_sum";
    case K::extension_su: return "extension_su";
    case K::matrix_exponential: return "matrix_exponential";
  }
  return "unknown";
}

OperatorModel OperatorModel::dense(Field field, CMatrix entries) {
  require(entries.rows() == entries.cols() && entries.rows() > 0, ErrorCode::dimension_mismatch,
          "dense operator must be a nonempty square matrix");
  if (field == Field::real)
    require(all_real(entries), ErrorCode::field_mismatch, "real dense operator with complex entries");
  const Index d = entries.rows();
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{DenseNode{field, std::move(entries)}, d, field}));
}

OperatorModel OperatorModel::dense_real(const Eigen::MatrixXd& entries) {
  return dense(Field::real, entries.cast<Scalar>());
}

OperatorModel OperatorModel::identity(Index dim, Field field) {
  require(dim > 0, ErrorCode::invalid_argument, "dimension must be positive");
  return dense(field, CMatrix::Identity(dim, dim));
}

OperatorModel OperatorModel::backward_shift(WeightSequence weights, Index dim) {
  require(dim > 0, ErrorCode::invalid_argument, "shift dimension must be positive");
  if (weights.available() >= 0)
    require(weights.available() >= dim - 1, ErrorCode::invalid_argument, "explicit weight list shorter than the truncation");
  return OperatorModel(
      std::make_shared<OperatorNode>(OperatorNode{ShiftNode{std::move(weights), dim, false}, dim, Field::real}));
}

OperatorModel OperatorModel::forward_shift(WeightSequence weights, Index dim) {
  require(dim > 0, ErrorCode::invalid_argument, "shift dimension must be positive");
  if (weights.available() >= 0)
    require(weights.available() >= dim - 1, ErrorCode::invalid_argument, "explicit weight list shorter than the truncation");
  return OperatorModel(
      std::make_shared<OperatorNode>(OperatorNode{ShiftNode{std::move(weights), dim, true}, dim, Field::real}));
}

OperatorModel OperatorModel::identity_plus(OperatorModel inner) {
  const Index d = inner.dim();
  const Field f = inner.field();
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{IdentityPlusNode{std::move(inner)}, d, f}));
}

OperatorModel OperatorModel::volterra(Index grid) {
  require(grid > 0, ErrorCode::invalid_argument, "grid size must be positive");
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{VolterraNode{grid}, grid, Field::real}));
}

OperatorModel OperatorModel::composition_j(Index grid) {
  require(grid > 1, ErrorCode::invalid_argument, "grid size must exceed 1");
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{CompositionJNode{grid}, grid, Field::real}));
}

OperatorModel OperatorModel::rotation2d(double turns) {
  require(std::isfinite(turns), ErrorCode::invalid_argument, "rotation angle must be finite");
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{Rotation2DNode{turns}, 2, Field::real}));
}

OperatorModel OperatorModel::scalar_multiple(Scalar z, OperatorModel inner) {
  const Index d = inner.dim();
  const Field f = join(inner.field(), z.imag() != 0.0 ? Field::complex : Field::real);
  return OperatorModel(std::make_shared<OperatorNode>(OperatorNode{ScalarMultipleNode{z, std::move(inner)}, d, f}));
}

OperatorModel OperatorModel::direct_sum(std::vector<OperatorModel> parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "direct sum needs at least one part");
  std::vector<Index> offsets;
  Index d = 0;
  Field f = Field::real;
  for (const auto& p : parts) {
    offsets.push_back(d);
    d += p.dim();
    f = join(f, p.field());
  }
  return OperatorModel(
      std::make_shared<OperatorNode>(OperatorNode{DirectSumNode{std::move(parts), std::move(offsets)}, d, f}));
}

OperatorModel OperatorModel::extension_su(OperatorModel base, Vector u) {
  require(u.dim() == base.dim(), ErrorCode::dimension_mismatch, "extension vector u must match dim(S)");
  const Index d = base.dim() + 1;
  const Field f = join(base.field(), u.field());
  return OperatorModel(
      std::make_shared<OperatorNode>(OperatorNode{ExtensionSuNode{std::move(base), std::move(u)}, d, f}));
}

OperatorModel OperatorModel::matrix_exponential(OperatorModel generator, double t) {
  require(std::isfinite(t), ErrorCode::invalid_argument, "exponential time must be finite");
  CMatrix value = expm(t * materialize(generator));
  const Index d = generator.dim();
  const Field f = generator.field();
  return OperatorModel(std::make_shared<OperatorNode>(
      OperatorNode{MatrixExponentialNode{std::move(generator), t, std::move(value)}, d, f}));
}

// ---------------------------------------------------------------------------
// Application

namespace {

double rotation_cos(double turns) { return std::cos(kTwoPi * turns); }
double rotation_sin(double turns) { return std::sin(kTwoPi * turns); }

void apply_composition_j(Index m, const CVector& f, CVector& out) {
  const double md = static_cast<double>(m);
  for (Index i = 0; i < m; ++i) {
    const double xi = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * md);
    const double target = (1.0 - xi) / 2.0;
    const double p = target * md - 0.5;  // position in grid-index units
    Index j = static_cast<Index>(std::floor(p));
    double a = p - static_cast<double>(j);
    if (j < 0) {
      j = 0;
      a = 0.0;
    } else if (j >= m - 1) {
      j = m - 2;
      a = 1.0;
    }
    out[i] = (1.0 - a) * f[j] + a * f[j + 1];
  }
}

}  // namespace

CVector apply_raw(const OperatorModel& model, const CVector& x) {
  require(x.size() == model.dim(), ErrorCode::dimension_mismatch,
          "dimension mismatch: operator " + std::to_string(model.dim()) + ", vector " + std::to_string(x.size()));
  const Index d = model.dim();
  return std::visit(
      overloaded{
          [&](const DenseNode& n) -> CVector { return n.entries * x; },
          [&](const ShiftNode& n) -> CVector {
            CVector out = CVector::Zero(d);
            if (n.forward) {
              for (Index j = 1; j < d; ++j) out[j] = n.weights(j) * x[j - 1];
            } else {
              for (Index j = 0; j + 1 < d; ++j) out[j] = n.weights(j + 1) * x[j + 1];
            }
            return out;
          },
          [&](const IdentityPlusNode& n) -> CVector { return x + apply_raw(n.inner, x); },
          [&](const VolterraNode& n) -> CVector {
            // Left-endpoint rule: (Vf)_i = (1/m) sum_{j<i} f_j.
            CVector out(d);
            Scalar acc = 0.0;
            const double h = 1.0 / static_cast<double>(n.grid);
            for (Index i = 0; i < d; ++i) {
              out[i] = acc * h;
              acc += x[i];
            }
            return out;
          },
          [&](const CompositionJNode& n) -> CVector {
            CVector out(d);
            apply_composition_j(n.grid, x, out);
            return out;
          },
          [&](const Rotation2DNode& n) -> CVector {
            const double c = rotation_cos(n.turns), s = rotation_sin(n.turns);
            CVector out(2);
            out[0] = c * x[0] + s * x[1];
            out[1] = -s * x[0] + c * x[1];
            return out;
          },
          [&](const ScalarMultipleNode& n) -> CVector { return n.z * apply_raw(n.inner, x); },
          [&](const DirectSumNode& n) -> CVector {
            CVector out(d);
            for (std::size_t p = 0; p < n.parts.size(); ++p) {
              const Index off = n.offsets[p], len = n.parts[p].dim();
              out.segment(off, len) = apply_raw(n.parts[p], x.segment(off, len));
            }
            return out;
          },
          [&](const ExtensionSuNode& n) -> CVector {
            const Index k = n.base.dim();
            CVector out(d);
            const Scalar t = x[k];
            out.head(k) = apply_raw(n.base, x.head(k)) + t * n.u.coords();
            out[k] = t;
            return out;
          },
          [&](const MatrixExponentialNode& n) -> CVector { return n.value * x; },
      },
      model.node().data);
}

Vector apply(const OperatorModel& model, const Vector& x) {
  require(x.dim() == model.dim(), ErrorCode::dimension_mismatch,
          "dimension mismatch: operator " + std::to_string(model.dim()) + ", vector " + std::to_string(x.dim()));
  require(!(model.field() == Field::real && x.field() == Field::complex), ErrorCode::field_mismatch,
          "complex vector applied to a real operator");
  return Vector(join(model.field(), x.field()), apply_raw(model, x.coords()));
}

CMatrix materialize(const OperatorModel& model) {
  const Index d = model.dim();
  require(d <= kMaxMaterializeEntries / d, ErrorCode::capacity,
          "operator of dimension " + std::to_string(d) + " too large to materialize");
  return std::visit(overloaded{
                        [&](const DenseNode& n) -> CMatrix { return n.entries; },
                        [&](const MatrixExponentialNode& n) -> CMatrix { return n.value; },
                        [&](const ScalarMultipleNode& n) -> CMatrix { return n.z * materialize(n.inner); },
                        [&](const IdentityPlusNode& n) -> CMatrix {
                          CMatrix m = materialize(n.inner);
                          m.diagonal().array() += 1.0;
                          return m;
                        },
                        [&](const DirectSumNode& n) -> CMatrix {
                          CMatrix m = CMatrix::Zero(d, d);
                          for (std::size_t p = 0; p < n.parts.size(); ++p) {
                            const Index off = n.offsets[p], len = n.parts[p].dim();
                            m.block(off, off, len, len) = materialize(n.parts[p]);
                          }
                          return m;
                        },
                        [&](const auto&) -> CMatrix {
                          CMatrix m(d, d);
                          CVector e = CVector::Zero(d);
                          for (Index j = 0; j < d; ++j) {
                            e[j] = 1.0;
                            m.col(j) = apply_raw(model, e);
                            e[j] = 0.0;
                          }
                          return m;
                        },
                    },
                    model.node().data);
}

OperatorModel adjoint(const OperatorModel& model) {
  return std::visit(
      overloaded{
          [&](const DenseNode& n) { return OperatorModel::dense(n.field, n.entries.adjoint()); },
          [&](const ShiftNode& n) {
            return n.forward ? OperatorModel::backward_shift(n.weights, n.dim)
                             : OperatorModel::forward_shift(n.weights, n.dim);
          },
          [&](const IdentityPlusNode& n) { return OperatorModel::identity_plus(adjoint(n.inner)); },
          [&](const Rotation2DNode& n) { return OperatorModel::rotation2d(-n.turns); },
          [&](const ScalarMultipleNode& n) { return OperatorModel::scalar_multiple(std::conj(n.z), adjoint(n.inner)); },
          [&](const DirectSumNode& n) {
            std::vector<OperatorModel> parts;
            parts.reserve(n.parts.size());
            for (const auto& p : n.parts) parts.push_back(adjoint(p));
            return OperatorModel::direct_sum(std::move(parts));
          },
          [&](const MatrixExponentialNode& n) { return OperatorModel::matrix_exponential(adjoint(n.generator), n.t); },
          [&](const auto&) { return OperatorModel::dense(model.field(), materialize(model).adjoint()); },
      },
      model.node().data);
}

double step_normalized(const OperatorModel& model, CVector& unit) {
  CVector v = apply_raw(model, unit);
  const double nv = v.norm();
  if (nv == 0.0) {
    unit.setZero();
    return -std::numeric_limits<double>::infinity();
  }
  unit = v / nv;
  return std::log(nv);
}

PowerResult apply_power(const OperatorModel& model, Index n, const Vector& x) {
  require(n >= 0, ErrorCode::invalid_argument, "power must be nonnegative");
  require(x.dim() == model.dim(), ErrorCode::dimension_mismatch, "dimension mismatch in apply_power");
  require(!(model.field() == Field::real && x.field() == Field::complex), ErrorCode::field_mismatch,
          "complex vector applied to a real operator");
  const Field f = join(model.field(), x.field());
  const double nx = x.norm();
  if (nx == 0.0) return {Vector::zero(f, x.dim()), -std::numeric_limits<double>::infinity()};
  CVector unit = x.coords() / nx;
  double lognorm = std::log(nx);
  for (Index k = 0; k < n; ++k) {
    const double g = step_normalized(model, unit);
    lognorm += g;
    if (std::isinf(g)) break;
  }
  return {Vector(f, std::move(unit)), lognorm};
}

// ---------------------------------------------------------------------------
// Matrix exponential

bool is_strictly_triangular(const CMatrix& a) {
  bool lower = true, upper = true;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) == Scalar(0.0)) continue;
      if (i <= j) lower = false;
      if (i >= j) upper = false;
    }
  return lower || upper;
}

CMatrix expm(const CMatrix& a) {
  require(a.rows() == a.cols(), ErrorCode::dimension_mismatch, "expm needs a square matrix");
  const Index d = a.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  if (is_strictly_triangular(a)) {
    // A^d = 0, so the series terminates.
    CMatrix sum = id, term = id;
    for (Index k = 1; k < d; ++k) {
      term = (term * a) / static_cast<double>(k);
      if (term.isZero(0.0)) break;
      sum += term;
    }
    return sum;
  }
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const CMatrix as = a / std::ldexp(1.0, s);
  const CMatrix a2 = as * as, a4 = a2 * a2, a6 = a4 * a2;
  const CMatrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

Vector exp_apply(const OperatorModel& generator, double t, const Vector& x) {
  require(x.dim() == generator.dim(), ErrorCode::dimension_mismatch, "dimension mismatch in exp_apply");
  if (t == 0.0) return x.embed(generator.field());
  const CMatrix e = expm(t * materialize(generator));
  return Vector(join(generator.field(), x.field()), e * x.coords());
}

// ---------------------------------------------------------------------------

namespace {

double leaked_mass(const OperatorModel& model, const CVector& x) {
  return std::visit(overloaded{
                        [&](const ShiftNode& n) -> double {
                          if (!n.forward) return 0.0;
                          // An explicit list may stop at w_{N-1}; reuse its last weight for w_N.
                          const Index avail = n.weights.available();
                          const Index k = (avail >= 0 && avail < n.dim) ? std::max<Index>(avail, 1) : n.dim;
                          if (avail == 0) return 0.0;
                          return std::abs(n.weights(k) * x[n.dim - 1]);
                        },
                        [&](const ScalarMultipleNode& n) -> double { return std::abs(n.z) * leaked_mass(n.inner, x); },
                        [&](const IdentityPlusNode& n) -> double { return leaked_mass(n.inner, x); },
                        [&](const DirectSumNode& n) -> double {
                          double sq = 0.0;
                          for (std::size_t p = 0; p < n.parts.size(); ++p) {
                            const double m = leaked_mass(n.parts[p], x.segment(n.offsets[p], n.parts[p].dim()));
                            sq += m * m;
                          }
                          return std::sqrt(sq);
                        },
                        [&](const auto&) -> double { return 0.0; },
                    },
                    model.node().data);
}

}  // namespace

double truncation_leak(const OperatorModel& model, const Vector& x) {
  require(x.dim() == model.dim(), ErrorCode::dimension_mismatch, "dimension mismatch in truncation_leak");
  const double lost = leaked_mass(model, x.coords());
  if (lost == 0.0) return 0.0;
  const double kept = apply_raw(model, x.coords()).norm();
  return lost / std::hypot(kept, lost);
}

std::string describe(const OperatorModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const DenseNode& n) { os << "dense(" << field_name(n.field) << ", " << n.entries.rows() << ")"; },
                 [&](const ShiftNode& n) {
                   os << (n.forward ? "forward_shift(" : "backward_shift(") << n.weights.spec() << ", " << n.dim << ")";
                 },
                 [&](const IdentityPlusNode& n) { os << "I+" << describe(n.inner); },
                 [&](const VolterraNode& n) { os << "volterra(" << n.grid << ")"; },
                 [&](const CompositionJNode& n) { os << "composition_j(" << n.grid << ")"; },
                 [&](const Rotation2DNode& n) { os << "rotation2d(" << format_double(n.turns) << ")"; },
                 [&](const ScalarMultipleNode& n) {
                   os << "(" << format_double(n.z.real()) << (n.z.imag() < 0 ? "" : "+") << format_double(n.z.imag())
                      << "i)*" << describe(n.inner);
                 },
                 [&](const DirectSumNode& n) {
                   os << "(";
                   for (std::size_t p = 0; p < n.parts.size(); ++p) os << (p ? " (+) " : "") << describe(n.parts[p]);
                   os << ")";
                 },
                 [&](const ExtensionSuNode& n) { os << "S_u[" << describe(n.base) << "]"; },
                 [&](const MatrixExponentialNode& n) { os << "exp(" << format_double(n.t) << "*" << describe(n.generator) << ")"; },
             },
             model.node().data);
  return os.str();
}

}  // namespace hypdyn
