#include "core/criteria.hpp"

#include "core/orbit.hpp"
#include "core/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hypdyn {

namespace {

CVector power_raw(const OperatorModel& m, CVector v, Index n) {
  for (Index j = 0; j < n; ++j) v = apply_raw(m, v);
  return v;
}

// Largest block 2-norm of v, blocks given by the component dims.
double block_max(const CVector& v, const std::vector<WitnessComponent>& comps, const std::vector<double>* scale) {
  double best = 0.0;
  Index off = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double s = scale ? (*scale)[i] : 1.0;
    best = std::max(best, s * v.segment(off, comps[i].dim).norm());
    off += comps[i].dim;
  }
  return best;
}

std::vector<double> scalars_at(const CriterionWitness& w, std::size_t k, bool inverse) {
  std::vector<double> out;
  for (const auto& c : w.components) out.push_back(inverse ? 1.0 / c.s[k] : c.s[k]);
  return out;
}

CMatrix similarity_gap(const CMatrix& S, const CVector& u, const CVector& v) {
  const Index N = S.rows();
  CMatrix Su = CMatrix::Zero(N + 1, N + 1), L = CMatrix::Identity(N + 1, N + 1), Li = L, S0 = CMatrix::Zero(N + 1, N + 1);
  Su.topLeftCorner(N, N) = S;
  Su.topRightCorner(N, 1) = u;
  Su(N, N) = 1.0;
  L.topRightCorner(N, 1) = v;
  Li.topRightCorner(N, 1) = -v;
  S0.topLeftCorner(N, N) = S;
  S0(N, N) = 1.0;
  return Li * Su * L - S0;
}

bool is_symbolic(const SpectrumDescriptor& s) {
  return s.provenance == SpectrumDescriptor::Provenance::symbolic_fact && !s.truncation_unreliable;
}

SpectrumDescriptor dense_spectrum(const OperatorModel& model) {
  const CMatrix m = materialize(model);
  Eigen::ComplexEigenSolver<CMatrix> es(m.transpose(), false);
  require(es.info() == Eigen::Success, ErrorCode::internal, "eigensolver did not converge");
  std::vector<Scalar> vals(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(vals.begin(), vals.end(), [](Scalar a, Scalar b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  auto s = SpectrumDescriptor::numeric(std::move(vals), "dense eigensolve of the truncated transpose");
  s.provenance = SpectrumDescriptor::Provenance::dense_eigensolve;
  s.truncation_unreliable = true;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Witnesses

Index CriterionWitness::dim() const {
  Index d = 0;
  for (const auto& c : components) d += c.dim;
  return d;
}

void CriterionWitness::validate() const {
  require(!n.empty(), ErrorCode::invalid_argument, "witness needs at least one index");
  for (std::size_t k = 0; k < n.size(); ++k) {
    require(n[k] >= 0, ErrorCode::invalid_argument, "witness indices must be nonnegative");
    require(k == 0 || n[k] > n[k - 1], ErrorCode::invalid_argument, "witness indices must increase strictly");
  }
  require(!components.empty(), ErrorCode::invalid_argument, "witness needs a component");
  for (const auto& c : components) {
    require(c.right_inverse.dim() == c.dim, ErrorCode::dimension_mismatch, "right inverse has the wrong dimension");
    require(c.s.size() == n.size(), ErrorCode::invalid_argument, "one scalar per index is required");
    for (double s : c.s) require(s > 0.0 && std::isfinite(s), ErrorCode::invalid_argument, "scalars must be positive");
  }
  require(!E.empty() && !F.empty(), ErrorCode::invalid_argument, "test sets E and F must be nonempty");
  for (const auto* set : {&E, &F})
    for (const auto& v : *set) require(v.dim() == dim(), ErrorCode::dimension_mismatch, "test vector has the wrong dimension");
}

CriterionReport verify_criterion(const OperatorModel& model, const CriterionWitness& w, std::size_t tail_start,
                                 double tol) {
  w.validate();
  require(model.dim() == w.dim(), ErrorCode::dimension_mismatch, "witness and operator dimensions differ");
  require(tail_start < w.n.size(), ErrorCode::invalid_argument, "empty tail: tail start beyond the last index");
  CriterionReport rep;
  rep.n = w.n;
  rep.tail_start = tail_start;
  rep.tol = tol;
  for (std::size_t k = 0; k < w.n.size(); ++k) {
    const Index nk = w.n[k];
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    const auto s = scalars_at(w, k, false), sinv = scalars_at(w, k, true);
    for (const auto& y : w.F) {
      CVector sy(y.dim());
      Index off = 0;
      for (const auto& c : w.components) {
        sy.segment(off, c.dim) = power_raw(c.right_inverse, y.coords().segment(off, c.dim), nk);
        off += c.dim;
      }
      r3 = std::max(r3, block_max(sy, w.components, &sinv));
      const CVector tsy = power_raw(model, sy, nk);
      r1 = std::max(r1, block_max(tsy - y.coords(), w.components, nullptr));
    }
    for (const auto& x : w.E) r2 = std::max(r2, block_max(power_raw(model, x.coords(), nk), w.components, &s));
    rep.r1.push_back(r1);
    rep.r2.push_back(r2);
    rep.r3.push_back(r3);
  }
  rep.pass = true;
  for (std::size_t k = tail_start; k < w.n.size(); ++k)
    if (!(rep.r1[k] <= tol && rep.r2[k] <= tol && rep.r3[k] <= tol)) rep.pass = false;
  return rep;
}

CriterionWitness combine_witnesses(const std::vector<CriterionWitness>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "nothing to combine");
  if (parts.size() == 1) return parts.front();
  CriterionWitness out;
  out.n = parts.front().n;
  for (const auto& p : parts) {
    p.validate();
    require(p.n == out.n, ErrorCode::invalid_argument, "witnesses must share the index sequence");
    out.components.insert(out.components.end(), p.components.begin(), p.components.end());
  }
  // Cartesian products of the test sets, first part varying slowest.
  auto product = [&](auto member) {
    std::vector<CVector> acc{CVector(0)};
    Field field = Field::real;
    for (const auto& p : parts) {
      std::vector<CVector> next;
      for (const auto& a : acc)
        for (const auto& v : p.*member) {
          CVector c(a.size() + v.dim());
          c << a, v.coords();
          next.push_back(std::move(c));
          field = join(field, v.field());
        }
      acc = std::move(next);
    }
    std::vector<Vector> vs;
    for (auto& c : acc) vs.emplace_back(field, std::move(c));
    return vs;
  };
  out.E = product(&CriterionWitness::E);
  out.F = product(&CriterionWitness::F);
  return out;
}

CriterionWitness shift_witness(double c, Index dim, Index depth, std::vector<Index> n, std::vector<double> s,
                               std::vector<Vector> extra_E) {
  require(c > 0.0, ErrorCode::invalid_argument, "shift multiplier must be positive");
  require(depth >= 1 && depth <= dim, ErrorCode::invalid_argument, "support depth must lie in [1, dim]");
  require(n.empty() || depth + n.back() <= dim, ErrorCode::capacity,
          "dimension too small: the right inverse would push mass past the truncation");
  CriterionWitness w;
  w.n = std::move(n);
  w.components.push_back({dim, OperatorModel::forward_shift(WeightSequence::constant(1.0 / c), dim), std::move(s)});
  for (Index j = 0; j < depth; ++j) {
    w.E.push_back(Vector::basis(Field::real, dim, j));
    w.F.push_back(Vector::basis(Field::real, dim, j));
  }
  for (auto& v : extra_E) w.E.push_back(std::move(v));
  return w;
}

// ---------------------------------------------------------------------------
// Spectra

SpectrumDescriptor SpectrumDescriptor::empty(std::string source) {
  SpectrumDescriptor s;
  s.kind = Kind::empty;
  s.source = std::move(source);
  return s;
}

SpectrumDescriptor SpectrumDescriptor::singleton(Scalar z, std::string source) {
  return singleton(z, phase_of(z), std::move(source));
}

SpectrumDescriptor SpectrumDescriptor::singleton(Scalar z, Angle phase, std::string source) {
  require(z != Scalar(0.0), ErrorCode::invalid_argument, "a singleton dual spectrum needs z != 0");
  SpectrumDescriptor s;
  s.kind = Kind::singleton;
  s.values = {z};
  s.phase = phase;
  s.source = std::move(source);
  return s;
}

SpectrumDescriptor SpectrumDescriptor::numeric(std::vector<Scalar> values, std::string source) {
  SpectrumDescriptor s;
  s.kind = Kind::full_numeric;
  s.values = std::move(values);
  s.source = std::move(source);
  return s;
}

const char* spectrum_kind_name(SpectrumDescriptor::Kind k) {
  switch (k) {
    case SpectrumDescriptor::Kind::empty: return "empty";
    case SpectrumDescriptor::Kind::singleton: return "singleton";
    case SpectrumDescriptor::Kind::full_numeric: return "full_numeric";
  }
  return "unknown";
}

const char* provenance_name(SpectrumDescriptor::Provenance p) {
  return p == SpectrumDescriptor::Provenance::symbolic_fact ? "symbolic_fact" : "dense_eigensolve";
}

Angle phase_of(Scalar z) {
  require(z != Scalar(0.0), ErrorCode::invalid_argument, "zero has no phase");
  if (z.imag() == 0.0) return Angle::rational(z.real() > 0 ? 0 : 1, 2);
  if (z.real() == 0.0) return Angle::rational(z.imag() > 0 ? 1 : 3, 4);
  return Angle::approximate(std::arg(z) / kTwoPi);
}

SpectrumDescriptor spectrum_of_adjoint(const OperatorModel& model) {
  using K = OperatorModel::Kind;
  const auto& data = model.node().data;
  switch (model.kind()) {
    case K::backward_shift:
      return SpectrumDescriptor::empty("weighted backward shift: the transpose is a forward shift");
    case K::volterra:
      return SpectrumDescriptor::empty("Volterra operator");
    case K::identity_plus: {
      const auto& inner = std::get<IdentityPlusNode>(data).inner;
      if (inner.kind() == K::backward_shift)
        return SpectrumDescriptor::empty("identity plus weighted backward shift");
      break;
    }
    case K::scalar_multiple: {
      const auto& node = std::get<ScalarMultipleNode>(data);
      auto in = spectrum_of_adjoint(node.inner);
      if (!is_symbolic(in)) break;
      if (in.kind == SpectrumDescriptor::Kind::empty) return in;
      if (node.z == Scalar(0.0)) return SpectrumDescriptor::numeric({Scalar(0.0)}, "zero multiple");
      if (in.kind == SpectrumDescriptor::Kind::singleton)
        return SpectrumDescriptor::singleton(node.z * in.values[0], *in.phase + phase_of(node.z),
                                             "scalar multiple of: " + in.source);
      for (auto& v : in.values) v *= node.z;
      return in;
    }
    case K::extension_su: {
      const auto base = spectrum_of_adjoint(std::get<ExtensionSuNode>(data).base);
      if (is_symbolic(base) && base.kind == SpectrumDescriptor::Kind::empty)
        return SpectrumDescriptor::singleton(Scalar(1.0), Angle::rational(0, 1),
                                             "extension S_u over an operator with empty dual point spectrum");
      break;
    }
    case K::direct_sum: {
      std::vector<SpectrumDescriptor> parts;
      for (const auto& p : std::get<DirectSumNode>(data).parts) parts.push_back(spectrum_of_adjoint(p));
      if (!std::all_of(parts.begin(), parts.end(), is_symbolic)) break;
      std::vector<SpectrumDescriptor> nonempty;
      for (auto& p : parts)
        if (p.kind != SpectrumDescriptor::Kind::empty) nonempty.push_back(p);
      if (nonempty.empty()) return SpectrumDescriptor::empty("direct sum of parts with empty dual point spectrum");
      const bool same_singleton = std::all_of(nonempty.begin(), nonempty.end(), [&](const SpectrumDescriptor& p) {
        return p.kind == SpectrumDescriptor::Kind::singleton && p.values[0] == nonempty[0].values[0] &&
               p.phase == nonempty[0].phase;
      });
      if (same_singleton) {
        auto s = nonempty[0];
        s.source = "direct sum: " + s.source;
        return s;
      }
      std::vector<Scalar> vals;
      for (const auto& p : nonempty) vals.insert(vals.end(), p.values.begin(), p.values.end());
      return SpectrumDescriptor::numeric(std::move(vals), "union over direct summands");
    }
    default:
      break;
  }
  return dense_spectrum(model);
}

const char* verdict_name(RPlusVerdict::Verdict v) {
  switch (v) {
    case RPlusVerdict::Verdict::rplus_supercyclic: return "rplus_supercyclic";
    case RPlusVerdict::Verdict::not_rplus: return "not_rplus";
    case RPlusVerdict::Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

RPlusVerdict classify_rplus(bool supercyclic_assumed, const SpectrumDescriptor& spec, std::int64_t max_denominator) {
  RPlusVerdict v;
  v.max_denominator = max_denominator;
  if (!supercyclic_assumed) {
    v.branch = "no_assumption";
    v.reason = "supercyclicity is not established for this operator";
    return v;
  }
  if (spec.truncation_unreliable || spec.kind == SpectrumDescriptor::Kind::full_numeric) {
    v.branch = "numeric_spectrum";
    v.reason = "dual point spectrum known only from a finite truncation";
    return v;
  }
  if (spec.kind == SpectrumDescriptor::Kind::empty) {
    v.verdict = RPlusVerdict::Verdict::rplus_supercyclic;
    v.branch = "empty_spectrum";
    v.reason = "supercyclic with empty dual point spectrum";
    return v;
  }
  const Angle phase = spec.phase ? *spec.phase : phase_of(spec.values.at(0));
  if (phase.exact()) {
    v.verdict = RPlusVerdict::Verdict::not_rplus;
    v.branch = "finite_order";
    v.order = phase.den();
    v.reason = "z/|z| has order " + std::to_string(phase.den()) + ": orbits stay in finitely many ray families";
    return v;
  }
  const auto g = is_generator(phase, max_denominator);
  v.exact = false;
  if (g.generator) {
    v.verdict = RPlusVerdict::Verdict::rplus_supercyclic;
    v.branch = "infinite_order";
    v.reason = "z/|z| has no order up to denominator " + std::to_string(max_denominator);
  } else {
    v.branch = "apparent_finite_order";
    v.order = g.order;
    v.reason = "approximate phase is within rounding of a fraction with denominator " + std::to_string(g.order) +
               "; finite order cannot be certified";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Ray obstruction

std::size_t count_distinct_phases(std::vector<double> turns, double tol) {
  if (turns.empty()) return 0;
  for (auto& t : turns) t -= std::floor(t);
  std::sort(turns.begin(), turns.end());
  std::size_t gaps = 0;
  for (std::size_t i = 1; i < turns.size(); ++i)
    if (turns[i] - turns[i - 1] > tol) ++gaps;
  if (turns.front() + 1.0 - turns.back() > tol) ++gaps;
  return std::max<std::size_t>(gaps, 1);
}

RayObstructionReport ray_obstruction_check(const OperatorModel& model, const Vector& f, Scalar z,
                                           std::optional<Angle> phase, const Vector& x, std::size_t n_max) {
  require(f.dim() == model.dim() && x.dim() == model.dim(), ErrorCode::dimension_mismatch,
          "functional, vector and operator dimensions differ");
  require(z != Scalar(0.0), ErrorCode::invalid_argument, "eigenvalue must be nonzero");
  RayObstructionReport rep;
  rep.n_max = n_max;
  const CMatrix m = materialize(model);
  rep.eigen_residual = (m.transpose() * f.coords() - z * f.coords()).norm();
  require(rep.eigen_residual <= 1e-10 * std::max(1.0, std::abs(z) * f.norm()), ErrorCode::precondition,
          "(f, z) is not an eigenpair of the transpose");
  const auto pairing = [&](const CVector& v) { return (f.coords().array() * v.array()).sum(); };
  require(std::abs(pairing(x.coords())) > 0.0, ErrorCode::precondition, "f(x) must be nonzero");

  const Angle ph = phase ? *phase : phase_of(z);
  rep.applicable = ph.exact();
  rep.order = ph.exact() ? ph.den() : 0;

  const auto orb = orbit(model, x, static_cast<Index>(n_max));
  std::vector<double> turns;
  for (std::size_t n = 0; n < orb.size(); ++n) {
    turns.push_back(std::arg(pairing(orb[n].unit)) / kTwoPi);
    if (n == n_max / 2) rep.distinct_phases_half = count_distinct_phases(turns, 1e-9);
  }
  rep.distinct_phases = count_distinct_phases(turns, 1e-9);
  rep.bound_ok = rep.applicable && rep.distinct_phases <= static_cast<std::size_t>(rep.order);
  return rep;
}

// ---------------------------------------------------------------------------
// S_u algebra

Vector pn_apply(const OperatorModel& S, Index n, const Vector& v) {
  require(n >= 1, ErrorCode::invalid_argument, "p_n needs n >= 1");
  require(v.dim() == S.dim(), ErrorCode::dimension_mismatch, "dimension mismatch in p_n(S)v");
  CVector acc = v.coords();
  for (Index j = 1; j < n; ++j) acc = v.coords() + apply_raw(S, acc);
  return Vector(join(S.field(), v.field()), std::move(acc));
}

IdentityResidual telescoping_check(const OperatorModel& S, const Vector& x, Index n) {
  const CVector sx = apply(S, x).coords();
  const CVector lhs = pn_apply(S, n, Vector(join(S.field(), x.field()), x.coords() - sx)).coords();
  CVector p = x.coords();
  double scale = p.norm();
  for (Index j = 0; j < n; ++j) {
    p = apply_raw(S, p);
    scale += p.norm();
  }
  IdentityResidual r;
  r.residual = (lhs - (x.coords() - p)).norm();
  r.scale = std::max(scale, std::numeric_limits<double>::min());
  return r;
}

IdentityResidual su_orbit_identity_check(const OperatorModel& S, const Vector& u, const Vector& y, Index n) {
  require(n >= 0, ErrorCode::invalid_argument, "n must be nonnegative");
  require(y.dim() == S.dim() && u.dim() == S.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  const auto ext = OperatorModel::extension_su(S, u);
  const Index N = S.dim();
  CVector lhs(N + 1);
  lhs << y.coords(), Scalar(1.0);
  lhs = power_raw(ext, lhs, n);
  CVector rhs(N + 1);
  CVector top = y.coords();
  if (n >= 1) {
    const CVector w = u.coords() - (y.coords() - apply_raw(S, y.coords()));
    top += pn_apply(S, n, Vector(join(S.field(), join(u.field(), y.field())), w)).coords();
  }
  rhs << top, Scalar(1.0);
  IdentityResidual r;
  r.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  r.scale = std::max({1.0, lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
  return r;
}

IdentityResidual su_similarity_check(const OperatorModel& S, const Vector& v) {
  require(v.dim() == S.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  const CMatrix s = materialize(S);
  const CVector u = v.coords() - s * v.coords();
  // S_u taken from the operator model so its materialization is exercised too.
  const CMatrix su = materialize(OperatorModel::extension_su(S, Vector(join(S.field(), v.field()), u)));
  const Index N = s.rows();
  CMatrix L = CMatrix::Identity(N + 1, N + 1), Li = L, S0 = CMatrix::Zero(N + 1, N + 1);
  L.topRightCorner(N, 1) = v.coords();
  Li.topRightCorner(N, 1) = -v.coords();
  S0.topLeftCorner(N, N) = s;
  S0(N, N) = 1.0;
  IdentityResidual r;
  r.residual = (Li * su * L - S0).norm();
  r.scale = std::max(1.0, s.norm() * (1.0 + v.norm()) + v.norm());
  return r;
}

NotInRangeReport su_not_in_range_demo(const OperatorModel& S, const Vector& u, std::size_t samples,
                                      std::uint64_t seed) {
  require(u.dim() == S.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  const CMatrix s = materialize(S);
  const Index N = s.rows();
  const CMatrix a = CMatrix::Identity(N, N) - s;
  NotInRangeReport rep;
  rep.samples = samples;
  const CVector vstar = a.completeOrthogonalDecomposition().solve(u.coords());
  rep.optimum_residual = (u.coords() - a * vstar).norm();
  rep.optimum_check = similarity_gap(s, u.coords(), vstar).norm();
  Rng rng(seed);
  rep.sampled_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    CVector v(N);
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    for (Index j = 0; j < N; ++j) v[j] = scale * rng.normal();
    rep.sampled_min = std::min(rep.sampled_min, similarity_gap(s, u.coords(), v).norm());
  }
  rep.bounded_away = rep.optimum_residual > 1e-6 && rep.sampled_min >= rep.optimum_residual * (1.0 - 1e-9);
  return rep;
}

}  // namespace hypdyn
