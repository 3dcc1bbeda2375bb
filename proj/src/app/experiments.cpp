#include "app/experiments.hpp"

#include "app/suites.hpp"
#include "core/asymptotics.hpp"
#include "core/criteria.hpp"
#include "core/cyclicity.hpp"
#include "core/orbit.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"
#include "core/torus.hpp"
#include "core/winding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hypdyn {

const char* param_type_name(ParamType t) {
  switch (t) {
    case ParamType::integer: return "integer";
    case ParamType::number: return "number";
    case ParamType::string: return "string";
    case ParamType::boolean: return "boolean";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Params

Params::Params(const std::vector<ParamSpec>& specs, const ConfigNode* given) : specs_(&specs) {
  if (given) {
    for (const auto& e : given->entries()) {
      const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == e.key; });
      if (!known) given->fail_at(e.key, "unknown parameter");
    }
    if (!given->blocks().empty()) given->fail_at(given->blocks().front().name, "parameters do not take blocks");
  }
  for (const auto& s : specs) {
    const auto* e = given ? given->find(s.name) : nullptr;
    values_.push_back(e ? e->value : s.fallback);
    given_.push_back(e != nullptr);
    const std::string& v = values_.back();
    auto bad = [&](const std::string& msg) {
      if (given) given->fail_at(s.name, msg);
      fail(ErrorCode::config, "field 'params." + s.name + "': " + msg);
    };
    try {
      if (s.type == ParamType::integer) parse_int_strict(v, "value");
      if (s.type == ParamType::number) parse_double_strict(v, "value");
    } catch (const Error& err) {
      bad(err.what());
    }
    if (s.type == ParamType::boolean && v != "true" && v != "false") bad("expected true or false, got '" + v + "'");
  }
}

const ParamSpec& Params::spec(const std::string& name) const {
  for (const auto& s : *specs_)
    if (s.name == name) return s;
  fail(ErrorCode::internal, "undeclared parameter '" + name + "'");
}

namespace {
std::size_t index_in(const std::vector<ParamSpec>& specs, const std::string& name) {
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (specs[i].name == name) return i;
  fail(ErrorCode::internal, "undeclared parameter '" + name + "'");
}
}  // namespace

std::int64_t Params::integer(const std::string& name) const {
  return parse_int_strict(values_[index_in(*specs_, name)], name);
}
double Params::number(const std::string& name) const {
  return parse_double_strict(values_[index_in(*specs_, name)], name);
}
const std::string& Params::text(const std::string& name) const { return values_[index_in(*specs_, name)]; }
bool Params::boolean(const std::string& name) const { return values_[index_in(*specs_, name)] == "true"; }
bool Params::given(const std::string& name) const { return given_[index_in(*specs_, name)]; }

Json Params::to_json() const {
  Json j = Json::object();
  for (std::size_t i = 0; i < specs_->size(); ++i) {
    const auto& s = (*specs_)[i];
    switch (s.type) {
      case ParamType::integer: j[s.name] = parse_int_strict(values_[i], s.name); break;
      case ParamType::number: j[s.name] = parse_double_strict(values_[i], s.name); break;
      case ParamType::boolean: j[s.name] = values_[i] == "true"; break;
      case ParamType::string: j[s.name] = values_[i]; break;
    }
  }
  return j;
}

namespace {

// ---------------------------------------------------------------------------
// Helpers

std::string num(double v) { return format_double(v); }

ParamSpec P(std::string name, ParamType t, std::string fallback, std::string help) {
  return {std::move(name), t, std::move(fallback), std::move(help)};
}
constexpr ParamType I = ParamType::integer, D = ParamType::number, S = ParamType::string, B = ParamType::boolean;

std::int64_t positive(const Params& p, const std::string& name, std::int64_t lo = 1, std::int64_t hi = 100000000) {
  const auto v = p.integer(name);
  require(v >= lo && v <= hi, ErrorCode::config,
          "field 'params." + name + "': must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double positive_number(const Params& p, const std::string& name) {
  const double v = p.number(name);
  require(v > 0.0, ErrorCode::config, "field 'params." + name + "': must be positive");
  return v;
}

CoverageMode mode_param(const Params& p) {
  const auto m = parse_mode(p.text("mode"));
  require(m.has_value(), ErrorCode::config, "field 'params.mode': expected plain, projective_complex or ray_positive");
  return *m;
}

Vector vector_param(const Params& p, const std::string& name, Index dim) {
  const Vector v = vector_from_text(p.text(name), "params." + name);
  require(v.dim() == dim, ErrorCode::config,
          "field 'params." + name + "': expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.dim()));
  return v;
}

std::vector<Index> index_list(const Params& p, const std::string& name) {
  std::vector<Index> out;
  for (auto v : parse_int_list(p.text(name), "params." + name)) out.push_back(static_cast<Index>(v));
  return out;
}

std::vector<double> double_list(const Params& p, const std::string& name) {
  return parse_double_list(p.text(name), "params." + name);
}

Json curve_json(const std::vector<double>& curve, std::int64_t points, Table& table) {
  Json prefix = Json::array(), frac = Json::array();
  table.header = {"prefix_length", "fraction"};
  if (curve.empty()) return Json{{"prefix_length", prefix}, {"fraction", frac}};
  const std::size_t count = std::min<std::size_t>(curve.size(), static_cast<std::size_t>(std::max<std::int64_t>(points, 2)));
  std::size_t last = static_cast<std::size_t>(-1);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t i = count == 1 ? 0 : j * (curve.size() - 1) / (count - 1);
    if (i == last) continue;
    last = i;
    prefix.push_back(i + 1);
    frac.push_back(curve[i]);
    table.rows.push_back({std::to_string(i + 1), num(curve[i])});
  }
  return Json{{"prefix_length", prefix}, {"fraction", frac}};
}

bool nondecreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

Json scalar_json(Scalar z) { return Json::array({jnum(z.real()), jnum(z.imag())}); }

const char* kSqrt2Minus1 = "0.41421356237309503";

// ---------------------------------------------------------------------------
// Orbits

ExperimentOutput run_orbit_coverage(const RunInput& in) {
  const auto& p = in.params;
  const OperatorModel op = in.op ? *in.op : OperatorModel::rotation2d(std::stod(kSqrt2Minus1));
  const Vector x = vector_param(p, "x", op.dim());
  const auto mode = mode_param(p);
  const Index n = positive(p, "n", 0);
  const double eps = positive_number(p, "epsilon");
  const Field field = join(op.field(), x.field());
  const auto orb = orbit(op, x, n);
  const auto net = sphere_net(op.dim(), static_cast<std::size_t>(positive(p, "net")), in.seed, field);
  const auto rep = coverage(orb, net, eps, mode, in.jobs);

  ExperimentOutput out;
  out.results["operator"] = describe(op);
  out.results["mode"] = mode_name(mode);
  out.results["fraction"] = rep.fraction;
  out.results["skipped_zero"] = rep.skipped_zero;
  out.results["orbit_length"] = orb.size();
  out.results["final_lognorm"] = jnum(orb.back().lognorm);
  out.results["truncation_leak_x"] = jnum(truncation_leak(op, x));
  out.results["curve"] = curve_json(rep.curve, p.integer("curve_points"), out.table);
  out.checks.push_back(check_true("curve_nondecreasing", nondecreasing(rep.curve)));
  out.checks.push_back(check_ge("fraction", rep.fraction, p.number("min_fraction")));
  return out;
}

ExperimentOutput run_coupled_orbit(const RunInput& in) {
  const auto& p = in.params;
  const OperatorModel op = in.op ? *in.op : OperatorModel::rotation2d(std::stod(kSqrt2Minus1));
  const Vector x = vector_param(p, "x", op.dim());
  const auto mode = mode_param(p);
  const TorusPoint g = TorusPoint::parse(p.text("g"));
  const Index n = positive(p, "n", 0);
  const double eps = positive_number(p, "epsilon");
  const std::size_t net_size = static_cast<std::size_t>(positive(p, "net"));
  const Field field = join(op.field(), x.field());

  const auto orb = coupled_orbit(op, x, g, n);
  const auto states = sphere_net(op.dim(), net_size, in.seed, field);
  Rng rng(mix_seed(in.seed, 1));
  std::vector<CoupledNetPoint> net;
  for (const auto& s : states) {
    std::vector<Angle> c;
    for (std::size_t i = 0; i < g.k(); ++i) c.push_back(Angle::approximate(rng.uniform()));
    net.push_back({s, TorusPoint(c)});
  }
  const auto rep = coupled_coverage(orb, net, eps, mode, in.jobs);
  const auto closure = closure_of_powers(g);

  ExperimentOutput out;
  out.results["operator"] = describe(op);
  out.results["g"] = g.spec();
  out.results["g_closure"] = {{"finite", closure.finite},
                              {"order", closure.order},
                              {"identity_component_dim", closure.identity_component_dim},
                              {"exact", closure.exact}};
  out.results["mode"] = mode_name(mode);
  out.results["fraction"] = rep.fraction;
  out.results["skipped_zero"] = rep.skipped_zero;
  out.results["curve"] = curve_json(rep.curve, p.integer("curve_points"), out.table);
  out.checks.push_back(check_true("curve_nondecreasing", nondecreasing(rep.curve)));
  out.checks.push_back(check_ge("fraction", rep.fraction, p.number("min_fraction")));
  return out;
}

// ---------------------------------------------------------------------------
// Torus

Json subgroup_json(const SubgroupDescriptor& s) {
  Json rel = Json::array();
  for (const auto& r : s.relations) rel.push_back(r);
  return {{"generator", s.generator.spec()},
          {"finite", s.finite},
          {"order", s.order},
          {"relations", rel},
          {"identity_component_dim", s.identity_component_dim},
          {"exact", s.exact},
          {"max_denominator", s.bounds.max_denominator},
          {"relation_bound", s.bounds.relation_bound}};
}

ExperimentOutput run_torus_closure(const RunInput& in) {
  const auto& p = in.params;
  ExperimentOutput out;
  out.table.header = {"item", "value"};
  if (!p.text("g").empty() && p.text("g") != "none") {
    SearchBounds bounds;
    bounds.max_denominator = positive(p, "max_denominator");
    bounds.relation_bound = positive(p, "relation_bound", 1, 1000);
    const auto s = closure_of_powers(TorusPoint::parse(p.text("g")), bounds);
    out.results["closure"] = subgroup_json(s);
    out.table.rows.push_back({"g", s.generator.spec()});
    out.table.rows.push_back({"finite", s.finite ? "true" : "false"});
    out.table.rows.push_back({"order", std::to_string(s.order)});
    out.table.rows.push_back({"identity_component_dim", std::to_string(s.identity_component_dim)});
  }
  const auto tuples = static_cast<std::size_t>(positive(p, "tuples", 0));
  if (tuples > 0) {
    const auto b = torus_batch(in.seed, tuples, static_cast<std::size_t>(positive(p, "max_k", 1, 6)),
                               positive(p, "max_q", 1, 1000), in.jobs);
    out.results["batch"] = {{"tuples", b.tuples}, {"matches", b.matches}, {"max_order", b.max_order}};
    out.table.rows.push_back({"batch_matches", std::to_string(b.matches) + "/" + std::to_string(b.tuples)});
    out.checks.push_back(check_eq("closure_matches_enumeration", static_cast<std::int64_t>(b.matches),
                                  static_cast<std::int64_t>(b.tuples)));
  }
  const Index rn = positive(p, "rotation_n", 0);
  if (rn > 0) {
    const double f = rotation_coverage(p.number("rotation_turns"), rn, positive_number(p, "rotation_epsilon"),
                                       static_cast<std::size_t>(positive(p, "rotation_net")), mix_seed(in.seed, 7), in.jobs);
    out.results["rotation"] = {{"turns", p.number("rotation_turns")}, {"orbit_length", rn + 1}, {"fraction", f}};
    out.table.rows.push_back({"rotation_fraction", num(f)});
    out.checks.push_back(check_ge("rotation_coverage", f, p.number("min_fraction")));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Winding

ExperimentOutput run_winding_props(const RunInput& in) {
  const auto& p = in.params;
  const auto s = winding_suite(in.seed, static_cast<std::size_t>(positive(p, "seeds")),
                               static_cast<std::size_t>(positive(p, "samples", 4, 100000)), in.jobs);
  const double tol = p.number("tol"), snap = p.number("snap_tol");
  ExperimentOutput out;
  out.results = {{"paths", s.paths},
                 {"concatenation_max", s.concat_max},
                 {"reparametrization_max", s.reparam_max},
                 {"scaling_max", s.scale_max},
                 {"closed_snap_max", s.closed_max},
                 {"closed_snapped", s.closed_snapped},
                 {"avoiding_max_abs", s.avoid_max_abs},
                 {"avoiding_bound_ok", s.avoid_bound_ok}};
  out.table.header = {"property", "max_residual"};
  out.table.rows = {{"concatenation", num(s.concat_max)},
                    {"reparametrization", num(s.reparam_max)},
                    {"scaling", num(s.scale_max)},
                    {"closed_snap", num(s.closed_max)},
                    {"avoiding_abs", num(s.avoid_max_abs)}};
  out.checks.push_back(check_le("concatenation_additivity", s.concat_max, tol));
  out.checks.push_back(check_le("reparametrization_invariance", s.reparam_max, tol));
  out.checks.push_back(check_le("scaling_invariance", s.scale_max, tol));
  out.checks.push_back(check_eq("closed_paths_snapped", static_cast<std::int64_t>(s.closed_snapped),
                                static_cast<std::int64_t>(s.paths)));
  out.checks.push_back(check_le("closed_snap_error", s.closed_max, snap));
  out.checks.push_back(check_lt("avoiding_abs_winding", s.avoid_max_abs, 1.0));
  out.checks.push_back(check_eq("avoiding_bound_holds", static_cast<std::int64_t>(s.avoid_bound_ok),
                                static_cast<std::int64_t>(s.paths)));
  return out;
}

ExperimentOutput run_lemma_map(const RunInput& in) {
  const auto& p = in.params;
  const auto r = lemma_map_demo(p.number("z"), static_cast<int>(positive(p, "m", 1, 1000000)),
                                static_cast<std::size_t>(positive(p, "samples", 2, 10000000)));
  ExperimentOutput out;
  out.results = {{"z_turns", r.z_turns},   {"m", r.m},           {"samples", r.samples},
                 {"path_kind", r.path_kind}, {"w_beta", r.w_beta}, {"sum_mid", r.sum_mid},
                 {"additivity_residual", r.additivity_residual}, {"bound_ok", r.bound_ok}};
  out.table.header = {"z_turns", "m", "path_kind", "w_beta", "sum_mid", "residual"};
  out.table.rows.push_back({num(r.z_turns), std::to_string(r.m), r.path_kind, num(r.w_beta), num(r.sum_mid),
                            num(r.additivity_residual)});
  out.checks.push_back(check_le("additivity", r.additivity_residual, p.number("tol")));
  out.checks.push_back(check_true("beta_bound", r.bound_ok));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion

std::vector<double> geometric(Index dim, double ratio) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (Index j = 0; j < dim; ++j) v[static_cast<std::size_t>(j)] = std::pow(ratio, -static_cast<double>(j));
  return v;
}

std::vector<double> scalars(const std::vector<Index>& n, double growth) {
  std::vector<double> s;
  for (Index k : n) s.push_back(std::pow(growth, static_cast<double>(k)));
  return s;
}

Json criterion_json(const CriterionReport& r) {
  return {{"n", r.n}, {"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}, {"tail_start", r.tail_start}, {"pass", r.pass}};
}

void criterion_table(const CriterionReport& r, Table& t, const std::string& label) {
  t.header = {"witness", "n", "r1", "r2", "r3"};
  for (std::size_t k = 0; k < r.n.size(); ++k)
    t.rows.push_back({label, std::to_string(r.n[k]), num(r.r1[k]), num(r.r2[k]), num(r.r3[k])});
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

ExperimentOutput run_sc_criterion(const RunInput& in) {
  const auto& p = in.params;
  const double c = positive_number(p, "c");
  const auto n = index_list(p, "n");
  const Index depth = positive(p, "depth");
  Index dim = p.integer("dim");
  if (dim <= 0) dim = depth + (n.empty() ? 0 : n.back()) + 1;
  std::vector<Vector> extra;
  if (p.number("extra_decay") > 0.0) extra.push_back(Vector::real(geometric(dim, p.number("extra_decay"))));
  const auto w = shift_witness(c, dim, depth, n, scalars(n, positive_number(p, "s_growth")), extra);
  const auto T = OperatorModel::backward_shift(WeightSequence::constant(c), dim);
  const auto r = verify_criterion(T, w, static_cast<std::size_t>(p.integer("tail_start")), p.number("tol"));
  const std::string expect = p.text("expect");
  require(expect == "pass" || expect == "fail", ErrorCode::config, "field 'params.expect': expected pass or fail");

  ExperimentOutput out;
  out.results["operator"] = describe(T);
  out.results["report"] = criterion_json(r);
  out.results["r1_max"] = max_of(r.r1);
  criterion_table(r, out.table, "T");
  out.checks.push_back(check_true(expect == "pass" ? "criterion_passes" : "criterion_fails", r.pass == (expect == "pass")));
  int e = 0;
  if (std::frexp(c, &e) == 0.5) out.checks.push_back(check_eq("r1_identically_zero", max_of(r.r1) == 0.0 ? 0 : 1, 0));
  return out;
}

ExperimentOutput run_combine(const RunInput& in) {
  const auto& p = in.params;
  const auto n = index_list(p, "n");
  const Index depth1 = positive(p, "depth1"), depth2 = positive(p, "depth2");
  const Index dim = std::max(depth1, depth2) + (n.empty() ? 0 : n.back()) + 1;
  const double c1 = positive_number(p, "c1"), c2 = positive_number(p, "c2");
  const auto T1 = OperatorModel::backward_shift(WeightSequence::constant(c1), dim);
  const auto T2 = OperatorModel::backward_shift(WeightSequence::constant(c2), dim);
  const auto w1 = shift_witness(c1, dim, depth1, n, scalars(n, 1.0), {Vector::real(geometric(dim, positive_number(p, "decay")))});
  const auto w2 = shift_witness(c2, dim, depth2, n, scalars(n, positive_number(p, "s2_growth")));
  const auto tail = static_cast<std::size_t>(p.integer("tail_start"));
  const double tol = p.number("tol");
  const auto a = verify_criterion(T1, w1, tail, tol), b = verify_criterion(T2, w2, tail, tol);
  const auto c = verify_criterion(OperatorModel::direct_sum({T1, T2}), combine_witnesses({w1, w2}), tail, tol);
  bool r1 = true, r2 = true, r3 = true;
  for (std::size_t k = 0; k < c.n.size(); ++k) {
    r1 = r1 && c.r1[k] == std::max(a.r1[k], b.r1[k]);
    r2 = r2 && c.r2[k] == std::max(a.r2[k], b.r2[k]);
    r3 = r3 && c.r3[k] == std::max(a.r3[k], b.r3[k]);
  }
  ExperimentOutput out;
  out.results["first"] = criterion_json(a);
  out.results["second"] = criterion_json(b);
  out.results["combined"] = criterion_json(c);
  criterion_table(a, out.table, "first");
  criterion_table(b, out.table, "second");
  criterion_table(c, out.table, "combined");
  out.checks.push_back(check_true("r1_componentwise_max", r1));
  out.checks.push_back(check_true("r2_componentwise_max", r2));
  out.checks.push_back(check_true("r3_componentwise_max", r3));
  out.checks.push_back(check_true("verdict_is_conjunction", c.pass == (a.pass && b.pass)));
  out.checks.push_back(check_true("combined_passes", c.pass));
  return out;
}

// ---------------------------------------------------------------------------
// R+ classification and the ray obstruction

Json spectrum_json(const SpectrumDescriptor& s) {
  Json vals = Json::array();
  for (auto z : s.values) vals.push_back(scalar_json(z));
  Json j = {{"kind", spectrum_kind_name(s.kind)},
            {"values", vals},
            {"provenance", provenance_name(s.provenance)},
            {"truncation_unreliable", s.truncation_unreliable},
            {"source", s.source}};
  j["phase"] = s.phase ? Json(s.phase->spec()) : Json(nullptr);
  return j;
}

Json verdict_json(const RPlusVerdict& v) {
  return {{"verdict", verdict_name(v.verdict)}, {"branch", v.branch}, {"reason", v.reason},
          {"exact", v.exact},                  {"order", v.order},   {"max_denominator", v.max_denominator}};
}

ExperimentOutput run_rplus(const RunInput& in) {
  const auto& p = in.params;
  const bool assumed = p.boolean("supercyclic");
  const auto Q = positive(p, "max_denominator");
  ExperimentOutput out;
  out.table.header = {"fixture", "spectrum", "verdict", "branch", "exact", "expected"};
  Json rows = Json::array();
  auto add = [&](const std::string& name, const SpectrumDescriptor& s, const std::string& expected) {
    const auto v = classify_rplus(assumed, s, Q);
    Json r = {{"fixture", name}, {"spectrum", spectrum_json(s)}, {"classification", verdict_json(v)}};
    r["expected"] = expected.empty() ? Json(nullptr) : Json(expected);
    rows.push_back(r);
    out.table.rows.push_back({name, spectrum_kind_name(s.kind), verdict_name(v.verdict), v.branch,
                              v.exact ? "true" : "false", expected});
    if (!expected.empty()) out.checks.push_back(check_true("fixture_" + name, expected == verdict_name(v.verdict)));
  };
  if (in.op) {
    add("operator", spectrum_of_adjoint(*in.op), p.text("expect"));
  } else if (!p.text("z").empty() && p.text("z") != "none") {
    const Scalar z = parse_scalar(p.text("z"), "params.z");
    require(z != Scalar(0.0), ErrorCode::config, "field 'params.z': must be nonzero");
    add("z", SpectrumDescriptor::singleton(z, "params.z"), p.text("expect"));
  } else {
    const auto B = OperatorModel::backward_shift(WeightSequence::exp2decay(), 12);
    add("empty", spectrum_of_adjoint(B), "rplus_supercyclic");
    add("minus_one", SpectrumDescriptor::singleton(Scalar(-1.0), "fixture"), "not_rplus");
    add("i", SpectrumDescriptor::singleton(Scalar(0.0, 1.0), "fixture"), "not_rplus");
    add("three_sevenths", SpectrumDescriptor::singleton(std::polar(1.0, kTwoPi * 3.0 / 7.0), Angle::rational(3, 7), "fixture"),
        "not_rplus");
    add("irrational", SpectrumDescriptor::singleton(std::polar(1.0, kTwoPi * std::stod(kSqrt2Minus1)), "fixture"),
        "rplus_supercyclic");
    add("su_extension", spectrum_of_adjoint(OperatorModel::extension_su(B, Vector::basis(Field::real, 12, 11))),
        "not_rplus");
  }
  out.results["fixtures"] = rows;
  return out;
}

ExperimentOutput run_ray_obstruction(const RunInput& in) {
  const auto& p = in.params;
  const Index n_max = positive(p, "n_max");
  const Vector x = vector_param(p, "x", 2).embed(Field::complex);
  const Vector f = Vector::basis(Field::complex, 2, 0);
  auto fixture = [](Scalar z) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = z;
    m(1, 1) = 0.5;
    return OperatorModel::dense(Field::complex, m);
  };
  ExperimentOutput out;
  out.table.header = {"fixture", "order", "distinct_phases", "distinct_phases_half", "applicable", "bound_ok"};
  Json rows = Json::array();
  auto record = [&](const std::string& name, const RayObstructionReport& r) {
    rows.push_back({{"fixture", name},
                    {"order", r.order},
                    {"eigen_residual", r.eigen_residual},
                    {"n_max", r.n_max},
                    {"distinct_phases", r.distinct_phases},
                    {"distinct_phases_half", r.distinct_phases_half},
                    {"applicable", r.applicable},
                    {"bound_ok", r.bound_ok}});
    out.table.rows.push_back({name, std::to_string(r.order), std::to_string(r.distinct_phases),
                              std::to_string(r.distinct_phases_half), r.applicable ? "true" : "false",
                              r.bound_ok ? "true" : "false"});
  };
  for (auto q : parse_int_list(p.text("orders"), "params.orders")) {
    require(q >= 1 && q <= 100000, ErrorCode::config, "field 'params.orders': orders must lie in [1, 100000]");
    const std::int64_t num_ = q == 1 ? 0 : (q % 2 == 1 && q > 2 ? (q - 1) / 2 : 1);
    const Angle a = Angle::rational(num_, q);
    const Scalar z = std::polar(p.number("radius"), kTwoPi * a.turns());
    const auto r = ray_obstruction_check(fixture(z), f, z, a, x, static_cast<std::size_t>(n_max));
    record("order_" + std::to_string(q), r);
    out.checks.push_back(check_le("order_" + std::to_string(q) + "_distinct", static_cast<double>(r.distinct_phases),
                                  static_cast<double>(q)));
  }
  const Scalar zi = std::polar(p.number("radius"), kTwoPi * std::stod(kSqrt2Minus1));
  record("irrational", ray_obstruction_check(fixture(zi), f, zi, std::nullopt, x, static_cast<std::size_t>(n_max)));
  out.results["fixtures"] = rows;
  return out;
}

// ---------------------------------------------------------------------------
// S_u identities and the ratio structure

ExperimentOutput run_su_identities(const RunInput& in) {
  const auto& p = in.params;
  const auto s = identity_suite(in.seed, static_cast<std::size_t>(positive(p, "instances")),
                                positive(p, "max_dim", 2, 200), positive(p, "max_power", 1, 10000), in.jobs);
  const double tol = p.number("tol");
  const Index N = positive(p, "range_dim", 2, 2000);
  const auto S = OperatorModel::identity_plus(OperatorModel::backward_shift(WeightSequence::harmonic(), N));
  const auto nr = su_not_in_range_demo(S, Vector::basis(Field::real, N, N - 1),
                                       static_cast<std::size_t>(positive(p, "range_samples")), mix_seed(in.seed, 99));
  ExperimentOutput out;
  out.results = {{"instances", s.instances},
                 {"telescoping_max", s.telescoping_max},
                 {"su_orbit_max", s.su_orbit_max},
                 {"su_similarity_max", s.su_similarity_max},
                 {"orbit_shift_max", s.orbit_shift_max},
                 {"not_in_range",
                  {{"operator", describe(S)},
                   {"optimum_residual", nr.optimum_residual},
                   {"optimum_check", nr.optimum_check},
                   {"sampled_min", nr.sampled_min},
                   {"samples", nr.samples},
                   {"bounded_away", nr.bounded_away}}}};
  out.table.header = {"identity", "max_relative_residual"};
  out.table.rows = {{"telescoping", num(s.telescoping_max)},
                    {"su_orbit", num(s.su_orbit_max)},
                    {"su_similarity", num(s.su_similarity_max)},
                    {"orbit_shift", num(s.orbit_shift_max)},
                    {"not_in_range_gap", num(nr.optimum_residual)}};
  out.checks.push_back(check_le("telescoping", s.telescoping_max, tol));
  out.checks.push_back(check_le("su_orbit_identity", s.su_orbit_max, tol));
  out.checks.push_back(check_le("su_similarity", s.su_similarity_max, tol));
  out.checks.push_back(check_le("orbit_shift", s.orbit_shift_max, tol));
  out.checks.push_back(check_true("not_in_range_gap_open", nr.bounded_away));
  return out;
}

ExperimentOutput run_ratio(const RunInput& in) {
  const auto& p = in.params;
  const double tol = p.number("tol");
  ExperimentOutput out;
  out.table.header = {"case", "max_relative_residual"};
  if (in.op) {
    const auto z = parse_scalar_list(p.text("z"), "params.z");
    const Vector u = vector_param(p, "u", in.op->dim());
    const auto r = ratio_structure_check(*in.op, z, u, positive(p, "max_power"));
    out.results["operator"] = describe(*in.op);
    out.results["max_relative_residual"] = r.max_relative_residual;
    out.table.rows.push_back({"operator", num(r.max_relative_residual)});
    out.checks.push_back(check_le("ratio_structure", r.max_relative_residual, tol));
    return out;
  }
  const auto s = identity_suite(in.seed, static_cast<std::size_t>(positive(p, "instances")),
                                positive(p, "max_dim", 2, 200), positive(p, "max_power", 1, 10000), in.jobs);
  out.results["instances"] = s.instances;
  out.results["ratio_max"] = s.ratio_max;
  out.results["orbit_shift_max"] = s.orbit_shift_max;
  out.table.rows = {{"ratio", num(s.ratio_max)}, {"orbit_shift", num(s.orbit_shift_max)}};
  out.checks.push_back(check_le("ratio_structure", s.ratio_max, tol));
  out.checks.push_back(check_le("orbit_shift", s.orbit_shift_max, tol));
  return out;
}

// ---------------------------------------------------------------------------
// Cyclicity

ExperimentOutput run_krylov(const RunInput& in) {
  const auto& p = in.params;
  const OperatorModel op = in.op ? *in.op : OperatorModel::backward_shift(WeightSequence::constant(1.0), 6);
  const Vector x = p.text("x").empty() || p.text("x") == "last" ? Vector::basis(op.field(), op.dim(), op.dim() - 1)
                                                                : vector_param(p, "x", op.dim());
  const auto r = krylov_rank(op, x, positive_number(p, "tol"), p.integer("max_powers"));
  ExperimentOutput out;
  out.results = {{"operator", describe(op)}, {"dim", r.dim}, {"rank", r.rank}, {"tol", r.tol},
                 {"pivots", r.pivots},       {"cyclic", r.cyclic}};
  out.table.header = {"j", "pivot"};
  for (std::size_t j = 0; j < r.pivots.size(); ++j) out.table.rows.push_back({std::to_string(j), num(r.pivots[j])});
  out.checks.push_back(check_le("rank_at_most_dim", static_cast<double>(r.rank), static_cast<double>(r.dim)));
  const std::string expect = p.text("expect");
  require(expect == "any" || expect == "cyclic" || expect == "not_cyclic", ErrorCode::config,
          "field 'params.expect': expected any, cyclic or not_cyclic");
  if (expect != "any") out.checks.push_back(check_true("expected_" + expect, r.cyclic == (expect == "cyclic")));
  return out;
}

ExperimentOutput run_vandermonde(const RunInput& in) {
  const auto& p = in.params;
  ExperimentOutput out;
  out.table.header = {"case", "rank", "sigma_ratio", "full_rank"};
  if (!p.text("z").empty() && p.text("z") != "none") {
    const auto z = parse_scalar_list(p.text("z"), "params.z");
    const auto r = vandermonde_span_check(z, positive(p, "d", 1, 64));
    out.results["single"] = {{"n", r.n}, {"d", r.d}, {"rank", r.rank}, {"sigma_ratio", r.sigma_ratio},
                             {"repeated", r.repeated}, {"full_rank", r.full_rank}};
    out.table.rows.push_back({"given", std::to_string(r.rank), num(r.sigma_ratio), r.full_rank ? "true" : "false"});
    out.checks.push_back(check_true("full_rank_iff_distinct", r.full_rank != r.repeated));
  }
  const auto tuples = static_cast<std::size_t>(positive(p, "tuples", 0));
  if (tuples > 0) {
    const auto b = vandermonde_batch(in.seed, tuples, positive(p, "max_n", 1, 64), positive(p, "max_d", 1, 64), in.jobs);
    out.results["batch"] = {{"tuples", b.tuples}, {"full_rank", b.full_rank}, {"min_sigma_ratio", b.min_sigma_ratio}};
    out.table.rows.push_back({"batch", std::to_string(b.full_rank) + "/" + std::to_string(b.tuples),
                              num(b.min_sigma_ratio), b.full_rank == b.tuples ? "true" : "false"});
    out.checks.push_back(check_eq("batch_full_rank", static_cast<std::int64_t>(b.full_rank), static_cast<std::int64_t>(b.tuples)));
  }
  return out;
}

ExperimentOutput run_direct_sum(const RunInput& in) {
  const auto& p = in.params;
  ExperimentOutput out;
  out.table.header = {"item", "value"};
  if (in.op) {
    const auto z = parse_scalar_list(p.text("z"), "params.z");
    const Vector u = vector_param(p, "u", in.op->dim());
    const auto r = direct_sum_cyclicity(*in.op, z, u);
    Json ev = Json::array();
    for (auto l : r.eigenvalues) ev.push_back(scalar_json(l));
    out.results["single"] = {{"operator", describe(*in.op)}, {"eigenvalues", ev},
                             {"min_product_gap", r.min_product_gap}, {"predicted_cyclic", r.predicted_cyclic},
                             {"krylov_rank", r.krylov.rank}, {"krylov_cyclic", r.krylov.cyclic}, {"agrees", r.agrees}};
    out.table.rows.push_back({"single_predicted", r.predicted_cyclic ? "true" : "false"});
    out.table.rows.push_back({"single_krylov", r.krylov.cyclic ? "true" : "false"});
    out.checks.push_back(check_true("single_agrees", r.agrees));
  }
  const auto instances = static_cast<std::size_t>(positive(p, "instances", 0));
  if (instances > 0) {
    const auto b = direct_sum_batch(in.seed, instances, positive(p, "max_d", 1, 12), positive(p, "max_n", 1, 8), in.jobs);
    out.results["batch"] = {{"instances", b.instances}, {"agree", b.agree}, {"predicted_cyclic", b.predicted_cyclic},
                            {"engineered_collisions", b.engineered}};
    out.table.rows.push_back({"batch_agree", std::to_string(b.agree) + "/" + std::to_string(b.instances)});
    out.table.rows.push_back({"batch_collisions", std::to_string(b.engineered)});
    out.checks.push_back(check_eq("batch_agrees", static_cast<std::int64_t>(b.agree), static_cast<std::int64_t>(b.instances)));
  }
  const auto scan = static_cast<std::size_t>(positive(p, "scan_instances", 0));
  if (scan > 0) {
    const auto s = square_sum_scan(mix_seed(in.seed, 5), scan, positive(p, "scan_d", 1, 8), in.jobs);
    out.results["square_sum_scan"] = {{"instances", s.instances}, {"sum_cyclic", s.sum_cyclic},
                                      {"square_cyclic", s.square_cyclic}, {"candidates", s.candidates}};
    out.table.rows.push_back({"scan_candidates", std::to_string(s.candidates)});
  }
  return out;
}

std::vector<double> grid_function(const std::string& name, Index m) {
  std::vector<double> v(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    double y = 0.0;
    if (name == "one") y = 1.0;
    else if (name == "linear") y = t;
    else if (name == "cos") y = std::cos(kTwoPi * 0.5 * t);
    else fail(ErrorCode::config, "grid function '" + name + "' is not one of one, linear, cos");
    v[static_cast<std::size_t>(i)] = y;
  }
  return v;
}

ExperimentOutput run_volterra(const RunInput& in) {
  const auto& p = in.params;
  const auto grids = index_list(p, "grids");
  require(grids.size() >= 2, ErrorCode::config, "field 'params.grids': need at least two grid sizes");
  std::vector<double> res;
  for (Index m : grids) {
    require(m >= 2 && m <= 4000, ErrorCode::config, "field 'params.grids': sizes must lie in [2, 4000]");
    res.push_back(volterra_intertwine_residual(m));
  }
  const double order = std::log(res.front() / res.back()) / std::log(static_cast<double>(grids.back()) / static_cast<double>(grids.front()));
  const Index m = positive(p, "m", 2, 4000);
  const auto phi = phi_annihilation_check(grid_function(p.text("f"), m), grid_function(p.text("g"), m), m,
                                          positive(p, "n_max", 0, 1000));
  ExperimentOutput out;
  out.results["grids"] = grids;
  out.results["residuals"] = res;
  out.results["order"] = order;
  out.results["phi"] = {{"m", phi.m}, {"n_max", phi.n_max}, {"values", phi.phi}, {"max_abs", phi.max_abs}, {"defect", phi.defect}};
  out.table.header = {"m", "residual"};
  for (std::size_t i = 0; i < grids.size(); ++i) out.table.rows.push_back({std::to_string(grids[i]), num(res[i])});
  bool decreasing = true;
  for (std::size_t i = 1; i < res.size(); ++i) decreasing = decreasing && res[i] < res[i - 1];
  out.checks.push_back(check_true("residual_decreases", decreasing));
  out.checks.push_back(check_ge("refinement_order", order, p.number("min_order")));
  out.checks.push_back(check_le("phi_over_defect", phi.defect > 0 ? phi.max_abs / phi.defect : phi.max_abs,
                                p.number("phi_factor")));
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotics

Json log_value_json(const LogValue& v) { return {{"sign", v.sign()}, {"log_abs", jnum(v.log_abs())}}; }

ExperimentOutput run_asymptotics(const RunInput& in) {
  const auto& p = in.params;
  std::vector<std::int64_t> grid;
  if (p.integer("n") >= 0) grid = {p.integer("n")};
  else grid = parse_int_list(p.text("grid"), "params.grid");
  for (auto n : grid) require(n >= 0 && n <= 1000000000, ErrorCode::config, "field 'params.grid': n must lie in [0, 1e9]");
  const auto x = parse_double_list(p.text("x"), "params.x");
  const auto y = SequenceRule::parse(p.text("y"));
  const auto rep = divergence_report(x, grid);

  ExperimentOutput out;
  out.table.header = {"n", "ln_A", "ln_B", "ln_B_over_A", "ln_A_over_ln2n", "bound_sign", "bound_ln_abs", "tail_k"};
  Json rows = Json::array();
  bool ratio_ok = true;
  for (const auto& r : rep.rows) {
    const double lr = r.b.log_abs() - r.a.log_abs();
    ratio_ok = ratio_ok && lr <= -2.0;
    const double ln_n = std::log(static_cast<double>(r.n));
    const double norm = r.n >= 2 ? r.a.log_abs() / (ln_n * ln_n) : std::nan("");
    const std::int64_t tail = r.n >= 3 ? tail_threshold(r.n) : -1;
    Json row = {{"n", r.n},
                {"A", log_value_json(r.a)},
                {"B", log_value_json(r.b)},
                {"A_value", jnum(r.a.to_double())},
                {"B_value", jnum(r.b.to_double())},
                {"ln_B_over_A", lr},
                {"ln_A_over_ln2n", jnum(norm)},
                {"bound", log_value_json(r.bound)},
                {"sn_coordinate", log_value_json(sn_coordinate(y, p.integer("j"), r.n))}};
    row["tail_threshold"] = tail >= 0 ? Json(tail) : Json(nullptr);
    rows.push_back(row);
    out.table.rows.push_back({std::to_string(r.n), num(r.a.log_abs()), num(r.b.log_abs()), num(lr), num(norm),
                              std::to_string(r.bound.sign()), num(r.bound.log_abs()), std::to_string(tail)});
    if (r.n == 0) {
      out.checks.push_back(check_true("A0_is_one", r.a.to_double() == 1.0));
      out.checks.push_back(check_true("B0_is_exp_minus_two", r.b.to_double() == std::exp(-2.0)));
    }
  }
  out.results["rows"] = rows;
  out.results["c"] = rep.c;
  out.results["positive_from_n"] = rep.positive_from >= 0 ? Json(rep.rows[static_cast<std::size_t>(rep.positive_from)].n) : Json(nullptr);
  out.results["sequence"] = y.spec();
  out.results["coordinate"] = p.integer("j");
  out.checks.push_back(check_true("ratio_below_exp_minus_two", ratio_ok));

  if (p.boolean("sweep")) {
    const std::int64_t top = positive(p, "sweep_max", 100, 100000000);
    const std::int64_t mono_top = std::min<std::int64_t>(top, 100000);
    std::vector<double> la(static_cast<std::size_t>(top + 1)), lb(static_cast<std::size_t>(mono_top + 1));
    parallel_for(la.size(), in.jobs, [&](std::size_t n) {
      la[n] = a_n(static_cast<std::int64_t>(n)).log_abs();
      if (n < lb.size()) lb[n] = b_n(static_cast<std::int64_t>(n)).log_abs();
    });
    bool a_increasing = true, norm_increasing = true, ratio_all = true;
    double norm_max = -1.0;
    for (std::int64_t n = 3; n <= mono_top; ++n) a_increasing = a_increasing && la[static_cast<std::size_t>(n)] > la[static_cast<std::size_t>(n - 1)];
    for (std::int64_t n = 0; n <= mono_top; ++n) ratio_all = ratio_all && lb[static_cast<std::size_t>(n)] - la[static_cast<std::size_t>(n)] <= -2.0;
    double prev = -1.0;
    for (std::int64_t n = 100; n <= top; ++n) {
      const double l = std::log(static_cast<double>(n));
      const double v = la[static_cast<std::size_t>(n)] / (l * l);
      if (n > 100) norm_increasing = norm_increasing && v > prev;
      norm_max = std::max(norm_max, v);
      prev = v;
    }
    bool decades = true;
    double last = 0.0;
    Json dec = Json::array();
    for (std::int64_t n = 10; n <= mono_top; n *= 10) {
      const double r = lb[static_cast<std::size_t>(n)] - la[static_cast<std::size_t>(n)];
      if (n > 10) decades = decades && r < last;
      dec.push_back({{"n", n}, {"ln_B_over_A", r}});
      last = r;
    }
    out.results["sweep"] = {{"max_n", top},
                            {"a_increasing_from_2_to", mono_top},
                            {"normalized_max", norm_max},
                            {"decades", dec}};
    out.checks.push_back(check_true("A_strictly_increasing", a_increasing));
    out.checks.push_back(check_true("ratio_bound_everywhere", ratio_all));
    out.checks.push_back(check_true("ratio_decreasing_over_decades", decades));
    out.checks.push_back(check_true("normalized_log_increasing", norm_increasing));
    out.checks.push_back(check_lt("normalized_log_max", norm_max, 0.25));
  }

  const auto sn = parse_int_list(p.text("stirling"), "params.stirling");
  if (!sn.empty()) {
    Json bands = Json::array();
    double amin = 1e300, amax = 0, bmin = 1e300, bmax = 0;
    for (auto n : sn) {
      const auto b = stirling_band_check(n);
      bands.push_back({{"n", b.n}, {"k_max", b.k_max}, {"alpha_hat", b.alpha_hat}, {"beta_hat", b.beta_hat}});
      amin = std::min(amin, b.alpha_hat);
      amax = std::max(amax, b.alpha_hat);
      bmin = std::min(bmin, b.beta_hat);
      bmax = std::max(bmax, b.beta_hat);
    }
    out.results["stirling"] = bands;
    out.checks.push_back(check_le("stirling_alpha_spread", amax / amin, 2.0));
    out.checks.push_back(check_le("stirling_beta_spread", bmax / bmin, 2.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-parameter semigroup

ExperimentOutput run_semigroup(const RunInput& in) {
  const auto& p = in.params;
  const OperatorModel S = in.op ? *in.op : OperatorModel::backward_shift(WeightSequence::harmonic(), 6);
  const CMatrix eS = expm(materialize(S));
  const double norm_eS = Eigen::JacobiSVD<CMatrix>(eS).singularValues()(0);
  double c = p.number("c");
  if (c <= 0.0) c = 1.5 * norm_eS;
  const auto ts = double_list(p, "t"), ss = double_list(p, "s");
  const double tol = positive_number(p, "rank_tol");
  const Index N = S.dim();
  auto build = [&](double t, double s) {
    const Scalar f = std::pow(c, s - t);
    return OperatorModel::direct_sum({OperatorModel::scalar_multiple(f, OperatorModel::matrix_exponential(S, t)),
                                      OperatorModel::scalar_multiple(f, OperatorModel::identity(1, S.field()))});
  };
  ExperimentOutput out;
  out.table.header = {"t", "s", "rank", "deficiency", "sigma_min_nonzero"};
  Json rows = Json::array();
  bool all_deficient = true;
  for (double t : ts)
    for (double s : ss) {
      require(t >= 0.0 && s >= 0.0, ErrorCode::config, "fields 'params.t' and 'params.s' must be nonnegative");
      const CMatrix M = materialize(build(t, s)) - std::pow(c, s - t) * CMatrix::Identity(N + 1, N + 1);
      const auto sv = Eigen::JacobiSVD<CMatrix>(M).singularValues();
      const double scale = std::max(1.0, std::pow(c, s - t));
      Index rank = 0;
      double smin = std::nan("");
      for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * scale) {
          ++rank;
          smin = sv(i);
        }
      const Index deficiency = N + 1 - rank;
      all_deficient = all_deficient && deficiency >= 1;
      rows.push_back({{"t", t}, {"s", s}, {"rank", rank}, {"deficiency", deficiency}, {"sigma_min_nonzero", jnum(smin)}});
      out.table.rows.push_back({num(t), num(s), std::to_string(rank), std::to_string(deficiency), num(smin)});
    }
  double law = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    for (std::size_t j = 0; j + 1 < ss.size(); ++j) {
      const CMatrix a = materialize(build(ts[i], ss[j])), b = materialize(build(ts[i + 1], ss[j + 1]));
      const CMatrix ab = materialize(build(ts[i] + ts[i + 1], ss[j] + ss[j + 1]));
      law = std::max(law, (a * b - ab).norm() / std::max(1.0, ab.norm()));
    }
  out.results["operator"] = describe(S);
  out.results["c"] = c;
  out.results["norm_exp_S"] = norm_eS;
  out.results["pairs"] = rows;
  out.results["semigroup_law_max"] = law;
  out.checks.push_back(check_true("c_exceeds_norm", c > norm_eS));
  out.checks.push_back(check_true("range_never_dense", all_deficient));
  out.checks.push_back(check_le("semigroup_law", law, 1e-10));
  return out;
}

// ---------------------------------------------------------------------------
// Registry

std::vector<ExperimentSpec> build_registry() {
  std::vector<ExperimentSpec> r;
  const ParamSpec curve = P("curve_points", I, "50", "points of the coverage curve kept in the report");
  r.push_back({"orbit-coverage", "epsilon-net coverage of an orbit under a scaling mode", true, true,
               {P("n", I, "20000", "orbit length (powers 0..n)"), P("net", I, "500", "net size"),
                P("epsilon", D, "0.02", "coverage radius"), P("mode", S, "ray_positive", "plain|projective_complex|ray_positive"),
                P("x", S, "1,0", "start vector"), P("min_fraction", D, "0.99", "required covered fraction"), curve},
               run_orbit_coverage});
  r.push_back({"coupled-orbit", "coverage of the coupled orbit (T^n x, g^n) in the product", true, true,
               {P("n", I, "20000", "orbit length"), P("net", I, "400", "net size"), P("epsilon", D, "0.05", "coverage radius"),
                P("mode", S, "ray_positive", "scaling mode"), P("x", S, "1,0", "start vector"),
                P("g", S, "0.2360679774997898", "torus element, e.g. 1/3 or 0.25,1/2"),
                P("min_fraction", D, "0.9", "required covered fraction"), curve},
               run_coupled_orbit});
  r.push_back({"torus-closure", "closed subgroups generated by torus elements", true, false,
               {P("g", S, "none", "torus element to analyze"), P("tuples", I, "100", "random rational tuples checked"),
                P("max_k", I, "3", "largest torus dimension"), P("max_q", I, "12", "largest denominator"),
                P("max_denominator", I, "1000000", "rational detection bound Q"),
                P("relation_bound", I, "20", "integer relation search bound"),
                P("rotation_turns", D, kSqrt2Minus1, "rotation angle for the coverage run"),
                P("rotation_n", I, "100000", "rotation orbit length (0 skips)"),
                P("rotation_epsilon", D, "0.001", "rotation coverage radius"),
                P("rotation_net", I, "10000", "rotation net size"), P("min_fraction", D, "0.999", "required coverage")},
               run_torus_closure});
  r.push_back({"winding-props", "winding number properties over random sampled paths", true, false,
               {P("seeds", I, "1000", "number of random instances"), P("samples", I, "64", "samples per path"),
                P("tol", D, "1e-12", "residual bound"), P("snap_tol", D, "1e-9", "closed-path snapping bound")},
               run_winding_props});
  r.push_back({"lemma-map-demo", "sub-path windings of the path through z^{m}", false, false,
               {P("z", D, "0.3", "arg z in turns"), P("m", I, "10", "power"), P("samples", I, "200", "samples per sub-path"),
                P("tol", D, "1e-12", "additivity bound")},
               run_lemma_map});
  r.push_back({"sc-criterion", "criterion residuals for a shift witness", false, false,
               {P("c", D, "2", "shift weight"), P("dim", I, "0", "truncation (0: depth + max n + 1)"),
                P("depth", I, "5", "support of E and F"), P("n", S, "10,20,30,40,50,60,70,80", "power sequence"),
                P("s_growth", D, "1", "scalars s_k = s_growth^n_k"),
                P("extra_decay", D, "0", "adds the E vector x_j = extra_decay^-j when positive"),
                P("tail_start", I, "3", "first index of the tail"), P("tol", D, "1e-8", "tail tolerance"),
                P("expect", S, "pass", "pass|fail")},
               run_sc_criterion});
  r.push_back({"combine-witnesses", "witness for a direct sum from witnesses of the parts", false, false,
               {P("c1", D, "2", "first weight"), P("c2", D, "3", "second weight"), P("depth1", I, "5", "first depth"),
                P("depth2", I, "3", "second depth"), P("n", S, "10,20,30,40,50,60,70,80", "shared powers"),
                P("s2_growth", D, "1.2", "second scalars s_k = s2_growth^n_k"),
                P("decay", D, "5", "first extra E vector x_j = decay^-j"), P("tail_start", I, "4", "tail start"),
                P("tol", D, "1e-8", "tail tolerance")},
               run_combine});
  r.push_back({"rplus-classify", "R+ dichotomy from the dual point spectrum", false, true,
               {P("z", S, "none", "single eigenvalue to classify instead of the fixture table"),
                P("supercyclic", B, "true", "whether supercyclicity is assumed"),
                P("max_denominator", I, "1000000", "rational detection bound"),
                P("expect", S, "", "expected verdict for a single case")},
               run_rplus});
  r.push_back({"ray-obstruction", "phase counts f(T^n x)/|f(T^n x)| for finite-order eigenvalues", false, false,
               {P("orders", S, "2,3,4,7", "orders q of the fixtures"), P("n_max", I, "300", "largest power"),
                P("radius", D, "1", "|z|"), P("x", S, "0.3+0.8i,1", "start vector")},
               run_ray_obstruction});
  r.push_back({"su-identities", "telescoping, S_u orbit and similarity identities", true, false,
               {P("instances", I, "200", "random instances"), P("max_dim", I, "20", "largest dimension"),
                P("max_power", I, "50", "largest power"), P("tol", D, "1e-9", "relative residual bound"),
                P("range_dim", I, "12", "dimension of the not-in-range demo"),
                P("range_samples", I, "500", "random v tried in the not-in-range demo")},
               run_su_identities});
  r.push_back({"krylov", "Krylov rank of a start vector", false, true,
               {P("x", S, "last", "start vector (default: last basis vector)"), P("tol", D, "1e-8", "pivot tolerance"),
                P("max_powers", I, "-1", "number of powers (-1: dimension)"), P("expect", S, "any", "any|cyclic|not_cyclic")},
               run_krylov});
  r.push_back({"vandermonde", "span of (z_1^k a, ..., z_n^k a)", true, false,
               {P("z", S, "none", "explicit tuple"), P("d", I, "3", "block dimension for the explicit tuple"),
                P("tuples", I, "100", "random unimodular tuples"), P("max_n", I, "8", "largest tuple length"),
                P("max_d", I, "6", "largest block dimension")},
               run_vandermonde});
  r.push_back({"direct-sum-cyclicity", "cyclicity of z_1 T + ... + z_n T against the spectral prediction", true, true,
               {P("z", S, "1,2", "coefficients for an explicit operator"), P("u", S, "", "vector for an explicit operator"),
                P("instances", I, "500", "random instances"), P("max_d", I, "5", "largest dimension of T"),
                P("max_n", I, "4", "largest number of summands"), P("scan_instances", I, "0", "T+T scan size"),
                P("scan_d", I, "3", "T+T scan dimension")},
               run_direct_sum});
  r.push_back({"ratio-structure", "component ratios of direct-sum orbits", true, true,
               {P("instances", I, "200", "random instances"), P("max_dim", I, "20", "largest dimension"),
                P("max_power", I, "50", "largest power"), P("tol", D, "1e-9", "relative residual bound"),
                P("z", S, "1,2", "coefficients for an explicit operator"), P("u", S, "", "vector for an explicit operator")},
               run_ratio});
  r.push_back({"volterra", "discrete intertwining of V and J", false, false,
               {P("grids", S, "40,80,160,320", "grid sizes for the refinement study"),
                P("min_order", D, "0.9", "required refinement order"), P("m", I, "200", "grid for the annihilation check"),
                P("n_max", I, "30", "largest power"), P("f", S, "one", "one|linear|cos"), P("g", S, "one", "one|linear|cos"),
                P("phi_factor", D, "10", "bound on max|Phi| / defect")},
               run_volterra});
  r.push_back({"asymptotics", "log-domain A_n, B_n and the divergence bound", false, false,
               {P("n", I, "-1", "single n (overrides grid)"), P("grid", S, "0,1,10,100,1000,10000,100000,1000000", "n values"),
                P("x", S, "1", "finitely supported x for c = max |x_j|"),
                P("y", S, "harmonic", "sequence for the coordinate formula"), P("j", I, "0", "coordinate index"),
                P("sweep", B, "true", "run the monotonicity sweeps"), P("sweep_max", I, "1000000", "sweep upper end"),
                P("stirling", S, "1000,10000,100000", "n values for the Stirling band")},
               run_asymptotics});
  r.push_back({"semigroup-ex1", "rank deficiency of T_{t,s} - c^{s-t} I", false, true,
               {P("c", D, "0", "scale (0: 1.5 |e^S|)"), P("t", S, "0.5,1,2", "t values"), P("s", S, "0,0.5,1.5", "s values"),
                P("rank_tol", D, "1e-10", "relative singular value cutoff")},
               run_semigroup});
  return r;
}

}  // namespace

const std::vector<ExperimentSpec>& experiments() {
  static const std::vector<ExperimentSpec> registry = build_registry();
  return registry;
}

const ExperimentSpec* find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return &e;
  return nullptr;
}

RunResult run_experiment(const ConfigNode& config, unsigned jobs) {
  for (const auto& e : config.entries())
    if (e.key != "experiment" && e.key != "seed") config.fail_at(e.key, "unknown top-level key");
  for (const auto& b : config.blocks())
    if (b.name != "params" && b.name != "operator" && b.name != "output") config.fail_at(b.name, "unknown block");
  for (const char* once : {"params", "operator", "output"})
    if (config.blocks_named(once).size() > 1) config.fail_at(once, "block given more than once");

  const std::string name = config.get_string("experiment");
  const ExperimentSpec* spec = find_experiment(name);
  if (!spec) {
    const auto* e = config.find("experiment");
    fail(ErrorCode::unknown_experiment,
         (e && e->line > 0 ? "line " + std::to_string(e->line) + ", " : std::string()) + "unknown experiment '" + name + "'");
  }
  std::uint64_t seed = 0;
  if (config.has("seed")) {
    const std::string s = config.get_string("seed");
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc() || ptr != s.data() + s.size()) config.fail_at("seed", "expected a nonnegative integer");
  } else if (spec->stochastic) {
    config.fail_at("seed", "experiment '" + name + "' is stochastic and needs a seed");
  }
  if (const auto* out = config.block("output")) {
    for (const auto& e : out->entries())
      if (e.key != "dir" && e.key != "format") out->fail_at(e.key, "unknown output key");
    if (out->has("format") && out->get_string("format") != "json" && out->get_string("format") != "csv")
      out->fail_at("format", "expected json or csv");
  }
  std::optional<OperatorModel> op;
  if (const auto* node = config.block("operator")) {
    if (!spec->takes_operator) node->fail_at("kind", "experiment '" + name + "' does not take an operator");
    op = operator_from_config(*node);
  }
  const Params params(spec->params, config.block("params"));

  // Echo: everything that determines the run, nothing about where it goes.
  ConfigNode echo;
  echo.set("experiment", name);
  echo.set("seed", std::to_string(seed));
  if (op) echo.add_block("operator") = operator_to_config(*op);
  ConfigNode& pe = echo.add_block("params");
  for (const auto& ps : spec->params)
    if (!params.text(ps.name).empty()) pe.set(ps.name, params.text(ps.name));

  RunInput in{params, op, seed, std::max(1u, jobs)};
  ExperimentOutput out;
  try {
    out = spec->run(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    fail(e.code(), name + ": " + e.what());
  }

  RunResult result;
  result.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const Check& c) { return c.pass; });
  Json& j = result.report;
  j["schema_version"] = kSchemaVersion;
  j["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
  j["experiment"] = name;
  j["seed"] = seed;
  j["config"] = serialize_config(echo);
  j["parameters"] = params.to_json();
  j["checks"] = Json::array();
  for (const auto& c : out.checks) j["checks"].push_back(check_json(c));
  j["pass"] = result.pass;
  j["results"] = out.results;
  result.json_text = j.dump(2) + "\n";

  std::string csv = "# " + std::string(kArtifactName) + " " + kArtifactVersion + " " + name + " seed=" + std::to_string(seed) +
                    " pass=" + (result.pass ? "true" : "false") + "\n";
  result.csv_text = csv + out.table.to_csv();
  return result;
}

}  // namespace hypdyn
