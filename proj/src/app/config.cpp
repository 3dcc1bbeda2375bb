#include "app/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace hypdyn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalars

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double_strict(std::string_view text, const std::string& what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(!text.empty() && ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(v),
          ErrorCode::config, what + ": expected a finite number, got '" + std::string(text) + "'");
  return v;
}

std::int64_t parse_int_strict(std::string_view text, const std::string& what) {
  text = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(!text.empty() && ec == std::errc() && ptr == text.data() + text.size(), ErrorCode::config,
          what + ": expected an integer, got '" + std::string(text) + "'");
  return v;
}

Scalar parse_scalar(std::string_view text, const std::string& what) {
  text = trim(text);
  require(!text.empty(), ErrorCode::config, what + ": empty scalar");
  if (text.back() != 'i') return {parse_double_strict(text, what), 0.0};
  std::string_view body = text.substr(0, text.size() - 1);
  std::size_t split_at = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  auto imag = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double_strict(s, what);
  };
  if (split_at == std::string_view::npos) return {0.0, imag(body)};
  return {parse_double_strict(body.substr(0, split_at), what), imag(body.substr(split_at))};
}

std::string format_scalar(Scalar z) {
  std::string im = format_double(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_double(z.real()) + im + "i";
}

std::vector<double> parse_double_list(std::string_view text, const std::string& what) {
  std::vector<double> out;
  for (auto tok : split(text, ',')) out.push_back(parse_double_strict(tok, what));
  return out;
}

std::vector<Scalar> parse_scalar_list(std::string_view text, const std::string& what) {
  std::vector<Scalar> out;
  for (auto tok : split(text, ',')) out.push_back(parse_scalar(tok, what));
  return out;
}

std::vector<std::int64_t> parse_int_list(std::string_view text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (auto tok : split(text, ',')) out.push_back(parse_int_strict(tok, what));
  return out;
}

Vector vector_from_text(std::string_view text, const std::string& what) {
  const bool complex = text.find('i') != std::string_view::npos;
  const auto values = parse_scalar_list(text, what);
  return complex ? Vector::complex(values) : Vector::real([&] {
    std::vector<double> re;
    for (auto z : values) re.push_back(z.real());
    return re;
  }());
}

std::string vector_to_text(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.dim(); ++i) {
    if (i) s += ",";
    s += v.field() == Field::complex ? format_scalar(v[i]) : format_double(v[i].real());
  }
  return s;
}

// ---------------------------------------------------------------------------
// ConfigNode

const ConfigNode::Entry* ConfigNode::find(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

const ConfigNode* ConfigNode::block(std::string_view name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return &b.node;
  return nullptr;
}

std::vector<const ConfigNode*> ConfigNode::blocks_named(std::string_view name) const {
  std::vector<const ConfigNode*> out;
  for (const auto& b : blocks_)
    if (b.name == name) out.push_back(&b.node);
  return out;
}

std::string ConfigNode::field_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

void ConfigNode::fail_at(std::string_view key, const std::string& message) const {
  const Entry* e = find(key);
  const int line = e ? e->line : line_;
  std::string where = line > 0 ? "line " + std::to_string(line) + ", " : "";
  fail(ErrorCode::config, where + "field '" + field_path(key) + "': " + message);
}

std::string ConfigNode::get_string(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) fail_at(key, "missing required value");
  return e->value;
}

std::string ConfigNode::get_string(std::string_view key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

std::int64_t ConfigNode::get_int(std::string_view key) const {
  const std::string v = get_string(key);
  try {
    return parse_int_strict(v, "value");
  } catch (const Error& err) {
    fail_at(key, err.what());
  }
}

std::int64_t ConfigNode::get_int(std::string_view key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigNode::get_double(std::string_view key) const {
  const std::string v = get_string(key);
  try {
    return parse_double_strict(v, "value");
  } catch (const Error& err) {
    fail_at(key, err.what());
  }
}

double ConfigNode::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool ConfigNode::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail_at(key, "expected true or false, got '" + v + "'");
}

void ConfigNode::set(const std::string& key, const std::string& value, int line) {
  for (auto& e : entries_)
    if (e.key == key) {
      e.value = value;
      e.line = line;
      return;
    }
  entries_.push_back({key, value, line});
}

bool ConfigNode::erase(std::string_view key) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

ConfigNode& ConfigNode::add_block(const std::string& name, int line) {
  blocks_.push_back({name, ConfigNode(field_path(name), line)});
  return blocks_.back().node;
}

ConfigNode& ConfigNode::ensure_block(const std::string& name) {
  for (auto& b : blocks_)
    if (b.name == name) return b.node;
  return add_block(name);
}

bool ConfigNode::erase_block(std::string_view name) {
  auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.name == name; });
  if (it == blocks_.end()) return false;
  blocks_.erase(it);
  return true;
}

// ---------------------------------------------------------------------------
// Text form

ConfigNode parse_config(std::string_view text, const std::string& source) {
  ConfigNode root;
  std::vector<ConfigNode*> stack{&root};
  int line_no = 0;
  auto error = [&](const std::string& field, const std::string& msg) {
    std::string where = source + ":" + std::to_string(line_no);
    if (!field.empty()) where += ": field '" + field + "'";
    fail(ErrorCode::config, where + ": " + msg);
  };
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (text.empty()) break;
      continue;
    }
    ConfigNode& top = *stack.back();
    if (line == "}") {
      if (stack.size() == 1) error("", "unmatched '}'");
      stack.pop_back();
    } else if (line.back() == '{') {
      const std::string_view name = trim(line.substr(0, line.size() - 1));
      if (!valid_key(name)) error(top.field_path(name), "invalid block name");
      stack.push_back(&top.add_block(std::string(name), line_no));
    } else if (const auto eq = line.find('='); eq != std::string_view::npos) {
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (!valid_key(key)) error(top.field_path(key), "invalid key");
      if (top.has(key)) error(top.field_path(key), "duplicate key");
      if (value.empty()) error(top.field_path(key), "empty value");
      top.set(std::string(key), std::string(value), line_no);
    } else {
      error("", "expected 'key = value', 'name {' or '}', got '" + std::string(line) + "'");
    }
    if (text.empty()) break;
  }
  if (stack.size() > 1) {
    fail(ErrorCode::config, source + ":" + std::to_string(stack.back()->line()) + ": field '" +
                                stack.back()->path() + "': block is never closed");
  }
  return root;
}

namespace {

void serialize_into(const ConfigNode& node, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& e : node.entries()) out += pad + e.key + " = " + e.value + "\n";
  for (const auto& b : node.blocks()) {
    out += pad + b.name + " {\n";
    serialize_into(b.node, depth + 1, out);
    out += pad + "}\n";
  }
}

}  // namespace

std::string serialize_config(const ConfigNode& node) {
  std::string out;
  serialize_into(node, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Operator specs

namespace {

Field parse_field(const ConfigNode& node) {
  const std::string f = node.get_string("field", "real");
  if (f == "real") return Field::real;
  if (f == "complex") return Field::complex;
  node.fail_at("field", "expected real or complex, got '" + f + "'");
}

Index positive_dim(const ConfigNode& node, std::string_view key) {
  const auto v = node.get_int(key);
  if (v < 1 || v > 100000) node.fail_at(key, "must lie in [1, 100000]");
  return static_cast<Index>(v);
}

const ConfigNode& child(const ConfigNode& node, std::string_view name) {
  const auto all = node.blocks_named(name);
  if (all.size() != 1) node.fail_at(name, "expected exactly one '" + std::string(name) + "' block");
  return *all.front();
}

template <class F>
auto wrap(const ConfigNode& node, std::string_view key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    node.fail_at(key, e.what());
  }
}

}  // namespace

OperatorModel operator_from_config(const ConfigNode& node) {
  const std::string kind = node.get_string("kind");
  auto allowed = [&](std::initializer_list<std::string_view> keys, std::initializer_list<std::string_view> blocks) {
    for (const auto& e : node.entries())
      if (e.key != "kind" && std::find(keys.begin(), keys.end(), e.key) == keys.end())
        node.fail_at(e.key, "unknown key for operator kind '" + kind + "'");
    for (const auto& b : node.blocks())
      if (std::find(blocks.begin(), blocks.end(), b.name) == blocks.end())
        node.fail_at(b.name, "unexpected block for operator kind '" + kind + "'");
  };
  return wrap(node, "kind", [&]() -> OperatorModel {
    if (kind == "backward_shift" || kind == "forward_shift") {
      allowed({"weights", "dim"}, {});
      const auto w = wrap(node, "weights", [&] { return WeightSequence::parse(node.get_string("weights", "constant:1")); });
      const Index dim = positive_dim(node, "dim");
      return wrap(node, "weights", [&] {
        return kind == "backward_shift" ? OperatorModel::backward_shift(w, dim) : OperatorModel::forward_shift(w, dim);
      });
    }
    if (kind == "identity") {
      allowed({"dim", "field"}, {});
      return OperatorModel::identity(positive_dim(node, "dim"), parse_field(node));
    }
    if (kind == "dense") {
      allowed({"field", "entries"}, {});
      const Field field = parse_field(node);
      const std::string text = node.get_string("entries");
      const auto rows = split(text, ';');
      const Index n = static_cast<Index>(rows.size());
      CMatrix m(n, n);
      for (Index i = 0; i < n; ++i) {
        const auto vals = wrap(node, "entries", [&] { return parse_scalar_list(rows[static_cast<std::size_t>(i)], "entry"); });
        if (static_cast<Index>(vals.size()) != n) node.fail_at("entries", "matrix must be square (row " + std::to_string(i) + ")");
        for (Index j = 0; j < n; ++j) {
          if (field == Field::real && vals[static_cast<std::size_t>(j)].imag() != 0.0)
            node.fail_at("entries", "complex entry in a real matrix");
          m(i, j) = vals[static_cast<std::size_t>(j)];
        }
      }
      return OperatorModel::dense(field, m);
    }
    if (kind == "identity_plus") {
      allowed({}, {"inner"});
      return OperatorModel::identity_plus(operator_from_config(child(node, "inner")));
    }
    if (kind == "volterra" || kind == "composition_j") {
      allowed({"grid"}, {});
      const Index m = positive_dim(node, "grid");
      return kind == "volterra" ? OperatorModel::volterra(m) : OperatorModel::composition_j(m);
    }
    if (kind == "rotation2d") {
      allowed({"turns"}, {});
      return OperatorModel::rotation2d(node.get_double("turns"));
    }
    if (kind == "scalar_multiple") {
      allowed({"z"}, {"inner"});
      const Scalar z = wrap(node, "z", [&] { return parse_scalar(node.get_string("z"), "z"); });
      return OperatorModel::scalar_multiple(z, operator_from_config(child(node, "inner")));
    }
    if (kind == "direct_sum") {
      allowed({}, {"part"});
      std::vector<OperatorModel> parts;
      for (const auto* p : node.blocks_named("part")) parts.push_back(operator_from_config(*p));
      if (parts.empty()) node.fail_at("part", "direct_sum needs at least one part block");
      return OperatorModel::direct_sum(std::move(parts));
    }
    if (kind == "extension_su") {
      allowed({"u"}, {"base"});
      const auto base = operator_from_config(child(node, "base"));
      const Vector u = wrap(node, "u", [&] { return vector_from_text(node.get_string("u"), "u"); });
      return wrap(node, "u", [&] { return OperatorModel::extension_su(base, u); });
    }
    if (kind == "matrix_exponential") {
      allowed({"t"}, {"generator"});
      return OperatorModel::matrix_exponential(operator_from_config(child(node, "generator")), node.get_double("t"));
    }
    node.fail_at("kind", "unknown operator kind '" + kind + "'");
  });
}

ConfigNode operator_to_config(const OperatorModel& model, const std::string& path) {
  ConfigNode out(path);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DenseNode>) {
          out.set("kind", "dense");
          out.set("field", field_name(n.field));
          std::string entries;
          for (Index i = 0; i < n.entries.rows(); ++i) {
            if (i) entries += "; ";
            for (Index j = 0; j < n.entries.cols(); ++j) {
              if (j) entries += ",";
              entries += n.field == Field::complex ? format_scalar(n.entries(i, j)) : format_double(n.entries(i, j).real());
            }
          }
          out.set("entries", entries);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          out.set("kind", n.forward ? "forward_shift" : "backward_shift");
          out.set("weights", n.weights.spec());
          out.set("dim", std::to_string(n.dim));
        } else if constexpr (std::is_same_v<T, IdentityPlusNode>) {
          out.set("kind", "identity_plus");
          out.add_block("inner") = operator_to_config(n.inner, out.field_path("inner"));
        } else if constexpr (std::is_same_v<T, VolterraNode>) {
          out.set("kind", "volterra");
          out.set("grid", std::to_string(n.grid));
        } else if constexpr (std::is_same_v<T, CompositionJNode>) {
          out.set("kind", "composition_j");
          out.set("grid", std::to_string(n.grid));
        } else if constexpr (std::is_same_v<T, Rotation2DNode>) {
          out.set("kind", "rotation2d");
          out.set("turns", format_double(n.turns));
        } else if constexpr (std::is_same_v<T, ScalarMultipleNode>) {
          out.set("kind", "scalar_multiple");
          out.set("z", format_scalar(n.z));
          out.add_block("inner") = operator_to_config(n.inner, out.field_path("inner"));
        } else if constexpr (std::is_same_v<T, DirectSumNode>) {
          out.set("kind", "direct_sum");
          for (const auto& p : n.parts) out.add_block("part") = operator_to_config(p, out.field_path("part"));
        } else if constexpr (std::is_same_v<T, ExtensionSuNode>) {
          out.set("kind", "extension_su");
          out.set("u", vector_to_text(n.u));
          out.add_block("base") = operator_to_config(n.base, out.field_path("base"));
        } else if constexpr (std::is_same_v<T, MatrixExponentialNode>) {
          out.set("kind", "matrix_exponential");
          out.set("t", format_double(n.t));
          out.add_block("generator") = operator_to_config(n.generator, out.field_path("generator"));
        }
      },
      model.node().data);
  return out;
}

}  // namespace hypdyn
