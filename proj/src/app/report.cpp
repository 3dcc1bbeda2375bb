#include "app/report.hpp"

#include "app/config.hpp"

#include <cmath>

namespace hypdyn {

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

namespace {

Check make(std::string name, bool pass, Json value, Json threshold, std::string rel) {
  return Check{std::move(name), pass, std::move(value), std::move(threshold), std::move(rel)};
}

}  // namespace

Check check_le(std::string name, double value, double threshold) {
  return make(std::move(name), value <= threshold, jnum(value), jnum(threshold), "<=");
}
Check check_lt(std::string name, double value, double threshold) {
  return make(std::move(name), value < threshold, jnum(value), jnum(threshold), "<");
}
Check check_ge(std::string name, double value, double threshold) {
  return make(std::move(name), value >= threshold, jnum(value), jnum(threshold), ">=");
}
Check check_eq(std::string name, std::int64_t value, std::int64_t expected) {
  return make(std::move(name), value == expected, Json(value), Json(expected), "==");
}
Check check_true(std::string name, bool value) { return make(std::move(name), value, Json(value), Json(true), "is"); }

Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["relation"] = c.relation;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  return j;
}

std::string Table::to_csv() const {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

const std::string& report_schema_text() {
  static const std::string text = R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "https://hypdyn.invalid/report-1.0.json",
  "title": "hypdyn experiment report",
  "type": "object",
  "required": ["schema_version", "artifact", "experiment", "seed", "config", "parameters", "checks", "pass", "results"],
  "additionalProperties": false,
  "properties": {
    "schema_version": {"const": "1.0"},
    "artifact": {
      "type": "object",
      "required": ["name", "version"],
      "additionalProperties": false,
      "properties": {
        "name": {"const": "hypdyn"},
        "version": {"type": "string", "minLength": 1}
      }
    },
    "experiment": {
      "enum": ["orbit-coverage", "coupled-orbit", "torus-closure", "winding-props", "lemma-map-demo",
               "sc-criterion", "combine-witnesses", "rplus-classify", "ray-obstruction", "su-identities",
               "krylov", "vandermonde", "direct-sum-cyclicity", "ratio-structure", "volterra",
               "asymptotics", "semigroup-ex1"]
    },
    "seed": {"type": "integer", "minimum": 0},
    "config": {"type": "string"},
    "parameters": {"type": "object"},
    "checks": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "pass", "relation", "value", "threshold"],
        "additionalProperties": false,
        "properties": {
          "name": {"type": "string", "minLength": 1},
          "pass": {"type": "boolean"},
          "relation": {"enum": ["<=", ">=", "==", "<", ">", "is"]},
          "value": {"type": ["number", "boolean", "null"]},
          "threshold": {"type": ["number", "boolean", "null"]}
        }
      }
    },
    "pass": {"type": "boolean"},
    "results": {"type": "object"}
  }
})";
  return text;
}

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

bool has_type(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

void validate_node(const Json& schema, const Json& v, const std::string& ptr, std::vector<SchemaIssue>& out) {
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    std::string names;
    if (it->is_array()) {
      for (const auto& t : *it) {
        ok = ok || has_type(v, t.get<std::string>());
        names += (names.empty() ? "" : "|") + t.get<std::string>();
      }
    } else {
      names = it->get<std::string>();
      ok = has_type(v, names);
    }
    if (!ok) {
      out.push_back({ptr, "expected type " + names + ", got " + std::string(v.type_name())});
      return;
    }
  }
  if (auto it = schema.find("const"); it != schema.end() && v != *it)
    out.push_back({ptr, "expected " + it->dump() + ", got " + v.dump()});
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& e : *it) found = found || e == v;
    if (!found) out.push_back({ptr, "value " + v.dump() + " is not one of the allowed values"});
  }
  if (auto it = schema.find("minimum"); it != schema.end() && v.is_number() && v.get<double>() < it->get<double>())
    out.push_back({ptr, "value below minimum " + it->dump()});
  if (auto it = schema.find("minLength"); it != schema.end() && v.is_string() &&
      v.get<std::string>().size() < it->get<std::size_t>())
    out.push_back({ptr, "string shorter than " + it->dump()});
  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end())
      for (const auto& k : *it)
        if (!v.contains(k.get<std::string>()))
          out.push_back({ptr + "/" + escape_token(k.get<std::string>()), "required member is missing"});
    const auto props = schema.find("properties");
    const bool closed = schema.value("additionalProperties", true) == false;
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = ptr + "/" + escape_token(it.key());
      if (props != schema.end() && props->contains(it.key())) {
        validate_node((*props)[it.key()], it.value(), child, out);
      } else if (closed) {
        out.push_back({child, "unexpected member"});
      }
    }
  }
  if (v.is_array()) {
    if (auto it = schema.find("items"); it != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i) validate_node(*it, v[i], ptr + "/" + std::to_string(i), out);
  }
}

}  // namespace

std::vector<SchemaIssue> validate_report(const Json& doc) {
  static const Json schema = Json::parse(report_schema_text());
  std::vector<SchemaIssue> out;
  if (doc.is_object() && doc.contains("schema_version") && doc["schema_version"] != schema["properties"]["schema_version"]["const"]) {
    out.push_back({"/schema_version", "schema version mismatch: report has " + doc["schema_version"].dump() +
                                          ", validator expects \"" + std::string(kSchemaVersion) + "\""});
    return out;
  }
  validate_node(schema, doc, "", out);
  if (out.empty()) {
    bool all = true;
    for (const auto& c : doc["checks"]) all = all && c["pass"].get<bool>();
    if (doc["pass"].get<bool>() != all) out.push_back({"/pass", "pass disagrees with the check verdicts"});
  }
  return out;
}

namespace {

// Tracks the JSON pointer of the value being read so a truncated or
// malformed document can be located.
class PointerTracker : public nlohmann::json_sax<Json> {
 public:
  std::string pointer() const {
    std::string p;
    for (const auto& f : frames_) p += "/" + (f.array ? std::to_string(f.index) : escape_token(f.key));
    return p;
  }
  std::string message;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    frames_.push_back({false, 0, ""});
    return true;
  }
  bool key(string_t& k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    frames_.push_back({true, 0, ""});
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override {
    message = ex.what();
    return false;
  }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
  };
  std::vector<Frame> frames_;

  bool value() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
    return true;
  }
  bool close() {
    frames_.pop_back();
    return value();
  }
};

}  // namespace

std::vector<SchemaIssue> validate_report_text(const std::string& text) {
  PointerTracker tracker;
  if (!Json::sax_parse(text, &tracker)) return {{tracker.pointer(), "malformed JSON: " + tracker.message}};
  return validate_report(Json::parse(text));
}

}  // namespace hypdyn
