#pragma once

#include "core/common.hpp"
#include "core/operator_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hypdyn {

// Structured text: `key = value` lines, `# comments`, nested `name { ... }`
// blocks. Block names may repeat (e.g. several `part` blocks).
class ConfigNode {
 public:
  struct Entry {
    std::string key, value;
    int line = 0;
  };
  struct Block;

  ConfigNode() = default;
  explicit ConfigNode(std::string path, int line = 0) : path_(std::move(path)), line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  const Entry* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }
  const ConfigNode* block(std::string_view name) const;
  std::vector<const ConfigNode*> blocks_named(std::string_view name) const;

  // Typed reads; errors name the line and field path.
  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, const std::string& fallback) const;
  std::int64_t get_int(std::string_view key) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  // Replaces the first entry with this key, or appends.
  void set(const std::string& key, const std::string& value, int line = 0);
  bool erase(std::string_view key);
  ConfigNode& add_block(const std::string& name, int line = 0);
  ConfigNode& ensure_block(const std::string& name);
  bool erase_block(std::string_view name);

  [[noreturn]] void fail_at(std::string_view key, const std::string& message) const;
  std::string field_path(std::string_view key) const;

 private:
  std::string path_;
  int line_ = 0;
  std::vector<Entry> entries_;
  std::vector<Block> blocks_;
};

struct ConfigNode::Block {
  std::string name;
  ConfigNode node;
};

ConfigNode parse_config(std::string_view text, const std::string& source = "config");
std::string serialize_config(const ConfigNode& node);

// Number formatting that round-trips through parse_double.
std::string format_double(double v);
double parse_double_strict(std::string_view text, const std::string& what);
std::int64_t parse_int_strict(std::string_view text, const std::string& what);
// "1.5", "-2i", "1-0.5i".
Scalar parse_scalar(std::string_view text, const std::string& what);
std::string format_scalar(Scalar z);
std::vector<double> parse_double_list(std::string_view text, const std::string& what);
std::vector<Scalar> parse_scalar_list(std::string_view text, const std::string& what);
std::vector<std::int64_t> parse_int_list(std::string_view text, const std::string& what);

// Operator specs as config blocks:
//   kind = backward_shift | forward_shift | identity | dense | identity_plus |
//          volterra | composition_j | rotation2d | scalar_multiple |
//          direct_sum | extension_su | matrix_exponential
// with kind-specific keys and nested `inner`, `part`, `base`, `generator`
// blocks.
OperatorModel operator_from_config(const ConfigNode& node);
ConfigNode operator_to_config(const OperatorModel& model, const std::string& path = "operator");

Vector vector_from_text(std::string_view text, const std::string& what);
std::string vector_to_text(const Vector& v);

}  // namespace hypdyn
