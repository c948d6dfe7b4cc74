#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cablesim::toml {

// Minimal TOML subset: [tables], [[table arrays]], key = value with strings,
// numbers, booleans and (nested, possibly multi-line) arrays. Enough for the
// scenario files; anything fancier is rejected with a line number.
struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::string, double, bool, Array> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  const std::string& as_string() const { return std::get<std::string>(data); }
  double as_number() const { return std::get<double>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
};

struct Table {
  std::map<std::string, Value> values;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;

  const Value* find(const std::string& key) const;
  const Table* table(const std::string& key) const;
};

struct ParseResult {
  Table root;
  std::vector<std::string> errors;  // "line N: message"
};

ParseResult parse(const std::string& text);
ParseResult parse_file(const std::string& path);

// Canonical dump (sorted keys, fixed float format); input to the scene hash.
std::string canonical_dump(const Table& table);

}  // namespace cablesim::toml
