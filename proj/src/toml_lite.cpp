#include "cablesim/toml_lite.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cablesim::toml {

const Value* Table::find(const std::string& key) const {
  const auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

const Table* Table::table(const std::string& key) const {
  const auto it = tables.find(key);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

int bracket_balance(const std::string& s) {
  bool in_string = false;
  int depth = 0;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                                 text[pos] == '\r'))
      ++pos;
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
};

std::optional<Value> parse_value(Cursor& cur, std::string& error);

std::optional<Value> parse_array(Cursor& cur, std::string& error) {
  ++cur.pos;  // '['
  Array arr;
  cur.skip_ws();
  if (!cur.eof() && cur.peek() == ']') {
    ++cur.pos;
    return Value{arr};
  }
  for (;;) {
    cur.skip_ws();
    auto v = parse_value(cur, error);
    if (!v) return std::nullopt;
    arr.push_back(std::move(*v));
    cur.skip_ws();
    if (cur.eof()) {
      error = "unterminated array";
      return std::nullopt;
    }
    if (cur.peek() == ',') {
      ++cur.pos;
      cur.skip_ws();
      if (!cur.eof() && cur.peek() == ']') {  // trailing comma
        ++cur.pos;
        return Value{arr};
      }
      continue;
    }
    if (cur.peek() == ']') {
      ++cur.pos;
      return Value{arr};
    }
    error = "expected ',' or ']' in array";
    return std::nullopt;
  }
}

std::optional<Value> parse_value(Cursor& cur, std::string& error) {
  cur.skip_ws();
  if (cur.eof()) {
    error = "missing value";
    return std::nullopt;
  }
  const char c = cur.peek();
  if (c == '"') {
    ++cur.pos;
    std::string s;
    while (!cur.eof() && cur.peek() != '"') {
      s += cur.peek();
      ++cur.pos;
    }
    if (cur.eof()) {
      error = "unterminated string";
      return std::nullopt;
    }
    ++cur.pos;
    return Value{s};
  }
  if (c == '[') return parse_array(cur, error);
  // bare token: number or boolean
  std::string tok;
  while (!cur.eof() && cur.peek() != ',' && cur.peek() != ']' && cur.peek() != ' ' &&
         cur.peek() != '\t' && cur.peek() != '\n' && cur.peek() != '\r') {
    tok += cur.peek();
    ++cur.pos;
  }
  if (tok == "true") return Value{true};
  if (tok == "false") return Value{false};
  char* end = nullptr;
  const double d = std::strtod(tok.c_str(), &end);
  if (end == nullptr || *end != '\0' || tok.empty()) {
    error = "cannot parse value '" + tok + "'";
    return std::nullopt;
  }
  return Value{d};
}

std::vector<std::string> split_path(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      parts.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(strip(cur));
  return parts;
}

Table* descend(Table& root, const std::vector<std::string>& path) {
  Table* t = &root;
  for (const auto& part : path) t = &t->tables[part];
  return t;
}

}  // namespace

ParseResult parse(const std::string& text) {
  ParseResult result;
  Table* current = &result.root;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      const bool is_array = line.size() > 1 && line[1] == '[';
      const std::string close = is_array ? "]]" : "]";
      const std::size_t end = line.find(close);
      if (end == std::string::npos) {
        result.errors.push_back("line " + std::to_string(line_no) + ": malformed table header");
        continue;
      }
      const std::string name = strip(line.substr(is_array ? 2 : 1, end - (is_array ? 2 : 1)));
      auto path = split_path(name);
      if (is_array) {
        const std::string leaf = path.back();
        path.pop_back();
        Table* parent = descend(result.root, path);
        parent->table_arrays[leaf].emplace_back();
        current = &parent->table_arrays[leaf].back();
      } else {
        current = descend(result.root, path);
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = strip(line.substr(0, eq));
    std::string rhs = strip(line.substr(eq + 1));
    // Multi-line arrays: keep reading until brackets balance.
    while (bracket_balance(rhs) > 0 && std::getline(in, line)) {
      ++line_no;
      rhs += " " + strip(strip_comment(line));
    }

    Cursor cur{rhs};
    std::string error;
    auto value = parse_value(cur, error);
    if (!value) {
      result.errors.push_back("line " + std::to_string(line_no) + ": " + error);
      continue;
    }
    cur.skip_ws();
    if (!cur.eof()) {
      result.errors.push_back("line " + std::to_string(line_no) + ": trailing characters");
      continue;
    }
    current->values[key] = std::move(*value);
  }
  return result;
}

ParseResult parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back("cannot open file: " + path);
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

void dump_value(const Value& v, std::string& out) {
  if (v.is_string()) {
    out += '"' + v.as_string() + '"';
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v.as_number());
    out += buf;
  } else {
    out += '[';
    for (const auto& e : v.as_array()) {
      dump_value(e, out);
      out += ',';
    }
    out += ']';
  }
}

void dump_table(const Table& t, const std::string& prefix, std::string& out) {
  for (const auto& [k, v] : t.values) {
    out += prefix + k + '=';
    dump_value(v, out);
    out += '\n';
  }
  for (const auto& [k, sub] : t.tables) dump_table(sub, prefix + k + '.', out);
  for (const auto& [k, arr] : t.table_arrays) {
    for (std::size_t i = 0; i < arr.size(); ++i)
      dump_table(arr[i], prefix + k + '[' + std::to_string(i) + "].", out);
  }
}

}  // namespace

std::string canonical_dump(const Table& table) {
  std::string out;
  dump_table(table, "", out);
  return out;
}

}  // namespace cablesim::toml
