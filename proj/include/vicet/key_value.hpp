#pragma once

// Flat "key = value" text files: one pair per line, '#' starts a comment,
// blank lines ignored. Used for scene descriptions, solver configs and
// result files. Values are free text; numeric interpretation happens at
// lookup time so error messages can name the offending line.

#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vicet/errors.hpp"

namespace vicet {

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse_stream(std::istream& in, const std::string& name) {
    KeyValueFile kv;
    kv.name_ = name;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string text = detail::trim(raw);
      if (text.empty()) continue;
      const size_t eq = text.find('=');
      if (eq == std::string::npos)
        throw IoError(name + ":" + std::to_string(line) +
                      ": expected 'key = value'");
      Entry e;
      e.key = detail::trim(text.substr(0, eq));
      e.value = detail::trim(text.substr(eq + 1));
      e.line = line;
      if (e.key.empty())
        throw IoError(name + ":" + std::to_string(line) + ": empty key");
      kv.entries_.push_back(std::move(e));
    }
    return kv;
  }

  static KeyValueFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    return parse_stream(in, path);
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<const Entry*> all(const std::string& key) const {
    std::vector<const Entry*> out;
    for (const Entry& e : entries_)
      if (e.key == key) out.push_back(&e);
    return out;
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  std::string require_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw IoError(name_ + ": missing required key '" + key + "'");
    return e->value;
  }

  double get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_double(*e) : fallback;
  }

  double require_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw IoError(name_ + ": missing required key '" + key + "'");
    return parse_double(*e);
  }

  int get_int(const std::string& key, int fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    const double v = parse_double(*e);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw IoError(where(*e) + ": expected integer for '" + key + "'");
    return i;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "1" || e->value == "true") return true;
    if (e->value == "0" || e->value == "false") return false;
    throw IoError(where(*e) + ": expected boolean (true/false/1/0) for '" +
                  key + "'");
  }

  // Whitespace- and/or comma-separated list of numbers.
  std::vector<double> get_numbers(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return {};
    return parse_numbers(*e);
  }

  std::vector<double> require_numbers(const std::string& key,
                                      size_t count) const {
    const Entry* e = find(key);
    if (!e) throw IoError(name_ + ": missing required key '" + key + "'");
    std::vector<double> v = parse_numbers(*e);
    if (v.size() != count)
      throw IoError(where(*e) + ": '" + key + "' needs " +
                    std::to_string(count) + " numbers, found " +
                    std::to_string(v.size()));
    return v;
  }

  std::vector<double> parse_numbers(const Entry& e) const {
    std::string text = e.value;
    for (char& c : text)
      if (c == ',') c = ' ';
    std::istringstream in(text);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      try {
        size_t used = 0;
        out.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw IoError(where(e) + ": '" + token + "' is not a number");
      }
    }
    return out;
  }

  const std::string& name() const { return name_; }

  std::string where(const Entry& e) const {
    return name_ + ":" + std::to_string(e.line);
  }

 private:
  const Entry* find(const std::string& key) const {
    for (const Entry& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }

  double parse_double(const Entry& e) const {
    try {
      size_t used = 0;
      const double v = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw IoError(where(e) + ": '" + e.value + "' is not a number");
    }
  }

  std::string name_ = "<stream>";
  std::vector<Entry> entries_;
};

}  // namespace vicet
