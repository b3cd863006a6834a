#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dlf {
namespace config {

// Parse/lookup failure with the offending line (0 when not applicable).
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int l) : std::runtime_error(what), line(l) {}
};

struct Value {
  std::string text;
  int line = 0;
};

using Section = std::map<std::string, Value>;

// Minimal INI: [section] headers, key = value pairs, '#' or ';' comments,
// blank lines ignored. Duplicate keys keep the last occurrence.
struct Ini {
  std::map<std::string, Section> sections;

  bool has(const std::string& section, const std::string& key) const;
  const Value* find(const std::string& section, const std::string& key) const;
};

Ini parse_ini(const std::string& text);
Ini load_ini(const std::string& path);

std::string get_string(const Ini& ini, const std::string& section,
                       const std::string& key, const std::string& fallback);
double get_double(const Ini& ini, const std::string& section,
                  const std::string& key, double fallback);
std::uint64_t get_u64(const Ini& ini, const std::string& section,
                      const std::string& key, std::uint64_t fallback);
bool get_bool(const Ini& ini, const std::string& section,
              const std::string& key, bool fallback);

// Accepts either `key` (linear) or `key_db` (decibel, converted via
// 10^(x/10)); both present is an error.
double get_linear(const Ini& ini, const std::string& section,
                  const std::string& key, double fallback);

// comma-separated list of doubles
std::vector<double> get_double_list(const Ini& ini, const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback);
std::vector<std::uint64_t> get_u64_list(const Ini& ini, const std::string& section,
                                        const std::string& key,
                                        const std::vector<std::uint64_t>& fallback);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace config
}  // namespace d2dlf
