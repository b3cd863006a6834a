#include "d2dlf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace d2dlf {
namespace config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const Value& v, const std::string& where) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v.text, &pos);
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number: '" + v.text + "'", v.line);
  }
  if (pos != v.text.size())
    throw ParseError(where + ": trailing characters in '" + v.text + "'", v.line);
  return out;
}

std::uint64_t parse_u64(const Value& v, const std::string& where) {
  // std::stoull silently wraps negative inputs
  if (v.text.find('-') != std::string::npos)
    throw ParseError(where + ": not an unsigned integer: '" + v.text + "'", v.line);
  std::size_t pos = 0;
  unsigned long long out;
  try {
    out = std::stoull(v.text, &pos);
  } catch (const std::exception&) {
    throw ParseError(where + ": not an unsigned integer: '" + v.text + "'", v.line);
  }
  if (pos != v.text.size())
    throw ParseError(where + ": trailing characters in '" + v.text + "'", v.line);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

bool Ini::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const Value* Ini::find(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

Ini parse_ini(const std::string& text) {
  Ini ini;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const std::size_t cpos = line.find_first_of("#;");
    if (cpos != std::string::npos) line = line.substr(0, cpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("unterminated section header: '" + raw + "'", lineno);
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ParseError("empty section name", lineno);
      ini.sections[current];  // register even if empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value': '" + raw + "'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key: '" + raw + "'", lineno);
    if (current.empty())
      throw ParseError("key before any [section]: '" + raw + "'", lineno);
    ini.sections[current][key] = Value{val, lineno};
  }
  return ini;
}

Ini load_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ini(buf.str());
}

std::string get_string(const Ini& ini, const std::string& section,
                       const std::string& key, const std::string& fallback) {
  const Value* v = ini.find(section, key);
  return v ? v->text : fallback;
}

double get_double(const Ini& ini, const std::string& section,
                  const std::string& key, double fallback) {
  const Value* v = ini.find(section, key);
  return v ? parse_double(*v, section + "." + key) : fallback;
}

std::uint64_t get_u64(const Ini& ini, const std::string& section,
                      const std::string& key, std::uint64_t fallback) {
  const Value* v = ini.find(section, key);
  return v ? parse_u64(*v, section + "." + key) : fallback;
}

bool get_bool(const Ini& ini, const std::string& section,
              const std::string& key, bool fallback) {
  const Value* v = ini.find(section, key);
  if (!v) return fallback;
  std::string t = v->text;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ParseError(section + "." + key + ": not a boolean: '" + v->text + "'",
                   v->line);
}

double get_linear(const Ini& ini, const std::string& section,
                  const std::string& key, double fallback) {
  const Value* lin = ini.find(section, key);
  const Value* db = ini.find(section, key + "_db");
  if (lin && db)
    throw ParseError(section + ": both '" + key + "' and '" + key +
                         "_db' given",
                     db->line);
  if (lin) return parse_double(*lin, section + "." + key);
  if (db) return db_to_linear(parse_double(*db, section + "." + key + "_db"));
  return fallback;
}

std::vector<double> get_double_list(const Ini& ini, const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback) {
  const Value* v = ini.find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_commas(v->text))
    out.push_back(parse_double(Value{item, v->line}, section + "." + key));
  return out;
}

std::vector<std::uint64_t> get_u64_list(const Ini& ini, const std::string& section,
                                        const std::string& key,
                                        const std::vector<std::uint64_t>& fallback) {
  const Value* v = ini.find(section, key);
  if (!v) return fallback;
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_commas(v->text))
    out.push_back(parse_u64(Value{item, v->line}, section + "." + key));
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace config
}  // namespace d2dlf
