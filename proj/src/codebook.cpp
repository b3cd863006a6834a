#include "d2dlf/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace d2dlf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Codebook::bc_upper(std::size_t m) const {
  return m + 1 < num_bc_regions() ? bc_boundaries[m] : kInf;
}

double Codebook::dd_upper(std::size_t n) const {
  return n + 1 < num_dd_regions() ? dd_boundaries[n] : kInf;
}

double Codebook::r_bc(std::size_t m) const {
  if (m == 0) return 0.0;
  return std::log2(1.0 + bc_boundaries[m - 1] * bc_words[m - 1].p_bc);
}

double Codebook::r_dd(std::size_t n) const {
  if (n == 0) return 0.0;
  return std::log2(1.0 + dd_boundaries[n - 1] * dd_words[n - 1].p_dd);
}

void Constraints::validate() const {
  if (outage_max < 0.0 || outage_max > 1.0)
    throw std::domain_error("Constraints: outage_max must be in [0,1]");
  if (r_s_c_min < 0.0 || p_c_max < 0.0 || p_d_max < 0.0)
    throw std::domain_error("Constraints: rates and powers must be >= 0");
}

std::size_t region_index(const std::vector<double>& boundaries, double h) {
  if (std::isnan(h)) throw std::domain_error("region_index: NaN gain");
  // [boundary(m), boundary(m+1)) is left-closed
  return static_cast<std::size_t>(
      std::upper_bound(boundaries.begin(), boundaries.end(), h) - boundaries.begin());
}

double region_probability(double mean, double lo, double hi) {
  if (!(mean > 0.0)) throw std::domain_error("region_probability: mean must be > 0");
  if (!(lo >= 0.0) || !(lo < hi)) throw std::domain_error("region_probability: need 0 <= lo < hi");
  const double upper = std::isinf(hi) ? 0.0 : std::exp(-hi / mean);
  return std::exp(-lo / mean) - upper;
}

std::vector<Violation> validate(const Codebook& cb, double max_rate_guard) {
  std::vector<Violation> out;
  auto check_boundaries = [&out](const std::vector<double>& b, const char* link) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!(b[i] > 0.0) || !std::isfinite(b[i]))
        out.push_back({std::string(link) + " boundary not positive finite", static_cast<int>(i)});
      if (i > 0 && !(b[i] > b[i - 1]))
        out.push_back({std::string(link) + " non-increasing boundary", static_cast<int>(i)});
    }
  };
  check_boundaries(cb.bc_boundaries, "bc");
  check_boundaries(cb.dd_boundaries, "dd");
  if (cb.bc_words.size() != cb.bc_boundaries.size())
    out.push_back({"bc word count != M-1", -1});
  if (cb.dd_words.size() != cb.dd_boundaries.size())
    out.push_back({"dd word count != N-1", -1});
  for (std::size_t i = 0; i < cb.bc_words.size(); ++i) {
    const auto& w = cb.bc_words[i];
    if (!(w.p_bc >= 0.0)) out.push_back({"negative cellular power", static_cast<int>(i + 1)});
    if (!(w.r_s_bc >= 0.0)) out.push_back({"negative secrecy rate", static_cast<int>(i + 1)});
    if (i < cb.bc_boundaries.size() && w.p_bc >= 0.0) {
      const double r = std::log2(1.0 + cb.bc_boundaries[i] * w.p_bc);
      if (w.r_s_bc > r)
        out.push_back({"negative equivocation rate", static_cast<int>(i + 1)});
      if (r > max_rate_guard)
        out.push_back({"transmission rate exceeds guard", static_cast<int>(i + 1)});
    }
  }
  for (std::size_t i = 0; i < cb.dd_words.size(); ++i) {
    if (!(cb.dd_words[i].p_dd >= 0.0))
      out.push_back({"negative d2d power", static_cast<int>(i + 1)});
  }
  return out;
}

std::string serialize(const Codebook& cb) {
  nlohmann::json j;
  j["bc_boundaries"] = cb.bc_boundaries;
  j["dd_boundaries"] = cb.dd_boundaries;
  auto& bw = j["bc_words"] = nlohmann::json::array();
  for (const auto& w : cb.bc_words) bw.push_back({{"p", w.p_bc}, {"rs", w.r_s_bc}});
  auto& dw = j["dd_words"] = nlohmann::json::array();
  for (const auto& w : cb.dd_words) dw.push_back({{"p", w.p_dd}});
  return j.dump(2);
}

Codebook deserialize(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Codebook cb;
  cb.bc_boundaries = j.at("bc_boundaries").get<std::vector<double>>();
  cb.dd_boundaries = j.at("dd_boundaries").get<std::vector<double>>();
  for (const auto& w : j.at("bc_words"))
    cb.bc_words.push_back({w.at("p").get<double>(), w.at("rs").get<double>()});
  for (const auto& w : j.at("dd_words"))
    cb.dd_words.push_back({w.at("p").get<double>()});
  return cb;
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open codebook file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write codebook file: " + path);
  out << serialize(cb) << "\n";
}

}  // namespace d2dlf
