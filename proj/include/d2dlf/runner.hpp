#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"
#include "d2dlf/config.hpp"
#include "d2dlf/montecarlo.hpp"
#include "d2dlf/noisy.hpp"
#include "d2dlf/pso.hpp"

namespace d2dlf {
namespace runner {

enum class SweepAxis { none, p_d_max, outage_max, r_s_c_min, q, bits, L, kappa, delta };

SweepAxis axis_from_string(const std::string& name);
std::string axis_to_string(SweepAxis axis);

// Imperfect-CDI handling for the rate-gap column.
enum class CdiMode { perfect, parametric, kde, rkde };

CdiMode cdi_mode_from_string(const std::string& name);
std::string cdi_mode_to_string(CdiMode mode);

// Fully resolved experiment description; everything needed to reproduce a
// run bit-for-bit lives here and round-trips through the manifest.
struct ExperimentSpec {
  ChannelStats stats;
  Constraints constraints;
  std::size_t M = 4;
  std::size_t N = 4;
  bool noisy_mode = false;
  noisy::FeedbackNoise noise;
  CdiMode cdi_mode = CdiMode::perfect;
  double cdi_delta = 0.0;
  std::size_t cdi_L = 100;
  std::size_t cdi_kappa = 0;
  double cdi_outlier_scale = 10.0;
  unsigned cdi_irwls_max_iters = 100;
  double cdi_irwls_tol = 1e-6;
  std::uint64_t cdi_mc_samples = 200000;
  pso::PsoConfig pso;
  montecarlo::McConfig mc;
  SweepAxis axis = SweepAxis::none;
  std::vector<double> axis_values;  // empty with axis == none
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = ".";

  void validate() const;
};

// Builds a spec from parsed INI; unknown sections are rejected, missing
// keys fall back to the defaults above. Throws config::ParseError.
ExperimentSpec load_spec(const config::Ini& ini);

// One results.csv row.
struct SweepRow {
  std::string axis;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::size_t M = 0, N = 0;
  double q_c = 0.0, q_d = 0.0;
  metrics::MetricsReport report;
  double gbest_cost = 0.0;
  bool feasible = false;
  double rate_gap = 0.0;  // 0 under perfect CDI
  std::string cdi_mode;
  montecarlo::McMetricsReport mc;

  static std::string csv_header();
  std::string csv_row() const;
};

struct RunResult {
  std::vector<SweepRow> rows;
  std::string results_path;
  std::string manifest_path;
  bool all_feasible = false;
};

// Runs the full experiment: per (axis value, seed) optimize with the PSO,
// verify by Monte Carlo, and emit results.csv, trace_<k>.csv,
// codebook_<k>.json and manifest.ini under spec.out_dir. Rows are ordered
// axis-value-major then seed, independent of the worker count.
RunResult run(const ExperimentSpec& spec, unsigned workers = 1);

// Serialized spec (manifest body, without the [meta] section).
std::string manifest_text(const ExperimentSpec& spec);

// FNV-1a 64-bit over the manifest body, hex-encoded.
std::string content_hash(const std::string& text);

struct VerifyResult {
  metrics::MetricsReport analytic;
  montecarlo::McMetricsReport simulated;
  bool all_agree = false;
  std::string text;  // human-readable side-by-side table
};

// Analytic metrics vs Monte Carlo for one codebook; agreement at
// mc.confidence_multiplier standard errors per metric.
VerifyResult verify(const Codebook& cb, const ExperimentSpec& spec);

}  // namespace runner
}  // namespace d2dlf
