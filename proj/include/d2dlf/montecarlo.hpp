#pragma once

#include <cstdint>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"
#include "d2dlf/metrics.hpp"
#include "d2dlf/noisy.hpp"

namespace d2dlf {
namespace montecarlo {

struct McConfig {
  std::uint64_t n_samples = 1000000;
  std::size_t n_batches = 100;  // batch-means standard errors
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double confidence_multiplier = 3.0;

  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_samples = 0;

  // |value - other| within k combined standard errors
  bool agrees_with(double other, double k = 3.0) const;
};

struct McMetricsReport {
  McEstimate avg_power_c;
  McEstimate avg_power_d;
  McEstimate avg_secrecy_rate_c;
  McEstimate avg_rate_d;
  McEstimate outage_codebook;
};

// Brute-force protocol simulation: per sample, draw the six gains, find
// the true feedback indices, optionally push them through the BSC, apply
// the decoded codewords and score the reliability/secrecy events
// directly. No closed-form expression from the metrics module is used.
McMetricsReport simulate_metrics(const Codebook& cb, const ChannelStats& stats,
                                 const noisy::FeedbackNoise* noise,
                                 const McConfig& mc);

// Empirical conditional CDF of the effective cellular gain on a grid,
// via rejection sampling of the conditioning region.
std::vector<McEstimate> simulate_conditional_cdf(
    const metrics::EffectiveGainSpec& spec, const std::vector<double>& x_grid,
    const McConfig& mc);

}  // namespace montecarlo
}  // namespace d2dlf
