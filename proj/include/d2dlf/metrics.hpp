#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"

namespace d2dlf {
namespace metrics {

// Distribution of an effective gain direct/(1 + interferer*power),
// conditioned on the direct gain lying in [lo, hi).
struct EffectiveGainSpec {
  double direct_mean = 1.0;
  double interferer_mean = 1.0;
  double interferer_power = 0.0;
  double lo = 0.0;
  double hi = 1.0;  // may be +inf

  void validate() const;
};

// All error-free performance quantities of one codebook, with per-region
// breakdowns (cellular breakdowns indexed by coded region m=1..M-1 at
// position m-1, D2D by n likewise).
struct MetricsReport {
  double avg_power_c = 0.0;
  double avg_power_d = 0.0;
  double avg_secrecy_rate_c = 0.0;
  double avg_rate_d = 0.0;
  double outage_codebook = 0.0;
  std::vector<double> power_c_by_region;
  std::vector<double> power_d_by_region;
  std::vector<double> secrecy_rate_by_region;
  std::vector<double> rate_d_by_region;
  std::vector<double> outage_by_region;
  double q_c = 0.0;  // feedback crossover probabilities used (0 = error free)
  double q_d = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

// log2(1 + h*p)
double capacity(double h, double p);

// max(0, log2(1+h_main*p) - log2(1+h_eve*p))
double secrecy_capacity(double h_main, double h_eve, double p);

// Conditional CDF of the effective cellular gain given the direct gain's
// region; the inner interferer integral is the closed-form exponential
// tail, the outer integral adaptive quadrature.
double cdf_eff_bc(const EffectiveGainSpec& spec, double x);

// Marginal CDF of the effective eavesdropper gain,
// 1 - mean_be/(mean_be + mean_de*p_dd*x) * exp(-x/mean_be).
double cdf_eff_be(double mean_be, double mean_de, double p_dd, double x);

// Success probability of the cellular link for coded region m (1..M-1)
// given the D2D pair uses region n's codeword (n=0 means silent D2D).
double success_prob_cell(const Codebook& cb, const ChannelStats& stats,
                         std::size_t m, std::size_t n);

// Region-probability-weighted outage of the whole cellular codebook.
double outage_codebook(const Codebook& cb, const ChannelStats& stats);

double avg_power_c(const Codebook& cb, const ChannelStats& stats);
double avg_power_d(const Codebook& cb, const ChannelStats& stats);

// Average achievable cellular secrecy rate in the absence of D2D.
double avg_secrecy_rate_c(const Codebook& cb, const ChannelStats& stats);

// Average achievable D2D rate in the presence of the cellular link.
double avg_rate_d(const Codebook& cb, const ChannelStats& stats);

MetricsReport evaluate(const Codebook& cb, const ChannelStats& stats);

namespace detail {

// Pr(direct gain in [clip_lo, hi) within region [lo,hi) and
// effective gain >= x), unnormalized by the region mass.
double joint_reliability_bc(const ChannelStats& stats, double lo, double hi,
                            double x, double p_dd);

// Pr(h_bc in [lo, hi), secrecy rate rs achievable against the
// instantaneous eavesdropper channel at power p), per region; the inner
// eavesdropper integral is closed form.
double joint_secrecy_success(const ChannelStats& stats, double lo, double hi,
                             double p, double rs);

// Pr(h_dd in [lo, hi) and effective D2D gain >= dd_boundary) under
// cellular interference power p_c.
double joint_reliability_dd(const ChannelStats& stats, double lo, double hi,
                            double dd_boundary, double p_c);

// finite truncation of a semi-infinite region at the 1-1e-12 quantile
double truncate_upper(double hi, double mean);

}  // namespace detail

}  // namespace metrics
}  // namespace d2dlf
