#include "d2dlf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "d2dlf/quadrature.hpp"

namespace d2dlf {
namespace metrics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// quantile 1 - 1e-12 of a unit exponential
const double kTailQuantile = -std::log(1e-12);
}  // namespace

void EffectiveGainSpec::validate() const {
  if (!(direct_mean > 0.0) || !(interferer_mean > 0.0))
    throw std::domain_error("EffectiveGainSpec: means must be > 0");
  if (!(interferer_power >= 0.0))
    throw std::domain_error("EffectiveGainSpec: interferer_power must be >= 0");
  if (!(lo >= 0.0) || !(lo < hi))
    throw std::domain_error("EffectiveGainSpec: need 0 <= lo < hi");
}

double capacity(double h, double p) { return std::log2(1.0 + h * p); }

double secrecy_capacity(double h_main, double h_eve, double p) {
  return std::max(0.0, capacity(h_main, p) - capacity(h_eve, p));
}

namespace detail {

double truncate_upper(double hi, double mean) {
  return std::isinf(hi) ? mean * kTailQuantile : hi;
}

double joint_reliability_bc(const ChannelStats& stats, double lo, double hi,
                            double x, double p_dd) {
  if (x <= 0.0) return region_probability(stats.mean_bc, lo, hi);
  const double a = std::max(lo, x);
  if (a >= hi) return 0.0;
  if (p_dd == 0.0) return region_probability(stats.mean_bc, a, hi);
  const double hb = stats.mean_bc;
  const double dc = stats.mean_dc * p_dd;
  const double b = truncate_upper(hi, hb);
  if (a >= b) return 0.0;
  return quad::integrate(
      [&](double h) {
        return (1.0 - std::exp(-(h / x - 1.0) / dc)) * std::exp(-h / hb) / hb;
      },
      a, b);
}

double joint_secrecy_success(const ChannelStats& stats, double lo, double hi,
                             double p, double rs) {
  if (p == 0.0) return rs > 0.0 ? 0.0 : region_probability(stats.mean_bc, lo, hi);
  const double scale = std::exp2(-rs);
  // the eavesdropper event has positive probability only above h0
  const double h0 = (std::exp2(rs) - 1.0) / p;
  const double a = std::max(lo, h0);
  const double hb = stats.mean_bc;
  const double b = truncate_upper(hi, hb);
  if (a >= b) return 0.0;
  return quad::integrate(
      [&](double h) {
        const double t = (scale * (1.0 + h * p) - 1.0) / p;
        const double inner = t > 0.0 ? 1.0 - std::exp(-t / stats.mean_be) : 0.0;
        return inner * std::exp(-h / hb) / hb;
      },
      a, b);
}

double joint_reliability_dd(const ChannelStats& stats, double lo, double hi,
                            double dd_boundary, double p_c) {
  if (dd_boundary <= 0.0) return region_probability(stats.mean_dd, lo, hi);
  const double a = std::max(lo, dd_boundary);
  if (a >= hi) return 0.0;
  if (p_c == 0.0) return region_probability(stats.mean_dd, a, hi);
  const double hd = stats.mean_dd;
  const double bd = stats.mean_bd * p_c;
  const double b = truncate_upper(hi, hd);
  if (a >= b) return 0.0;
  return quad::integrate(
      [&](double h) {
        return (1.0 - std::exp(-(h / dd_boundary - 1.0) / bd)) *
               std::exp(-h / hd) / hd;
      },
      a, b);
}

}  // namespace detail

double cdf_eff_bc(const EffectiveGainSpec& spec, double x) {
  spec.validate();
  if (x < 0.0) return 0.0;
  const double mass = region_probability(spec.direct_mean, spec.lo, spec.hi);
  if (spec.interferer_power == 0.0) {
    const double xc = std::clamp(x, spec.lo, spec.hi);
    if (xc <= spec.lo) return 0.0;
    return std::clamp(region_probability(spec.direct_mean, spec.lo, xc) / mass, 0.0, 1.0);
  }
  if (x == 0.0) return 0.0;  // the event {effective gain <= 0} is null
  ChannelStats s;
  s.mean_bc = spec.direct_mean;
  s.mean_dc = spec.interferer_mean;
  const double rel =
      detail::joint_reliability_bc(s, spec.lo, spec.hi, x, spec.interferer_power);
  return std::clamp(1.0 - rel / mass, 0.0, 1.0);
}

double cdf_eff_be(double mean_be, double mean_de, double p_dd, double x) {
  if (!(mean_be > 0.0) || !(mean_de > 0.0))
    throw std::domain_error("cdf_eff_be: means must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return 1.0 - mean_be / (mean_be + mean_de * p_dd * x) * std::exp(-x / mean_be);
}

double success_prob_cell(const Codebook& cb, const ChannelStats& stats,
                         std::size_t m, std::size_t n) {
  if (m < 1 || m >= cb.num_bc_regions() || n >= cb.num_dd_regions())
    throw std::domain_error("success_prob_cell: region index out of range");
  const double re = cb.r_e(m);
  if (re < 0.0)
    throw std::domain_error("success_prob_cell: negative equivocation rate");
  const double p_dd = cb.p_dd(n);
  const double lo = cb.bc_lower(m), hi = cb.bc_upper(m);
  const double mass = region_probability(stats.mean_bc, lo, hi);
  const double rel =
      detail::joint_reliability_bc(stats, lo, hi, lo, p_dd) / mass;
  // secrecy holds when the eavesdropper capacity log2(1 + eff_be * p_bc)
  // stays below the equivocation rate
  const double p_bc = cb.p_bc(m);
  const double eve =
      p_bc > 0.0
          ? cdf_eff_be(stats.mean_be, stats.mean_de, p_dd,
                       (std::exp2(re) - 1.0) / p_bc)
          : 1.0;
  return rel * eve;
}

double outage_codebook(const Codebook& cb, const ChannelStats& stats) {
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
    const double gm = region_probability(stats.mean_bc, cb.bc_lower(m), cb.bc_upper(m));
    for (std::size_t n = 1; n < cb.num_dd_regions(); ++n) {
      const double gn = region_probability(stats.mean_dd, cb.dd_lower(n), cb.dd_upper(n));
      total += gm * gn * (1.0 - success_prob_cell(cb, stats, m, n));
    }
  }
  return total;
}

double avg_power_c(const Codebook& cb, const ChannelStats& stats) {
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m)
    total += region_probability(stats.mean_bc, cb.bc_lower(m), cb.bc_upper(m)) * cb.p_bc(m);
  return total;
}

double avg_power_d(const Codebook& cb, const ChannelStats& stats) {
  double total = 0.0;
  for (std::size_t n = 1; n < cb.num_dd_regions(); ++n)
    total += region_probability(stats.mean_dd, cb.dd_lower(n), cb.dd_upper(n)) * cb.p_dd(n);
  return total;
}

double avg_secrecy_rate_c(const Codebook& cb, const ChannelStats& stats) {
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
    const double rs = cb.r_s_bc(m);
    if (rs <= 0.0) continue;
    total += rs * detail::joint_secrecy_success(stats, cb.bc_lower(m), cb.bc_upper(m),
                                                cb.p_bc(m), rs);
  }
  return total;
}

double avg_rate_d(const Codebook& cb, const ChannelStats& stats) {
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
    const double gm = region_probability(stats.mean_bc, cb.bc_lower(m), cb.bc_upper(m));
    for (std::size_t n = 1; n < cb.num_dd_regions(); ++n) {
      const double r = cb.r_dd(n);
      if (r <= 0.0) continue;
      total += gm * r *
               detail::joint_reliability_dd(stats, cb.dd_lower(n), cb.dd_upper(n),
                                            cb.dd_lower(n), cb.p_bc(m));
    }
  }
  return total;
}

MetricsReport evaluate(const Codebook& cb, const ChannelStats& stats) {
  stats.validate();
  MetricsReport rep;
  const std::size_t M = cb.num_bc_regions(), N = cb.num_dd_regions();
  rep.power_c_by_region.assign(M - 1, 0.0);
  rep.power_d_by_region.assign(N - 1, 0.0);
  rep.secrecy_rate_by_region.assign(M - 1, 0.0);
  rep.rate_d_by_region.assign(N - 1, 0.0);
  rep.outage_by_region.assign(M - 1, 0.0);
  for (std::size_t m = 1; m < M; ++m) {
    const double gm = region_probability(stats.mean_bc, cb.bc_lower(m), cb.bc_upper(m));
    rep.power_c_by_region[m - 1] = gm * cb.p_bc(m);
    const double rs = cb.r_s_bc(m);
    if (rs > 0.0)
      rep.secrecy_rate_by_region[m - 1] =
          rs * detail::joint_secrecy_success(stats, cb.bc_lower(m), cb.bc_upper(m),
                                             cb.p_bc(m), rs);
    for (std::size_t n = 1; n < N; ++n) {
      const double gn = region_probability(stats.mean_dd, cb.dd_lower(n), cb.dd_upper(n));
      rep.outage_by_region[m - 1] +=
          gm * gn * (1.0 - success_prob_cell(cb, stats, m, n));
      const double r = cb.r_dd(n);
      if (r > 0.0)
        rep.rate_d_by_region[n - 1] +=
            gm * r *
            detail::joint_reliability_dd(stats, cb.dd_lower(n), cb.dd_upper(n),
                                         cb.dd_lower(n), cb.p_bc(m));
    }
  }
  for (std::size_t n = 1; n < N; ++n)
    rep.power_d_by_region[n - 1] =
        region_probability(stats.mean_dd, cb.dd_lower(n), cb.dd_upper(n)) * cb.p_dd(n);
  for (double v : rep.power_c_by_region) rep.avg_power_c += v;
  for (double v : rep.power_d_by_region) rep.avg_power_d += v;
  for (double v : rep.secrecy_rate_by_region) rep.avg_secrecy_rate_c += v;
  for (double v : rep.rate_d_by_region) rep.avg_rate_d += v;
  for (double v : rep.outage_by_region) rep.outage_codebook += v;
  return rep;
}

std::string MetricsReport::csv_header() {
  return "avg_power_c,avg_power_d,avg_secrecy_rate_c,avg_rate_d,outage_codebook,qc,qd";
}

std::string MetricsReport::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                avg_power_c, avg_power_d, avg_secrecy_rate_c, avg_rate_d,
                outage_codebook, q_c, q_d);
  return buf;
}

}  // namespace metrics
}  // namespace d2dlf
