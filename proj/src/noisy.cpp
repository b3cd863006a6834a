#include "d2dlf/noisy.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace d2dlf {
namespace noisy {

using metrics::detail::joint_reliability_bc;
using metrics::detail::joint_reliability_dd;
using metrics::detail::joint_secrecy_success;

void FeedbackNoise::validate() const {
  if (q_c < 0.0 || q_c > 1.0 || q_d < 0.0 || q_d > 1.0)
    throw std::domain_error("FeedbackNoise: crossover probabilities must be in [0,1]");
}

unsigned bits_for(std::size_t count) {
  unsigned b = 0;
  while ((std::size_t{1} << b) < count) ++b;
  return b;
}

unsigned hamming(unsigned a, unsigned b, unsigned bits) {
  if (bits >= 32 || a >= (1u << bits) || b >= (1u << bits))
    throw std::domain_error("hamming: index out of range for bit width");
  return static_cast<unsigned>(std::popcount(a ^ b));
}

std::vector<std::vector<double>> transition_matrix(double q, unsigned bits) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("transition_matrix: q must be in [0,1]");
  const std::size_t n = std::size_t{1} << bits;
  std::vector<std::vector<double>> rho(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const unsigned d = hamming(static_cast<unsigned>(i), static_cast<unsigned>(j), bits);
      rho[i][j] = std::pow(q, d) * std::pow(1.0 - q, bits - d);
    }
  return rho;
}

std::vector<std::vector<double>> index_transition(double q, std::size_t count) {
  const unsigned bits = bits_for(count);
  auto full = transition_matrix(q, bits);
  std::vector<std::vector<double>> rho(count, std::vector<double>(count, 0.0));
  for (std::size_t raw = 0; raw < full.size(); ++raw) {
    const std::size_t received = std::min(raw, count - 1);
    for (std::size_t sent = 0; sent < count; ++sent)
      rho[received][sent] += full[raw][sent];
  }
  return rho;
}

namespace {

// region masses of the true (sent) indices, including region 0
std::vector<double> bc_masses(const Codebook& cb, const ChannelStats& stats) {
  std::vector<double> g(cb.num_bc_regions());
  for (std::size_t m = 0; m < g.size(); ++m)
    g[m] = region_probability(stats.mean_bc, cb.bc_lower(m), cb.bc_upper(m));
  return g;
}

std::vector<double> dd_masses(const Codebook& cb, const ChannelStats& stats) {
  std::vector<double> g(cb.num_dd_regions());
  for (std::size_t n = 0; n < g.size(); ++n)
    g[n] = region_probability(stats.mean_dd, cb.dd_lower(n), cb.dd_upper(n));
  return g;
}

}  // namespace

double avg_power_c_noisy(const Codebook& cb, const ChannelStats& stats,
                         const FeedbackNoise& noise) {
  noise.validate();
  const auto rho = index_transition(noise.q_c, cb.num_bc_regions());
  const auto g = bc_masses(cb, stats);
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m)
    for (std::size_t mp = 0; mp < cb.num_bc_regions(); ++mp)
      total += rho[m][mp] * g[mp] * cb.p_bc(m);
  return total;
}

double avg_power_d_noisy(const Codebook& cb, const ChannelStats& stats,
                         const FeedbackNoise& noise) {
  noise.validate();
  const auto rho = index_transition(noise.q_d, cb.num_dd_regions());
  const auto g = dd_masses(cb, stats);
  double total = 0.0;
  for (std::size_t n = 1; n < cb.num_dd_regions(); ++n)
    for (std::size_t np = 0; np < cb.num_dd_regions(); ++np)
      total += rho[n][np] * g[np] * cb.p_dd(n);
  return total;
}

double avg_secrecy_rate_c_noisy(const Codebook& cb, const ChannelStats& stats,
                                const FeedbackNoise& noise) {
  noise.validate();
  const auto rho = index_transition(noise.q_c, cb.num_bc_regions());
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
    const double rs = cb.r_s_bc(m);
    if (rs <= 0.0) continue;
    for (std::size_t mp = 0; mp < cb.num_bc_regions(); ++mp) {
      // reliability with codeword m requires the true gain above region
      // m's lower boundary, which clips the true region from below
      const double lo = std::max(cb.bc_lower(mp), cb.bc_lower(m));
      const double hi = cb.bc_upper(mp);
      if (!(lo < hi)) continue;
      total += rs * rho[m][mp] *
               joint_secrecy_success(stats, lo, hi, cb.p_bc(m), rs);
    }
  }
  return total;
}

double avg_rate_d_noisy(const Codebook& cb, const ChannelStats& stats,
                        const FeedbackNoise& noise) {
  noise.validate();
  const auto rho_c = index_transition(noise.q_c, cb.num_bc_regions());
  const auto rho_d = index_transition(noise.q_d, cb.num_dd_regions());
  const auto gc = bc_masses(cb, stats);
  double total = 0.0;
  for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
    double wc = 0.0;  // probability that the BS decodes index m
    for (std::size_t mp = 0; mp < cb.num_bc_regions(); ++mp) wc += rho_c[m][mp] * gc[mp];
    if (wc == 0.0) continue;
    for (std::size_t n = 1; n < cb.num_dd_regions(); ++n) {
      const double r = cb.r_dd(n);
      if (r <= 0.0) continue;
      for (std::size_t np = 0; np < cb.num_dd_regions(); ++np) {
        const double jrel =
            joint_reliability_dd(stats, cb.dd_lower(np), cb.dd_upper(np),
                                 cb.dd_lower(n), cb.p_bc(m));
        total += wc * r * rho_d[n][np] * jrel;
      }
    }
  }
  return total;
}

double outage_codebook_noisy(const Codebook& cb, const ChannelStats& stats,
                             const FeedbackNoise& noise) {
  noise.validate();
  const auto rho_c = index_transition(noise.q_c, cb.num_bc_regions());
  const auto rho_d = index_transition(noise.q_d, cb.num_dd_regions());
  const auto gc = bc_masses(cb, stats);
  const auto gd = dd_masses(cb, stats);
  double total = 0.0;
  for (std::size_t n = 1; n < cb.num_dd_regions(); ++n) {
    double wd = 0.0;  // probability that the D2D pair decodes index n
    for (std::size_t np = 0; np < cb.num_dd_regions(); ++np) wd += rho_d[n][np] * gd[np];
    if (wd == 0.0) continue;
    const double p_dd = cb.p_dd(n);
    for (std::size_t m = 1; m < cb.num_bc_regions(); ++m) {
      // secrecy holds when log2(1 + eff_be * p_bc) stays below r_e
      const double p_bc = cb.p_bc(m);
      const double eve =
          p_bc > 0.0
              ? metrics::cdf_eff_be(stats.mean_be, stats.mean_de, p_dd,
                                    (std::exp2(cb.r_e(m)) - 1.0) / p_bc)
              : 1.0;
      for (std::size_t mp = 0; mp < cb.num_bc_regions(); ++mp) {
        if (rho_c[m][mp] == 0.0) continue;
        const double jrel = joint_reliability_bc(stats, cb.bc_lower(mp),
                                                 cb.bc_upper(mp), cb.bc_lower(m), p_dd);
        total += rho_c[m][mp] * wd * (gc[mp] - jrel * eve);
      }
    }
  }
  return total;
}

metrics::MetricsReport evaluate(const Codebook& cb, const ChannelStats& stats,
                                const FeedbackNoise& noise) {
  stats.validate();
  metrics::MetricsReport rep;
  rep.q_c = noise.q_c;
  rep.q_d = noise.q_d;
  rep.avg_power_c = avg_power_c_noisy(cb, stats, noise);
  rep.avg_power_d = avg_power_d_noisy(cb, stats, noise);
  rep.avg_secrecy_rate_c = avg_secrecy_rate_c_noisy(cb, stats, noise);
  rep.avg_rate_d = avg_rate_d_noisy(cb, stats, noise);
  rep.outage_codebook = outage_codebook_noisy(cb, stats, noise);
  return rep;
}

}  // namespace noisy
}  // namespace d2dlf
