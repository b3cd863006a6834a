#include "d2dlf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace d2dlf {
namespace montecarlo {

void McConfig::validate() const {
  if (n_samples < 1000) throw std::domain_error("McConfig: n_samples must be >= 1000");
  if (n_batches < 2 || n_batches > n_samples)
    throw std::domain_error("McConfig: need 2 <= n_batches <= n_samples");
  if (workers < 1) throw std::domain_error("McConfig: workers must be >= 1");
}

bool McEstimate::agrees_with(double other, double k) const {
  return std::abs(value - other) <= k * standard_error;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// per-batch accumulator for the five tracked quantities
struct BatchSums {
  double power_c = 0, power_d = 0, secrecy = 0, rate_d = 0, outage = 0;
};

struct Protocol {
  const Codebook& cb;
  unsigned bits_c, bits_d;
  std::size_t M, N;
  // precomputed per coded region: 2^(-rs), eavesdropper gain threshold
  std::vector<double> pow_neg_rs;
  std::vector<double> be_threshold;

  explicit Protocol(const Codebook& c)
      : cb(c),
        bits_c(noisy::bits_for(c.num_bc_regions())),
        bits_d(noisy::bits_for(c.num_dd_regions())),
        M(c.num_bc_regions()),
        N(c.num_dd_regions()) {
    pow_neg_rs.assign(M, 1.0);
    be_threshold.assign(M, kInf);
    for (std::size_t m = 1; m < M; ++m) {
      pow_neg_rs[m] = std::exp2(-cb.r_s_bc(m));
      const double p = cb.p_bc(m);
      be_threshold[m] = p > 0.0 ? (std::exp2(cb.r_e(m)) - 1.0) / p : kInf;
    }
  }

  std::size_t flip(std::size_t index, unsigned bits, double q, std::size_t count,
                   RngStream& rng) const {
    std::size_t received = index;
    for (unsigned k = 0; k < bits; ++k)
      if (rng.uniform() < q) received ^= (std::size_t{1} << k);
    return std::min(received, count - 1);
  }

  void run_sample(const ChannelSample& h, const noisy::FeedbackNoise* noise,
                  RngStream& rng, BatchSums& acc) const {
    const std::size_t m_true = region_index(cb.bc_boundaries, h.h_bc);
    const std::size_t n_true = region_index(cb.dd_boundaries, h.h_dd);
    std::size_t m = m_true, n = n_true;
    if (noise) {
      m = flip(m_true, bits_c, noise->q_c, M, rng);
      n = flip(n_true, bits_d, noise->q_d, N, rng);
    }
    const double p_c = cb.p_bc(m);
    const double p_d = cb.p_dd(n);
    acc.power_c += p_c;
    acc.power_d += p_d;
    if (m >= 1) {
      // cellular secrecy rate, D2D absent: reliable and the secrecy rate
      // is below the instantaneous secrecy capacity
      if (h.h_bc >= cb.bc_lower(m) &&
          1.0 + h.h_be * p_c <= pow_neg_rs[m] * (1.0 + h.h_bc * p_c))
        acc.secrecy += cb.r_s_bc(m);
      if (n >= 1) {
        // cellular outage, D2D present
        const double hat_bc = h.h_bc / (1.0 + h.h_dc * p_d);
        const double hat_be = h.h_be / (1.0 + h.h_de * p_d);
        const bool success =
            hat_bc >= cb.bc_lower(m) && hat_be <= be_threshold[m];
        if (!success) acc.outage += 1.0;
        // D2D rate, cellular present
        const double hat_dd = h.h_dd / (1.0 + h.h_bd * p_c);
        if (hat_dd >= cb.dd_lower(n)) acc.rate_d += cb.r_dd(n);
      }
    }
  }
};

// Runs fn(batch_index) for every batch, split across workers; results are
// reduced in batch order so the totals do not depend on the worker count.
template <class Fn>
void for_each_batch(std::size_t n_batches, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_batches; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < n_batches; b += workers) fn(b);
    });
  for (auto& t : pool) t.join();
}

McEstimate from_batches(const std::vector<double>& batch_means, std::uint64_t n) {
  const std::size_t k = batch_means.size();
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double v : batch_means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(k - 1);
  return {mean, std::sqrt(var / static_cast<double>(k)), n};
}

}  // namespace

McMetricsReport simulate_metrics(const Codebook& cb, const ChannelStats& stats,
                                 const noisy::FeedbackNoise* noise,
                                 const McConfig& mc) {
  mc.validate();
  stats.validate();
  if (noise) noise->validate();
  const Protocol proto(cb);
  const std::size_t B = mc.n_batches;
  const std::uint64_t per_batch = mc.n_samples / B;
  std::vector<BatchSums> sums(B);
  for_each_batch(B, mc.workers, [&](std::size_t b) {
    RngStream rng = RngStream::derive(mc.seed, b);
    BatchSums acc;
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      const ChannelSample h = sample(stats, rng);
      proto.run_sample(h, noise, rng, acc);
    }
    sums[b] = acc;
  });
  const double inv = 1.0 / static_cast<double>(per_batch);
  std::vector<double> pc(B), pd(B), sr(B), rd(B), out(B);
  for (std::size_t b = 0; b < B; ++b) {
    pc[b] = sums[b].power_c * inv;
    pd[b] = sums[b].power_d * inv;
    sr[b] = sums[b].secrecy * inv;
    rd[b] = sums[b].rate_d * inv;
    out[b] = sums[b].outage * inv;
  }
  const std::uint64_t n = per_batch * B;
  McMetricsReport rep;
  rep.avg_power_c = from_batches(pc, n);
  rep.avg_power_d = from_batches(pd, n);
  rep.avg_secrecy_rate_c = from_batches(sr, n);
  rep.avg_rate_d = from_batches(rd, n);
  rep.outage_codebook = from_batches(out, n);
  return rep;
}

std::vector<McEstimate> simulate_conditional_cdf(
    const metrics::EffectiveGainSpec& spec, const std::vector<double>& x_grid,
    const McConfig& mc) {
  mc.validate();
  spec.validate();
  if (region_probability(spec.direct_mean, spec.lo, spec.hi) < 1e-9)
    throw std::domain_error(
        "simulate_conditional_cdf: region mass too small for rejection sampling");
  const std::size_t B = mc.n_batches;
  const std::uint64_t per_batch = mc.n_samples / B;
  std::vector<std::vector<std::uint64_t>> counts(B,
      std::vector<std::uint64_t>(x_grid.size(), 0));
  for_each_batch(B, mc.workers, [&](std::size_t b) {
    RngStream rng = RngStream::derive(mc.seed, b);
    auto& c = counts[b];
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      double direct;
      do {
        direct = rng.exponential(spec.direct_mean);
      } while (direct < spec.lo || direct >= spec.hi);
      const double interferer = rng.exponential(spec.interferer_mean);
      const double eff = direct / (1.0 + interferer * spec.interferer_power);
      for (std::size_t g = 0; g < x_grid.size(); ++g)
        if (eff <= x_grid[g]) ++c[g];
    }
  });
  const std::uint64_t n = per_batch * B;
  std::vector<McEstimate> out(x_grid.size());
  for (std::size_t g = 0; g < x_grid.size(); ++g) {
    std::uint64_t total = 0;
    for (std::size_t b = 0; b < B; ++b) total += counts[b][g];
    const double p = static_cast<double>(total) / static_cast<double>(n);
    out[g] = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
  }
  return out;
}

}  // namespace montecarlo
}  // namespace d2dlf
