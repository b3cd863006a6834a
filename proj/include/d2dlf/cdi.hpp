#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"
#include "d2dlf/rng.hpp"

namespace d2dlf {
namespace cdi {

// Fractional mean error of the parametric imperfect-CDI model.
struct ParametricError {
  double delta = 0.0;  // in [0,1)
};

// (1 - delta) * mean; throws for delta outside [0,1).
double perturb_mean(double mean, double delta);
ChannelStats perturb_stats(const ChannelStats& stats, double delta);

// Robust loss for the RKDE weight iteration. Hampel knots are placed at
// quantiles of the kernel-space distances; identity reduces RKDE to KDE.
struct LossSpec {
  enum class Type { hampel, identity };
  Type type = Type::hampel;
  double q_a = 0.50;
  double q_b = 0.85;
  double q_c = 0.95;
};

// Weighted Gaussian kernel mixture over the training samples.
struct KernelDensity {
  std::vector<double> centers;
  double bandwidth = 1.0;
  std::vector<double> weights;  // nonnegative, sum to 1
  bool converged = true;

  // mixture density on the real line
  double pdf(double x) const;
  // density truncated to [0, inf) and renormalized (gains are nonnegative)
  double truncated_pdf(double x) const;
  double truncation_mass() const;  // mass of the raw mixture on [0, inf)
  // draw from the truncated density
  double sample_truncated(RngStream& rng) const;
};

// median over i of the distance of sample i to its nearest neighbor
double bandwidth_median_nn(const std::vector<double>& samples);

// uniform-weight kernel density estimate
KernelDensity kde_fit(const std::vector<double>& samples, double bandwidth);

// robust KDE: sample weights fitted by iteratively reweighted least
// squares in the kernel-induced feature space
KernelDensity rkde_fit(const std::vector<double>& samples, double bandwidth,
                       const LossSpec& loss = {}, unsigned max_iters = 100,
                       double tol = 1e-6);

// L nominal exponential draws plus kappa outliers uniform on
// [0, outlier_scale * mean]
std::vector<double> generate_samples(double mean, std::size_t n_nominal,
                                     std::size_t n_outliers, RngStream& rng,
                                     double outlier_scale = 10.0);

// one-column numeric text file
std::vector<double> load_samples(const std::string& path);

// Estimated densities for the three links entering the D2D average rate.
struct FittedCdi {
  KernelDensity h_bc;
  KernelDensity h_dd;
  KernelDensity h_bd;
};

// Average D2D rate with gains drawn from the fitted densities (the
// closed forms assume exponential marginals, so this is Monte Carlo).
double mc_avg_rate_d_under(const Codebook& cb, const FittedCdi& est,
                           std::uint64_t n_samples, std::uint64_t seed);

// |r_true - r_est| / r_true; throws when the true rate is zero.
double rate_gap(const Codebook& cb, const ChannelStats& true_stats,
                const ChannelStats& estimated_stats);
double rate_gap(const Codebook& cb, const ChannelStats& true_stats,
                const FittedCdi& est, std::uint64_t n_samples,
                std::uint64_t seed);

}  // namespace cdi
}  // namespace d2dlf
