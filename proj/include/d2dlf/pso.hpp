#pragma once

#include <cstdint>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"
#include "d2dlf/metrics.hpp"
#include "d2dlf/noisy.hpp"
#include "d2dlf/rng.hpp"

namespace d2dlf {
namespace pso {

struct PsoConfig {
  std::size_t n_pop = 50;
  std::size_t max_it = 1000;
  double w = 0.729;
  double c1 = 1.496;
  double c2 = 1.496;
  double v_frac = 0.2;  // velocity clamp as a fraction of the box width
  double lambda_rate = 1e6;
  double lambda_outage = 1e6;
  double lambda_pc = 1e6;
  double lambda_pd = 1e6;
  // constraints are tightened by this relative margin inside the penalty,
  // so the optimum lands strictly feasible instead of on the boundary
  double constraint_margin = 3e-3;
  // re-randomize a particle whose pbest stalls this many iterations
  // (keeps the swarm exploring after it collapses onto gbest); 0 disables
  std::size_t restart_after = 40;
  // every this many iterations (and once at the end) the incumbent gbest
  // is refined by a deterministic coordinate pattern search; 0 disables
  std::size_t polish_every = 100;
  // before the seeded run, a seed-independent swarm of this many iterations
  // builds a shared incumbent injected into every seeded swarm, so runs
  // with different seeds converge to the same basin; 0 disables
  std::size_t pre_search_iters = 400;
  // number of chained multi-start stages in that pre-search; each stage
  // re-initializes the swarm but keeps the best position found so far
  std::size_t pre_search_restarts = 8;
  double r_s_guard = 20.0;  // upper search bound on secrecy rates, bits
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const;
};

enum class MetricBackend { error_free, noisy };

// Everything a fitness evaluation needs besides the position itself.
struct FitnessContext {
  ChannelStats stats;
  Constraints constraints;
  std::size_t M = 2;
  std::size_t N = 2;
  MetricBackend backend = MetricBackend::error_free;
  noisy::FeedbackNoise noise;
};

// Axis-aligned search box over the flattened design vector
// [bc boundaries | dd boundaries | bc powers | dd powers | secrecy rates].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
};

Box design_box(std::size_t M, std::size_t N, const ChannelStats& stats,
               const Constraints& constraints, double r_s_guard = 20.0);

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> pbest;
  double pbest_cost = 0.0;
  std::size_t stall = 0;  // iterations since the last pbest improvement
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> gbest;
  double gbest_cost = 0.0;
  std::size_t iteration = 0;
  std::vector<double> trace;  // gbest cost after each iteration
};

std::vector<double> encode(const Codebook& cb);

// Inverse of encode, with repair: boundary blocks are sorted ascending
// (made strictly increasing), secrecy rates clamped to [0, r_bc(m)].
Codebook decode(const std::vector<double>& position, std::size_t M, std::size_t N);

// Objective (15a) with exterior quadratic penalties for (15b)-(15e);
// higher is better. Unevaluable positions score -inf.
double fitness(const std::vector<double>& position, const FitnessContext& ctx,
               const PsoConfig& cfg);

// One synchronous swarm update: velocity/position per particle, then
// re-evaluation and pbest/gbest bookkeeping.
void step(SwarmState& state, const Box& box, const FitnessContext& ctx,
          const PsoConfig& cfg, RngStream& rng);

struct OptimizeResult {
  Codebook codebook;
  metrics::MetricsReport report;
  std::vector<double> trace;
  double gbest_cost = 0.0;
  bool feasible = false;
};

// Seed-independent chained multi-start search producing a shared incumbent
// position (empty when disabled). Depends only on the problem and config,
// never on cfg.seed, so every seeded run can share one warm start.
std::vector<double> warm_start(const ChannelStats& stats,
                               const Constraints& constraints, std::size_t M,
                               std::size_t N, const PsoConfig& cfg,
                               MetricBackend backend = MetricBackend::error_free,
                               const noisy::FeedbackNoise& noise = {});

// Full Table-style loop: random initialization, max_it steps, best
// decoded codebook plus its metrics and the gbest trace. Bitwise
// reproducible for a fixed (seed, config, scenario). `warm`, when
// non-null and non-empty, is injected as a shared incumbent particle;
// when null, optimize computes its own via warm_start. `extras` are
// additional incumbent positions (e.g. the solution of a neighbouring
// sweep point) injected the same way; the final gbest can never fall
// below the best injected position.
OptimizeResult optimize(const ChannelStats& stats, const Constraints& constraints,
                        std::size_t M, std::size_t N, const PsoConfig& cfg,
                        MetricBackend backend = MetricBackend::error_free,
                        const noisy::FeedbackNoise& noise = {},
                        const std::vector<double>* warm = nullptr,
                        const std::vector<std::vector<double>>* extras = nullptr);

}  // namespace pso
}  // namespace d2dlf
