#include "d2dlf/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace d2dlf {
namespace pso {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void PsoConfig::validate() const {
  if (n_pop < 2) throw std::domain_error("PsoConfig: n_pop must be >= 2");
  if (max_it < 1) throw std::domain_error("PsoConfig: max_it must be >= 1");
  if (!(w >= 0.0 && w < 1.0))
    throw std::domain_error("PsoConfig: inertia w must be in [0,1)");
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::domain_error("PsoConfig: acceleration coefficients must be > 0");
  if (!(v_frac > 0.0 && v_frac <= 1.0))
    throw std::domain_error("PsoConfig: v_frac must be in (0,1]");
  if (lambda_rate < 0.0 || lambda_outage < 0.0 || lambda_pc < 0.0 || lambda_pd < 0.0)
    throw std::domain_error("PsoConfig: penalty weights must be >= 0");
  if (!(constraint_margin >= 0.0 && constraint_margin < 0.5))
    throw std::domain_error("PsoConfig: constraint_margin must be in [0,0.5)");
  if (!(r_s_guard > 0.0)) throw std::domain_error("PsoConfig: r_s_guard must be > 0");
  if (workers < 1) throw std::domain_error("PsoConfig: workers must be >= 1");
}

Box design_box(std::size_t M, std::size_t N, const ChannelStats& stats,
               const Constraints& constraints, double r_s_guard) {
  if (M < 2 || N < 2) throw std::domain_error("design_box: need M >= 2 and N >= 2");
  stats.validate();
  constraints.validate();
  Box box;
  // boundaries live below the 0.999 quantile of the quantized gain
  const double bc_hi = -stats.mean_bc * std::log(1e-3);
  const double dd_hi = -stats.mean_dd * std::log(1e-3);
  const double b_lo = 1e-6;
  for (std::size_t m = 1; m < M; ++m) {
    box.lo.push_back(b_lo);
    box.hi.push_back(bc_hi);
  }
  for (std::size_t n = 1; n < N; ++n) {
    box.lo.push_back(b_lo);
    box.hi.push_back(dd_hi);
  }
  // per-region powers may exceed the *average* power budget
  for (std::size_t m = 1; m < M; ++m) {
    box.lo.push_back(0.0);
    box.hi.push_back(constraints.p_c_max * static_cast<double>(M));
  }
  for (std::size_t n = 1; n < N; ++n) {
    box.lo.push_back(0.0);
    box.hi.push_back(constraints.p_d_max * static_cast<double>(N));
  }
  for (std::size_t m = 1; m < M; ++m) {
    box.lo.push_back(0.0);
    box.hi.push_back(r_s_guard);
  }
  return box;
}

std::vector<double> encode(const Codebook& cb) {
  std::vector<double> x;
  x.insert(x.end(), cb.bc_boundaries.begin(), cb.bc_boundaries.end());
  x.insert(x.end(), cb.dd_boundaries.begin(), cb.dd_boundaries.end());
  for (const auto& w : cb.bc_words) x.push_back(w.p_bc);
  for (const auto& w : cb.dd_words) x.push_back(w.p_dd);
  for (const auto& w : cb.bc_words) x.push_back(w.r_s_bc);
  return x;
}

Codebook decode(const std::vector<double>& position, std::size_t M, std::size_t N) {
  const std::size_t mb = M - 1, nb = N - 1;
  if (position.size() != 2 * mb + 2 * nb + mb)
    throw std::domain_error("decode: position length does not match (M,N)");
  auto at = [&](std::size_t i) { return position[i]; };

  auto repair_boundaries = [](std::vector<double> b) {
    std::sort(b.begin(), b.end());
    double prev = 0.0;
    for (double& v : b) {
      const double floor = prev > 0.0 ? prev * (1.0 + 1e-12) + 1e-12 : 1e-9;
      v = std::max(v, floor);
      prev = v;
    }
    return b;
  };

  Codebook cb;
  std::size_t k = 0;
  std::vector<double> bc(mb), dd(nb);
  for (auto& v : bc) v = at(k++);
  for (auto& v : dd) v = at(k++);
  cb.bc_boundaries = repair_boundaries(bc);
  cb.dd_boundaries = repair_boundaries(dd);
  cb.bc_words.resize(mb);
  cb.dd_words.resize(nb);
  for (auto& w : cb.bc_words) w.p_bc = std::max(0.0, at(k++));
  for (auto& w : cb.dd_words) w.p_dd = std::max(0.0, at(k++));
  for (std::size_t m = 1; m <= mb; ++m) {
    // secrecy rate cannot exceed the region's transmission rate
    const double rs = std::max(0.0, at(k++));
    cb.bc_words[m - 1].r_s_bc = std::min(rs, cb.r_bc(m));
  }
  return cb;
}

double fitness(const std::vector<double>& position, const FitnessContext& ctx,
               const PsoConfig& cfg) {
  try {
    const Codebook cb = decode(position, ctx.M, ctx.N);
    double rate_d, rate_s, outage, pc, pd;
    if (ctx.backend == MetricBackend::noisy) {
      rate_d = noisy::avg_rate_d_noisy(cb, ctx.stats, ctx.noise);
      rate_s = noisy::avg_secrecy_rate_c_noisy(cb, ctx.stats, ctx.noise);
      outage = noisy::outage_codebook_noisy(cb, ctx.stats, ctx.noise);
      pc = noisy::avg_power_c_noisy(cb, ctx.stats, ctx.noise);
      pd = noisy::avg_power_d_noisy(cb, ctx.stats, ctx.noise);
    } else {
      rate_d = metrics::avg_rate_d(cb, ctx.stats);
      rate_s = metrics::avg_secrecy_rate_c(cb, ctx.stats);
      outage = metrics::outage_codebook(cb, ctx.stats);
      pc = metrics::avg_power_c(cb, ctx.stats);
      pd = metrics::avg_power_d(cb, ctx.stats);
    }
    // exterior quadratic penalty; the margin shifts the optimum strictly
    // inside the feasible set (a bare quadratic flattens at the boundary)
    auto pen = [](double v) { return v > 0.0 ? v * v : 0.0; };
    const Constraints& c = ctx.constraints;
    const double eps = cfg.constraint_margin;
    double cost = rate_d;
    cost -= cfg.lambda_rate * pen(c.r_s_c_min * (1.0 + eps) - rate_s);
    cost -= cfg.lambda_outage * pen(outage - c.outage_max * (1.0 - eps));
    cost -= cfg.lambda_pc * pen(pc - c.p_c_max * (1.0 - eps));
    cost -= cfg.lambda_pd * pen(pd - c.p_d_max * (1.0 - eps));
    if (!std::isfinite(cost)) return kNegInf;
    return cost;
  } catch (const std::exception&) {
    return kNegInf;
  }
}

namespace {

// evaluate all particles; pure function of positions, so splitting across
// workers cannot change the results
void evaluate_swarm(const std::vector<Particle>& particles,
                    std::vector<double>& costs, const FitnessContext& ctx,
                    const PsoConfig& cfg) {
  costs.resize(particles.size());
  if (cfg.workers <= 1) {
    for (std::size_t i = 0; i < particles.size(); ++i)
      costs[i] = fitness(particles[i].position, ctx, cfg);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < cfg.workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < particles.size(); i += cfg.workers)
        costs[i] = fitness(particles[i].position, ctx, cfg);
    });
  for (auto& t : pool) t.join();
}

void reflect(double& x, double& v, double lo, double hi) {
  for (int guard = 0; guard < 64 && (x < lo || x > hi); ++guard) {
    if (x < lo) {
      x = 2.0 * lo - x;
      v = -v;
    } else if (x > hi) {
      x = 2.0 * hi - x;
      v = -v;
    }
  }
  x = std::clamp(x, lo, hi);
}

}  // namespace

namespace {

// Deterministic coordinate pattern search around the incumbent best; a
// cheap memetic refinement the swarm's collapsed dynamics cannot do.
void polish(std::vector<double>& x, double& cost, const Box& box,
            const FitnessContext& ctx, const PsoConfig& cfg) {
  const std::size_t dim = box.dim();
  std::size_t evals = 0;
  const std::size_t budget = 400 * dim;
  // step-size cycles: decay to convergence, then restart coarse; stop
  // when a whole cycle no longer pays
  for (int cycle = 0; cycle < 12 && evals < budget; ++cycle) {
    const double at_cycle_start = cost;
    double frac = 0.05;
    while (frac > 1e-6 && evals < budget) {
      bool improved = false;
      for (std::size_t j = 0; j < dim && evals < budget; ++j) {
        const double step = frac * (box.hi[j] - box.lo[j]);
        for (const double dir : {+1.0, -1.0}) {
          std::vector<double> y = x;
          y[j] = std::clamp(y[j] + dir * step, box.lo[j], box.hi[j]);
          if (y[j] == x[j]) continue;
          const double c = fitness(y, ctx, cfg);
          ++evals;
          if (c > cost) {
            x = std::move(y);
            cost = c;
            improved = true;
            break;
          }
        }
      }
      if (!improved) frac *= 0.5;
    }
    if (!(cost > at_cycle_start + 1e-9)) break;
  }
}

}  // namespace

// Boundary blocks are order-degenerate (decode sorts them); keeping the
// particle coordinates sorted makes attractors and positions comparable.
// The velocity is permuted alongside so each coordinate keeps its momentum.
void canonicalize_block(std::vector<double>& x, std::vector<double>* v,
                        std::size_t begin, std::size_t len) {
  std::vector<std::size_t> idx(len);
  for (std::size_t i = 0; i < len; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[begin + a] < x[begin + b]; });
  std::vector<double> xs(len), vs(len);
  for (std::size_t i = 0; i < len; ++i) {
    xs[i] = x[begin + idx[i]];
    if (v) vs[i] = (*v)[begin + idx[i]];
  }
  for (std::size_t i = 0; i < len; ++i) {
    x[begin + i] = xs[i];
    if (v) (*v)[begin + i] = vs[i];
  }
}

void canonicalize(std::vector<double>& x, std::vector<double>* v, std::size_t M,
                  std::size_t N) {
  canonicalize_block(x, v, 0, M - 1);
  canonicalize_block(x, v, M - 1, N - 1);
}

void step(SwarmState& state, const Box& box, const FitnessContext& ctx,
          const PsoConfig& cfg, RngStream& rng) {
  const std::size_t dim = box.dim();
  for (auto& p : state.particles) {
    if (cfg.restart_after > 0 && p.stall >= cfg.restart_after) {
      // collapsed onto the attractors without progress: re-seed it
      for (std::size_t j = 0; j < dim; ++j) {
        p.position[j] = box.lo[j] + rng.uniform() * (box.hi[j] - box.lo[j]);
        p.velocity[j] = 0.0;
      }
      p.stall = 0;
      canonicalize(p.position, nullptr, ctx.M, ctx.N);
      continue;
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      double v = cfg.w * p.velocity[j] +
                 cfg.c1 * r1 * (p.pbest[j] - p.position[j]) +
                 cfg.c2 * r2 * (state.gbest[j] - p.position[j]);
      const double vmax = cfg.v_frac * (box.hi[j] - box.lo[j]);
      v = std::clamp(v, -vmax, vmax);
      p.position[j] += v;
      p.velocity[j] = v;
      reflect(p.position[j], p.velocity[j], box.lo[j], box.hi[j]);
    }
    canonicalize(p.position, &p.velocity, ctx.M, ctx.N);
  }
  std::vector<double> costs;
  evaluate_swarm(state.particles, costs, ctx, cfg);
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    Particle& p = state.particles[i];
    if (costs[i] > p.pbest_cost) {
      p.pbest_cost = costs[i];
      p.pbest = p.position;
      p.stall = 0;
    } else {
      ++p.stall;
    }
    if (p.pbest_cost > state.gbest_cost) {
      state.gbest_cost = p.pbest_cost;
      state.gbest = p.pbest;
    }
  }
  ++state.iteration;
  state.trace.push_back(state.gbest_cost);
}

namespace {

// Initialize and run one full swarm. `incumbents`, when given, are
// injected as zero-velocity particles before the first evaluation, so the
// final gbest can never fall below the best of them.
SwarmState run_swarm(const Box& box, const FitnessContext& ctx,
                     const PsoConfig& cfg, std::uint64_t seed,
                     const std::vector<const std::vector<double>*>& incumbents) {
  const ChannelStats& stats = ctx.stats;
  const Constraints& constraints = ctx.constraints;
  const std::size_t M = ctx.M, N = ctx.N;

  RngStream rng = RngStream::derive(seed, 0);
  SwarmState state;
  state.particles.resize(cfg.n_pop);
  for (auto& p : state.particles) {
    p.position.resize(box.dim());
    p.velocity.assign(box.dim(), 0.0);
    for (std::size_t j = 0; j < box.dim(); ++j)
      p.position[j] = box.lo[j] + rng.uniform() * (box.hi[j] - box.lo[j]);
    canonicalize(p.position, nullptr, M, N);
  }

  // Deterministic anchor particles shared by every seed. Two families:
  // equal-mass boundaries with flat powers, and tail-focused boundaries
  // (transmit rarely at high power) which dominate under tight outage
  // budgets. Anchors only have to land in a good basin; the swarm and the
  // polish refine them.
  {
    struct Anchor {
      double tail_c;  // activity mass of the coded cellular regions
      double tail_d;  // activity mass of the coded D2D regions
      double fc, fd, fr;
    };
    const Anchor anchors[] = {
        // symmetric families: equal-mass flat powers and tail-focused
        {1.0, 1.0, 1.0, 1.0, 0.25},
        {1.0, 1.0, 0.5, 2.0, 0.5},
        {0.3, 0.3, 2.0, 3.0, 0.4},
        {0.1, 0.1, 4.0, 8.0, 0.4},
        {0.05, 0.05, 8.0, 16.0, 0.5},
        {0.2, 0.2, 2.0, 5.0, 0.3},
        // asymmetric: sparse moderate-power cellular, high-power tail D2D
        // (the D2D link buys rate with power while the cellular link is
        // mostly silent, so the cross interference stays harmless)
        {0.1, 0.3, 1.0, 7.0, 0.15},
        {0.05, 0.25, 0.5, 8.0, 0.2},
        {0.15, 0.4, 1.0, 5.0, 0.1},
    };
    const std::size_t n_heur =
        std::min(std::size(anchors), static_cast<std::size_t>(cfg.n_pop / 4));
    for (std::size_t h = 0; h < n_heur; ++h) {
      const Anchor& a = anchors[h];
      std::vector<double>& x = state.particles[h].position;
      std::size_t k = 0;
      // coded regions split the top `tail` mass evenly; with tail < 1 the
      // first boundary sits high and region 0 absorbs the rest
      for (std::size_t m = 1; m < M; ++m) {
        const double mass_above =
            a.tail_c * (1.0 - static_cast<double>(m - 1) / static_cast<double>(M - 1));
        x[k++] = -stats.mean_bc * std::log(mass_above);
      }
      for (std::size_t n = 1; n < N; ++n) {
        const double mass_above =
            a.tail_d * (1.0 - static_cast<double>(n - 1) / static_cast<double>(N - 1));
        x[k++] = -stats.mean_dd * std::log(mass_above);
      }
      for (std::size_t m = 1; m < M; ++m) x[k++] = a.fc * constraints.p_c_max;
      for (std::size_t n = 1; n < N; ++n) x[k++] = a.fd * constraints.p_d_max;
      const Codebook tmp = decode(x, M, N);
      for (std::size_t m = 1; m < M; ++m) x[k++] = a.fr * tmp.r_bc(m);
      for (std::size_t j = 0; j < box.dim(); ++j)
        x[j] = std::clamp(x[j], box.lo[j], box.hi[j]);
      canonicalize(x, nullptr, M, N);
    }
  }
  if (cfg.n_pop >= 8) {
    std::size_t slot = cfg.n_pop - 1;
    // overwrite tail particles, never the anchor block at the front
    for (const std::vector<double>* inc : incumbents) {
      if (inc == nullptr || inc->empty() || slot < cfg.n_pop / 2) break;
      state.particles[slot--].position = *inc;
    }
  }
  std::vector<double> costs;
  evaluate_swarm(state.particles, costs, ctx, cfg);

  // polish the best anchor: every seed shares the identical refined
  // incumbent, which pins the cross-seed convergence point
  if (cfg.polish_every > 0 && cfg.n_pop >= 4) {
    std::size_t best = 0;
    const std::size_t n_heur = std::min<std::size_t>(9, cfg.n_pop / 4);
    for (std::size_t h = 1; h < n_heur; ++h)
      if (costs[h] > costs[best]) best = h;
    polish(state.particles[best].position, costs[best], box, ctx, cfg);
  }

  state.gbest_cost = kNegInf;
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    Particle& p = state.particles[i];
    p.pbest = p.position;
    p.pbest_cost = costs[i];
    if (p.pbest_cost > state.gbest_cost) {
      state.gbest_cost = p.pbest_cost;
      state.gbest = p.pbest;
    }
  }
  state.trace.push_back(state.gbest_cost);

  for (std::size_t it = 0; it < cfg.max_it; ++it) {
    step(state, box, ctx, cfg, rng);
    const bool last = it + 1 == cfg.max_it;
    if (cfg.polish_every > 0 && ((it + 1) % cfg.polish_every == 0 || last)) {
      polish(state.gbest, state.gbest_cost, box, ctx, cfg);
      state.trace.back() = state.gbest_cost;
    }
  }
  return state;
}

}  // namespace

std::vector<double> warm_start(const ChannelStats& stats,
                               const Constraints& constraints, std::size_t M,
                               std::size_t N, const PsoConfig& cfg,
                               MetricBackend backend,
                               const noisy::FeedbackNoise& noise) {
  cfg.validate();
  if (cfg.pre_search_iters == 0 || cfg.n_pop < 8) return {};
  const Box box = design_box(M, N, stats, constraints, cfg.r_s_guard);
  FitnessContext ctx{stats, constraints, M, N, backend, noise};
  PsoConfig pre = cfg;
  pre.max_it = cfg.pre_search_iters;
  std::vector<double> best;
  double best_cost = kNegInf;
  const std::size_t stages = std::max<std::size_t>(1, cfg.pre_search_restarts);
  for (std::size_t k = 0; k < stages; ++k) {
    std::vector<const std::vector<double>*> incs;
    if (!best.empty()) incs.push_back(&best);
    const SwarmState s = run_swarm(box, ctx, pre, 0x0D2D5EEDull + k, incs);
    if (s.gbest_cost > best_cost) {
      best_cost = s.gbest_cost;
      best = s.gbest;
    }
  }
  return best;
}

OptimizeResult optimize(const ChannelStats& stats, const Constraints& constraints,
                        std::size_t M, std::size_t N, const PsoConfig& cfg,
                        MetricBackend backend, const noisy::FeedbackNoise& noise,
                        const std::vector<double>* warm,
                        const std::vector<std::vector<double>>* extras) {
  cfg.validate();
  const Box box = design_box(M, N, stats, constraints, cfg.r_s_guard);
  FitnessContext ctx{stats, constraints, M, N, backend, noise};

  // A shared seed-independent incumbent: every seeded run has the same
  // floor, so runs with different seeds converge to the same basin.
  std::vector<double> incumbent;
  std::vector<const std::vector<double>*> incs;
  if (warm != nullptr) {
    if (!warm->empty()) incs.push_back(warm);
  } else {
    incumbent = warm_start(stats, constraints, M, N, cfg, backend, noise);
    if (!incumbent.empty()) incs.push_back(&incumbent);
  }
  if (extras != nullptr)
    for (const std::vector<double>& x : *extras)
      if (!x.empty()) incs.push_back(&x);

  SwarmState state = run_swarm(box, ctx, cfg, cfg.seed, incs);

  OptimizeResult res;
  res.codebook = decode(state.gbest, M, N);
  res.report = backend == MetricBackend::noisy
                   ? noisy::evaluate(res.codebook, stats, noise)
                   : metrics::evaluate(res.codebook, stats);
  res.trace = std::move(state.trace);
  res.gbest_cost = state.gbest_cost;
  const double tol = 1e-9;
  res.feasible = res.report.avg_secrecy_rate_c >= constraints.r_s_c_min - tol &&
                 res.report.outage_codebook <= constraints.outage_max + tol &&
                 res.report.avg_power_c <= constraints.p_c_max + tol &&
                 res.report.avg_power_d <= constraints.p_d_max + tol;
  return res;
}

}  // namespace pso
}  // namespace d2dlf
