#include "d2dlf/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "d2dlf/cdi.hpp"
#include "d2dlf/metrics.hpp"

namespace d2dlf {
namespace runner {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_list(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

SweepAxis axis_from_string(const std::string& name) {
  if (name == "none" || name.empty()) return SweepAxis::none;
  if (name == "p_d_max") return SweepAxis::p_d_max;
  if (name == "outage_max") return SweepAxis::outage_max;
  if (name == "r_s_c_min") return SweepAxis::r_s_c_min;
  if (name == "q") return SweepAxis::q;
  if (name == "bits") return SweepAxis::bits;
  if (name == "L") return SweepAxis::L;
  if (name == "kappa") return SweepAxis::kappa;
  if (name == "delta") return SweepAxis::delta;
  throw config::ParseError("unknown sweep axis: '" + name + "'", 0);
}

std::string axis_to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::p_d_max: return "p_d_max";
    case SweepAxis::outage_max: return "outage_max";
    case SweepAxis::r_s_c_min: return "r_s_c_min";
    case SweepAxis::q: return "q";
    case SweepAxis::bits: return "bits";
    case SweepAxis::L: return "L";
    case SweepAxis::kappa: return "kappa";
    case SweepAxis::delta: return "delta";
  }
  return "none";
}

CdiMode cdi_mode_from_string(const std::string& name) {
  if (name == "perfect") return CdiMode::perfect;
  if (name == "parametric") return CdiMode::parametric;
  if (name == "kde") return CdiMode::kde;
  if (name == "rkde") return CdiMode::rkde;
  throw config::ParseError("unknown cdi mode: '" + name + "'", 0);
}

std::string cdi_mode_to_string(CdiMode mode) {
  switch (mode) {
    case CdiMode::perfect: return "perfect";
    case CdiMode::parametric: return "parametric";
    case CdiMode::kde: return "kde";
    case CdiMode::rkde: return "rkde";
  }
  return "perfect";
}

void ExperimentSpec::validate() const {
  stats.validate();
  constraints.validate();
  if (M < 2 || N < 2) throw std::domain_error("ExperimentSpec: need M,N >= 2");
  noise.validate();
  pso.validate();
  mc.validate();
  if (axis == SweepAxis::none && !axis_values.empty())
    throw std::domain_error("ExperimentSpec: axis values given without an axis");
  if (axis != SweepAxis::none && axis_values.empty())
    throw std::domain_error("ExperimentSpec: sweep axis without values");
  if (seeds.empty()) throw std::domain_error("ExperimentSpec: empty seed list");
}

namespace {

ChannelStats scenario_from_ini(const config::Ini& ini) {
  using config::get_double;
  const std::string placement =
      config::get_string(ini, "scenario", "placement", "means");
  if (placement == "means") {
    ChannelStats s;
    s.mean_bc = config::get_linear(ini, "scenario", "mean_bc", s.mean_bc);
    s.mean_bd = config::get_linear(ini, "scenario", "mean_bd", s.mean_bd);
    s.mean_dd = config::get_linear(ini, "scenario", "mean_dd", s.mean_dd);
    s.mean_dc = config::get_linear(ini, "scenario", "mean_dc", s.mean_dc);
    s.mean_be = config::get_linear(ini, "scenario", "mean_be", s.mean_be);
    s.mean_de = config::get_linear(ini, "scenario", "mean_de", s.mean_de);
    return s;
  }
  if (placement != "disc")
    throw config::ParseError("scenario.placement must be 'means' or 'disc'", 0);
  // BS at the cell center; cellular user, D2D transmitter and eavesdropper
  // uniform in the disc, D2D receiver at a fixed offset from its transmitter
  const double radius = get_double(ini, "scenario", "radius_m", 100.0);
  const double d2d_dist = get_double(ini, "scenario", "d2d_distance_m", 10.0);
  LinkGeometry geo;
  geo.reference_distance = get_double(ini, "scenario", "d0", 1.0);
  geo.pathloss_exponent = get_double(ini, "scenario", "gamma", 4.0);
  geo.shadowing_db_sigma = get_double(ini, "scenario", "shadow_sigma_db", 8.0);
  RngStream rng = RngStream::derive(
      config::get_u64(ini, "scenario", "place_seed", 1), 0);
  auto draw = [&](double& x, double& y) {
    const double r = radius * std::sqrt(rng.uniform());
    const double th = 2.0 * 3.14159265358979323846 * rng.uniform();
    x = r * std::cos(th);
    y = r * std::sin(th);
  };
  double cx, cy, tx, ty, ex, ey;
  draw(cx, cy);
  draw(tx, ty);
  draw(ex, ey);
  const double ang = 2.0 * 3.14159265358979323846 * rng.uniform();
  const double rx = tx + d2d_dist * std::cos(ang);
  const double ry = ty + d2d_dist * std::sin(ang);
  auto dist = [](double ax, double ay, double bx, double by) {
    return std::max(1e-3, std::hypot(ax - bx, ay - by));
  };
  auto mean = [&](double d) {
    LinkGeometry g = geo;
    g.distance = d;
    return mean_from_geometry(g, rng.normal(0.0, geo.shadowing_db_sigma));
  };
  ChannelStats s;
  s.mean_bc = mean(dist(0, 0, cx, cy));
  s.mean_bd = mean(dist(0, 0, rx, ry));
  s.mean_dd = mean(d2d_dist);
  s.mean_dc = mean(dist(tx, ty, cx, cy));
  s.mean_be = mean(dist(0, 0, ex, ey));
  s.mean_de = mean(dist(tx, ty, ex, ey));
  return s;
}

}  // namespace

ExperimentSpec load_spec(const config::Ini& ini) {
  static const char* known[] = {"scenario", "constraints", "codebook_dims",
                                "pso", "mc", "noise", "cdi", "sweep", "meta"};
  for (const auto& [name, _] : ini.sections) {
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) throw config::ParseError("unknown config section: [" + name + "]", 0);
  }

  ExperimentSpec spec;
  spec.stats = scenario_from_ini(ini);

  spec.constraints.r_s_c_min =
      config::get_double(ini, "constraints", "r_s_c_min", spec.constraints.r_s_c_min);
  spec.constraints.outage_max =
      config::get_double(ini, "constraints", "outage_max", spec.constraints.outage_max);
  spec.constraints.p_c_max =
      config::get_linear(ini, "constraints", "p_c_max", spec.constraints.p_c_max);
  spec.constraints.p_d_max =
      config::get_linear(ini, "constraints", "p_d_max", spec.constraints.p_d_max);

  spec.M = static_cast<std::size_t>(config::get_u64(ini, "codebook_dims", "M", spec.M));
  spec.N = static_cast<std::size_t>(config::get_u64(ini, "codebook_dims", "N", spec.N));
  const std::string region0 =
      config::get_string(ini, "codebook_dims", "region0", "silent");
  if (region0 != "silent")
    throw config::ParseError(
        "codebook_dims.region0: only the 'silent' convention is supported", 0);

  spec.pso.n_pop = static_cast<std::size_t>(
      config::get_u64(ini, "pso", "n_pop", spec.pso.n_pop));
  spec.pso.max_it = static_cast<std::size_t>(
      config::get_u64(ini, "pso", "max_it", spec.pso.max_it));
  spec.pso.w = config::get_double(ini, "pso", "w", spec.pso.w);
  spec.pso.c1 = config::get_double(ini, "pso", "c1", spec.pso.c1);
  spec.pso.c2 = config::get_double(ini, "pso", "c2", spec.pso.c2);
  spec.pso.v_frac = config::get_double(ini, "pso", "v_frac", spec.pso.v_frac);
  spec.pso.lambda_rate =
      config::get_double(ini, "pso", "lambda_rate", spec.pso.lambda_rate);
  spec.pso.lambda_outage =
      config::get_double(ini, "pso", "lambda_outage", spec.pso.lambda_outage);
  spec.pso.lambda_pc = config::get_double(ini, "pso", "lambda_pc", spec.pso.lambda_pc);
  spec.pso.lambda_pd = config::get_double(ini, "pso", "lambda_pd", spec.pso.lambda_pd);
  spec.pso.constraint_margin = config::get_double(ini, "pso", "constraint_margin",
                                                  spec.pso.constraint_margin);
  spec.pso.restart_after = static_cast<std::size_t>(
      config::get_u64(ini, "pso", "restart_after", spec.pso.restart_after));
  spec.pso.polish_every = static_cast<std::size_t>(
      config::get_u64(ini, "pso", "polish_every", spec.pso.polish_every));
  spec.pso.pre_search_iters = static_cast<std::size_t>(
      config::get_u64(ini, "pso", "pre_search_iters", spec.pso.pre_search_iters));
  spec.pso.pre_search_restarts = static_cast<std::size_t>(config::get_u64(
      ini, "pso", "pre_search_restarts", spec.pso.pre_search_restarts));
  spec.pso.r_s_guard =
      config::get_double(ini, "pso", "r_s_guard", spec.pso.r_s_guard);
  spec.pso.seed = config::get_u64(ini, "pso", "seed", spec.pso.seed);

  spec.mc.n_samples = config::get_u64(ini, "mc", "n_samples", spec.mc.n_samples);
  spec.mc.n_batches = static_cast<std::size_t>(
      config::get_u64(ini, "mc", "n_batches", spec.mc.n_batches));
  spec.mc.seed = config::get_u64(ini, "mc", "seed", spec.mc.seed);
  spec.mc.confidence_multiplier = config::get_double(
      ini, "mc", "confidence_multiplier", spec.mc.confidence_multiplier);

  spec.noise.q_c = config::get_double(ini, "noise", "q_c", spec.noise.q_c);
  spec.noise.q_d = config::get_double(ini, "noise", "q_d", spec.noise.q_d);
  spec.noisy_mode = config::get_bool(ini, "noise", "enabled",
                                     spec.noise.q_c > 0.0 || spec.noise.q_d > 0.0);

  spec.cdi_mode =
      cdi_mode_from_string(config::get_string(ini, "cdi", "mode", "perfect"));
  spec.cdi_delta = config::get_double(ini, "cdi", "delta", spec.cdi_delta);
  spec.cdi_L = static_cast<std::size_t>(config::get_u64(ini, "cdi", "L", spec.cdi_L));
  spec.cdi_kappa =
      static_cast<std::size_t>(config::get_u64(ini, "cdi", "kappa", spec.cdi_kappa));
  spec.cdi_outlier_scale =
      config::get_double(ini, "cdi", "outlier_scale", spec.cdi_outlier_scale);
  spec.cdi_irwls_max_iters = static_cast<unsigned>(
      config::get_u64(ini, "cdi", "irwls_max_iters", spec.cdi_irwls_max_iters));
  spec.cdi_irwls_tol =
      config::get_double(ini, "cdi", "irwls_tol", spec.cdi_irwls_tol);
  spec.cdi_mc_samples =
      config::get_u64(ini, "cdi", "mc_samples", spec.cdi_mc_samples);

  spec.axis = axis_from_string(config::get_string(ini, "sweep", "axis", "none"));
  spec.axis_values = config::get_double_list(ini, "sweep", "values", {});
  spec.seeds = config::get_u64_list(ini, "sweep", "seeds", spec.seeds);

  spec.validate();
  return spec;
}

std::string manifest_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "mean_bc = " << fmt(spec.stats.mean_bc) << "\n";
  out << "mean_bd = " << fmt(spec.stats.mean_bd) << "\n";
  out << "mean_dd = " << fmt(spec.stats.mean_dd) << "\n";
  out << "mean_dc = " << fmt(spec.stats.mean_dc) << "\n";
  out << "mean_be = " << fmt(spec.stats.mean_be) << "\n";
  out << "mean_de = " << fmt(spec.stats.mean_de) << "\n";
  out << "\n[constraints]\n";
  out << "r_s_c_min = " << fmt(spec.constraints.r_s_c_min) << "\n";
  out << "outage_max = " << fmt(spec.constraints.outage_max) << "\n";
  out << "p_c_max = " << fmt(spec.constraints.p_c_max) << "\n";
  out << "p_d_max = " << fmt(spec.constraints.p_d_max) << "\n";
  out << "\n[codebook_dims]\n";
  out << "M = " << spec.M << "\n";
  out << "N = " << spec.N << "\n";
  out << "region0 = silent\n";
  out << "\n[pso]\n";
  out << "n_pop = " << spec.pso.n_pop << "\n";
  out << "max_it = " << spec.pso.max_it << "\n";
  out << "w = " << fmt(spec.pso.w) << "\n";
  out << "c1 = " << fmt(spec.pso.c1) << "\n";
  out << "c2 = " << fmt(spec.pso.c2) << "\n";
  out << "v_frac = " << fmt(spec.pso.v_frac) << "\n";
  out << "lambda_rate = " << fmt(spec.pso.lambda_rate) << "\n";
  out << "lambda_outage = " << fmt(spec.pso.lambda_outage) << "\n";
  out << "lambda_pc = " << fmt(spec.pso.lambda_pc) << "\n";
  out << "lambda_pd = " << fmt(spec.pso.lambda_pd) << "\n";
  out << "constraint_margin = " << fmt(spec.pso.constraint_margin) << "\n";
  out << "restart_after = " << spec.pso.restart_after << "\n";
  out << "polish_every = " << spec.pso.polish_every << "\n";
  out << "pre_search_iters = " << spec.pso.pre_search_iters << "\n";
  out << "pre_search_restarts = " << spec.pso.pre_search_restarts << "\n";
  out << "r_s_guard = " << fmt(spec.pso.r_s_guard) << "\n";
  out << "seed = " << spec.pso.seed << "\n";
  out << "\n[mc]\n";
  out << "n_samples = " << spec.mc.n_samples << "\n";
  out << "n_batches = " << spec.mc.n_batches << "\n";
  out << "seed = " << spec.mc.seed << "\n";
  out << "confidence_multiplier = " << fmt(spec.mc.confidence_multiplier) << "\n";
  out << "\n[noise]\n";
  out << "enabled = " << (spec.noisy_mode ? "true" : "false") << "\n";
  out << "q_c = " << fmt(spec.noise.q_c) << "\n";
  out << "q_d = " << fmt(spec.noise.q_d) << "\n";
  out << "\n[cdi]\n";
  out << "mode = " << cdi_mode_to_string(spec.cdi_mode) << "\n";
  out << "delta = " << fmt(spec.cdi_delta) << "\n";
  out << "L = " << spec.cdi_L << "\n";
  out << "kappa = " << spec.cdi_kappa << "\n";
  out << "outlier_scale = " << fmt(spec.cdi_outlier_scale) << "\n";
  out << "irwls_max_iters = " << spec.cdi_irwls_max_iters << "\n";
  out << "irwls_tol = " << fmt(spec.cdi_irwls_tol) << "\n";
  out << "mc_samples = " << spec.cdi_mc_samples << "\n";
  out << "\n[sweep]\n";
  out << "axis = " << axis_to_string(spec.axis) << "\n";
  if (!spec.axis_values.empty())
    out << "values = " << fmt_list(spec.axis_values) << "\n";
  out << "seeds = " << fmt_list(spec.seeds) << "\n";
  return out.str();
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string SweepRow::csv_header() {
  return "axis,axis_value,seed,M,N,qc,qd,avg_power_c,avg_power_d,"
         "avg_secrecy_rate_c,avg_rate_d,outage_codebook,gbest_cost,feasible,"
         "rate_gap,cdi_mode,mc_power_c,mc_power_c_se,mc_power_d,mc_power_d_se,"
         "mc_secrecy_rate_c,mc_secrecy_rate_c_se,mc_rate_d,mc_rate_d_se,"
         "mc_outage,mc_outage_se";
}

std::string SweepRow::csv_row() const {
  std::ostringstream out;
  out << axis << ',' << fmt(axis_value) << ',' << seed << ',' << M << ',' << N
      << ',' << fmt(q_c) << ',' << fmt(q_d) << ',' << fmt(report.avg_power_c)
      << ',' << fmt(report.avg_power_d) << ',' << fmt(report.avg_secrecy_rate_c)
      << ',' << fmt(report.avg_rate_d) << ',' << fmt(report.outage_codebook)
      << ',' << fmt(gbest_cost) << ',' << (feasible ? 1 : 0) << ','
      << fmt(rate_gap) << ',' << cdi_mode << ',' << fmt(mc.avg_power_c.value)
      << ',' << fmt(mc.avg_power_c.standard_error) << ','
      << fmt(mc.avg_power_d.value) << ',' << fmt(mc.avg_power_d.standard_error)
      << ',' << fmt(mc.avg_secrecy_rate_c.value) << ','
      << fmt(mc.avg_secrecy_rate_c.standard_error) << ','
      << fmt(mc.avg_rate_d.value) << ',' << fmt(mc.avg_rate_d.standard_error)
      << ',' << fmt(mc.outage_codebook.value) << ','
      << fmt(mc.outage_codebook.standard_error);
  return out.str();
}

namespace {

// A single sweep point: the base spec with one axis value applied.
ExperimentSpec apply_axis(const ExperimentSpec& base, SweepAxis axis, double v) {
  ExperimentSpec s = base;
  switch (axis) {
    case SweepAxis::none:
      break;
    case SweepAxis::p_d_max:
      s.constraints.p_d_max = v;
      break;
    case SweepAxis::outage_max:
      s.constraints.outage_max = v;
      break;
    case SweepAxis::r_s_c_min:
      s.constraints.r_s_c_min = v;
      break;
    case SweepAxis::q:
      s.noisy_mode = true;
      s.noise.q_c = s.noise.q_d = v;
      break;
    case SweepAxis::bits: {
      const auto b = static_cast<unsigned>(v);
      if (b < 1 || b > 8 || static_cast<double>(b) != v)
        throw std::domain_error("bits axis values must be integers in [1,8]");
      s.M = s.N = std::size_t{1} << b;
      break;
    }
    case SweepAxis::L:
      if (s.cdi_mode == CdiMode::perfect || s.cdi_mode == CdiMode::parametric)
        s.cdi_mode = CdiMode::kde;
      s.cdi_L = static_cast<std::size_t>(v);
      break;
    case SweepAxis::kappa:
      if (s.cdi_mode == CdiMode::perfect || s.cdi_mode == CdiMode::parametric)
        s.cdi_mode = CdiMode::kde;
      s.cdi_kappa = static_cast<std::size_t>(v);
      break;
    case SweepAxis::delta:
      s.cdi_mode = CdiMode::parametric;
      s.cdi_delta = v;
      break;
  }
  return s;
}

double point_rate_gap(const ExperimentSpec& s, const Codebook& cb,
                      std::uint64_t seed) {
  try {
    switch (s.cdi_mode) {
      case CdiMode::perfect:
        return 0.0;
      case CdiMode::parametric:
        return cdi::rate_gap(cb, s.stats, cdi::perturb_stats(s.stats, s.cdi_delta));
      case CdiMode::kde:
      case CdiMode::rkde: {
        const cdi::LossSpec loss{s.cdi_mode == CdiMode::rkde
                                     ? cdi::LossSpec::Type::hampel
                                     : cdi::LossSpec::Type::identity};
        auto fit = [&](double mean, std::uint64_t stream) {
          RngStream rng = RngStream::derive(seed, stream);
          const std::vector<double> samples = cdi::generate_samples(
              mean, s.cdi_L, s.cdi_kappa, rng, s.cdi_outlier_scale);
          const double bw = cdi::bandwidth_median_nn(samples);
          return cdi::rkde_fit(samples, bw, loss, s.cdi_irwls_max_iters,
                               s.cdi_irwls_tol);
        };
        cdi::FittedCdi est;
        est.h_bc = fit(s.stats.mean_bc, 101);
        est.h_dd = fit(s.stats.mean_dd, 102);
        est.h_bd = fit(s.stats.mean_bd, 103);
        return cdi::rate_gap(cb, s.stats, est, s.cdi_mc_samples, seed);
      }
    }
  } catch (const std::exception&) {
    return std::nan("");
  }
  return 0.0;
}

}  // namespace

RunResult run(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);

  const std::vector<double> values =
      spec.axis == SweepAxis::none ? std::vector<double>{0.0} : spec.axis_values;
  const std::size_t n_points = values.size() * spec.seeds.size();
  std::vector<SweepRow> rows(n_points);

  // The warm start is seed-independent, so one per axis value is computed
  // up front and shared by every seed at that point.
  std::vector<std::vector<double>> warms(values.size());
  auto make_warm = [&](std::size_t vi) {
    ExperimentSpec s = apply_axis(spec, spec.axis, values[vi]);
    const auto backend = s.noisy_mode ? pso::MetricBackend::noisy
                                      : pso::MetricBackend::error_free;
    warms[vi] = pso::warm_start(s.stats, s.constraints, s.M, s.N, s.pso,
                                backend, s.noise);
  };
  if (workers <= 1) {
    for (std::size_t vi = 0; vi < values.size(); ++vi) make_warm(vi);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t vi = w; vi < values.size(); vi += workers) make_warm(vi);
      });
    for (auto& t : pool) t.join();
  }

  auto run_point = [&](std::size_t k) {
    const std::size_t vi = k / spec.seeds.size();
    const std::size_t si = k % spec.seeds.size();
    ExperimentSpec s = apply_axis(spec, spec.axis, values[vi]);
    const std::uint64_t seed = spec.seeds[si];
    s.pso.seed = seed;
    s.mc.seed = seed;

    const auto backend = s.noisy_mode ? pso::MetricBackend::noisy
                                      : pso::MetricBackend::error_free;
    pso::OptimizeResult opt = pso::optimize(s.stats, s.constraints, s.M, s.N,
                                            s.pso, backend, s.noise, &warms[vi]);

    SweepRow row;
    row.axis = axis_to_string(spec.axis);
    row.axis_value = values[vi];
    row.seed = seed;
    row.M = s.M;
    row.N = s.N;
    row.q_c = s.noisy_mode ? s.noise.q_c : 0.0;
    row.q_d = s.noisy_mode ? s.noise.q_d : 0.0;
    row.report = opt.report;
    row.gbest_cost = opt.gbest_cost;
    row.feasible = opt.feasible;
    row.cdi_mode = cdi_mode_to_string(s.cdi_mode);
    row.rate_gap = point_rate_gap(s, opt.codebook, seed);
    row.mc = montecarlo::simulate_metrics(
        opt.codebook, s.stats, s.noisy_mode ? &s.noise : nullptr, s.mc);
    rows[k] = row;

    const std::string tag = std::to_string(k);
    std::ostringstream trace;
    trace << "iter,gbest_cost\n";
    for (std::size_t i = 0; i < opt.trace.size(); ++i)
      trace << i << ',' << fmt(opt.trace[i]) << '\n';
    write_file(spec.out_dir + "/trace_" + tag + ".csv", trace.str());
    save_codebook(opt.codebook, spec.out_dir + "/codebook_" + tag + ".json");
  };

  if (workers <= 1) {
    for (std::size_t k = 0; k < n_points; ++k) run_point(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < n_points; k += workers) run_point(k);
      });
    for (auto& t : pool) t.join();
  }

  std::ostringstream csv;
  csv << SweepRow::csv_header() << '\n';
  for (const SweepRow& row : rows) csv << row.csv_row() << '\n';

  RunResult res;
  res.rows = std::move(rows);
  res.results_path = spec.out_dir + "/results.csv";
  write_file(res.results_path, csv.str());

  const std::string body = manifest_text(spec);
  std::ostringstream manifest;
  manifest << body << "\n[meta]\n";
  manifest << "content_hash = " << content_hash(body) << "\n";
  res.manifest_path = spec.out_dir + "/manifest.ini";
  write_file(res.manifest_path, manifest.str());

  res.all_feasible = true;
  for (const SweepRow& row : res.rows) res.all_feasible &= row.feasible;
  return res;
}

VerifyResult verify(const Codebook& cb, const ExperimentSpec& spec) {
  VerifyResult res;
  res.analytic = spec.noisy_mode ? noisy::evaluate(cb, spec.stats, spec.noise)
                                 : metrics::evaluate(cb, spec.stats);
  res.simulated = montecarlo::simulate_metrics(
      cb, spec.stats, spec.noisy_mode ? &spec.noise : nullptr, spec.mc);

  struct Line {
    const char* name;
    double analytic;
    const montecarlo::McEstimate* mc;
  };
  const Line lines[] = {
      {"avg_power_c", res.analytic.avg_power_c, &res.simulated.avg_power_c},
      {"avg_power_d", res.analytic.avg_power_d, &res.simulated.avg_power_d},
      {"avg_secrecy_rate_c", res.analytic.avg_secrecy_rate_c,
       &res.simulated.avg_secrecy_rate_c},
      {"avg_rate_d", res.analytic.avg_rate_d, &res.simulated.avg_rate_d},
      {"outage_codebook", res.analytic.outage_codebook,
       &res.simulated.outage_codebook},
  };
  std::ostringstream out;
  out << "metric, analytic, mc_value, mc_se, agree\n";
  res.all_agree = true;
  for (const Line& l : lines) {
    const bool ok = l.mc->agrees_with(l.analytic, spec.mc.confidence_multiplier);
    res.all_agree &= ok;
    out << l.name << ", " << fmt(l.analytic) << ", " << fmt(l.mc->value) << ", "
        << fmt(l.mc->standard_error) << ", " << (ok ? "yes" : "NO") << '\n';
  }
  res.text = out.str();
  return res;
}

}  // namespace runner
}  // namespace d2dlf
