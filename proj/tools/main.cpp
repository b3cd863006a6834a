#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "d2dlf/runner.hpp"

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("D2DLF_WORKERS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

d2dlf::runner::ExperimentSpec load_spec_file(const std::string& path) {
  return d2dlf::runner::load_spec(d2dlf::config::load_ini(path));
}

// malformed codebook files are usage errors, like config parse errors
d2dlf::Codebook load_codebook_or_exit(const std::string& path) {
  try {
    return d2dlf::load_codebook(path);
  } catch (const std::exception& e) {
    std::cerr << "codebook error: " << e.what() << "\n";
    std::exit(2);
  }
}

void apply_overrides(d2dlf::runner::ExperimentSpec& spec, const std::string& out_dir,
                     std::uint64_t seed, bool seed_set) {
  if (!out_dir.empty()) spec.out_dir = out_dir;
  if (seed_set) spec.seeds = {seed};
}

int print_rows(const d2dlf::runner::RunResult& res) {
  std::cout << "wrote " << res.results_path << " (" << res.rows.size()
            << " rows), manifest " << res.manifest_path << "\n";
  if (!res.all_feasible)
    std::cout << "warning: some sweep points are infeasible (see results.csv)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"limited-feedback D2D codebook design and evaluation"};
  app.require_subcommand(1);

  std::string config_path, codebook_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = default_workers();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "replace the seed list with this one seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers, "parallel workers");
  };

  CLI::App* design = app.add_subcommand("design", "single codebook design");
  design->add_option("config", config_path, "experiment config (INI)")->required();
  add_common(design);

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  sweep->add_option("config", config_path, "experiment config (INI)")->required();
  add_common(sweep);

  CLI::App* verify = app.add_subcommand("verify", "analytic vs Monte Carlo");
  verify->add_option("codebook", codebook_path, "codebook JSON file")->required();
  verify->add_option("config", config_path, "experiment config (INI)")->required();
  add_common(verify);

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo metrics of a codebook");
  mc->add_option("config", config_path, "experiment config (INI)")->required();
  mc->add_option("--codebook", codebook_path, "codebook JSON file")->required();
  add_common(mc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed() || sweep->parsed()) {
      d2dlf::runner::ExperimentSpec spec = load_spec_file(config_path);
      apply_overrides(spec, out_dir, seed, seed_set);
      if (design->parsed() && spec.axis != d2dlf::runner::SweepAxis::none) {
        std::cerr << "design: config declares a sweep axis; use `sweep`\n";
        return 2;
      }
      return print_rows(d2dlf::runner::run(spec, workers));
    }
    if (verify->parsed()) {
      d2dlf::runner::ExperimentSpec spec = load_spec_file(config_path);
      apply_overrides(spec, out_dir, seed, seed_set);
      if (seed_set) spec.mc.seed = seed;
      spec.mc.workers = workers;
      const d2dlf::Codebook cb = load_codebook_or_exit(codebook_path);
      const auto res = d2dlf::runner::verify(cb, spec);
      std::cout << res.text;
      std::cout << (res.all_agree ? "all metrics agree\n" : "DISAGREEMENT\n");
      return res.all_agree ? 0 : 1;
    }
    if (mc->parsed()) {
      d2dlf::runner::ExperimentSpec spec = load_spec_file(config_path);
      apply_overrides(spec, out_dir, seed, seed_set);
      if (seed_set) spec.mc.seed = seed;
      spec.mc.workers = workers;
      const d2dlf::Codebook cb = load_codebook_or_exit(codebook_path);
      const auto rep = d2dlf::montecarlo::simulate_metrics(
          cb, spec.stats, spec.noisy_mode ? &spec.noise : nullptr, spec.mc);
      auto line = [](const char* name, const d2dlf::montecarlo::McEstimate& e) {
        std::printf("%s,%.17g,%.17g,%llu\n", name, e.value, e.standard_error,
                    static_cast<unsigned long long>(e.n_samples));
      };
      std::printf("metric,value,se,n\n");
      line("avg_power_c", rep.avg_power_c);
      line("avg_power_d", rep.avg_power_d);
      line("avg_secrecy_rate_c", rep.avg_secrecy_rate_c);
      line("avg_rate_d", rep.avg_rate_d);
      line("outage_codebook", rep.outage_codebook);
      return 0;
    }
  } catch (const d2dlf::config::ParseError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
