// Command-line front end: loads or selects a scenario, runs the gain design
// and the requested trajectory runs, and writes CSV trajectories plus a
// key = value design report.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coopman/errors.hpp"
#include "coopman/experiment.hpp"

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative-manipulation sampled-gain designer and simulator"};

  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string strategy;
  std::string norm;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<double> alphas;
  bool alphas_set = false;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON scenario file (schema_version 1)");
  app.add_option("--preset", preset,
                 "named scenario: " + join(coopman::preset_names(), ", "));
  app.add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "output directory for CSV files and the report");
  app.add_option("--strategy", strategy,
                 "run only this strategy (continuous, offline, online)");
  app.add_option("--alpha", alphas,
                 "force-actuation gain; repeat for a sweep, use 0 for kinematic runs")
      ->each([&](const std::string&) { alphas_set = true; });
  app.add_option("--norm", norm, "override the error norm kind (two, inf)");
  app.add_flag("--quiet", quiet, "suppress per-file progress lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() == preset.empty()) {
      throw coopman::ConfigError({"give exactly one of --config or --preset"});
    }
    coopman::ExperimentConfig cfg = config_path.empty()
                                        ? coopman::preset_config(preset)
                                        : coopman::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!strategy.empty()) cfg.strategies = {coopman::strategy_from_name(strategy)};
    if (alphas_set) {
      cfg.alphas.clear();
      for (double a : alphas) {
        if (a != 0.0) cfg.alphas.push_back(a);
      }
    }
    if (!norm.empty()) {
      if (norm == "two" || norm == "2") {
        cfg.norm_kind = coopman::NormKind::two;
      } else if (norm == "inf") {
        cfg.norm_kind = coopman::NormKind::inf;
      } else {
        throw coopman::ConfigError({"--norm must be 'two' or 'inf', got '" + norm + "'"});
      }
    }
    if (quiet) cfg.quiet = true;
    cfg.validate();

    const coopman::ExperimentResult result = coopman::run_experiment(cfg);
    if (!cfg.quiet) {
      for (const std::string& path : result.csv_files) {
        std::printf("wrote %s\n", path.c_str());
      }
      std::printf("wrote %s\n", result.report_path.c_str());
    }
    return 0;
  } catch (const coopman::ConfigError& err) {
    std::fprintf(stderr, "config error:\n");
    for (const std::string& item : err.items()) {
      std::fprintf(stderr, "  - %s\n", item.c_str());
    }
    return 3;
  } catch (const coopman::StructuralError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 3;
  } catch (const coopman::SingularityError& err) {
    std::fprintf(stderr, "run failed: %s\n", err.what());
    return 4;
  } catch (const coopman::DomainError& err) {
    std::fprintf(stderr, "run failed: %s\n", err.what());
    return 4;
  } catch (const coopman::RunError& err) {
    std::fprintf(stderr, "run failed: %s\n", err.what());
    return 4;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "io error: %s\n", err.what());
    return 5;
  }
}
