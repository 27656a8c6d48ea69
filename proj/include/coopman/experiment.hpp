#ifndef COOPMAN_EXPERIMENT_HPP
#define COOPMAN_EXPERIMENT_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coopman/control.hpp"
#include "coopman/dynamics.hpp"
#include "coopman/gain_design.hpp"
#include "coopman/sim.hpp"
#include "coopman/system.hpp"
#include "coopman/weighted_norm.hpp"

namespace coopman {

/// Everything one scenario needs: the plant, the norm geometry, the gain
/// profile, initial conditions, the run matrix (strategies x force gains),
/// Monte-Carlo budgets, and output plumbing. Loadable from versioned JSON
/// (schema_version 1) and buildable from named presets.
struct ExperimentConfig {
  int schema_version = 1;
  std::string name = "custom";
  std::string system = "fly_crane4";

  NormKind norm_kind = NormKind::inf;
  NormVariant norm_variant = NormVariant::matrix;
  Eigen::VectorXd d_blocks;     // empty: all ones
  Eigen::VectorXd kbar_blocks;  // empty: all ones
  double period = 1.5;          // s

  Eigen::VectorXd qref;                             // empty: system reference
  std::vector<Eigen::VectorXd> initial_conditions;  // explicit q0 values
  int random_initial = 0;                           // extra q0 drawn inside the ball
  double radius = 0.0;  // working-ball radius; 0: per-IC radius ||q0 - qref|| (1 + 1e-6)

  std::vector<Strategy> strategies{Strategy::offline, Strategy::online};
  std::vector<double> alphas;  // empty: kinematic runs; else dynamic runs per alpha

  int horizon_periods = 8;
  double dt = 0.0;  // 0: period/256 kinematic, or the stiffness-limited step

  std::uint64_t ab_samples = 200;
  std::uint64_t mu_star_trajectories = 50;
  std::uint64_t seed = 1;

  double agent_mass = 1.0;
  double load_inertia_scale = 1.0;
  CoriolisMode coriolis = CoriolisMode::christoffel;

  std::string out_dir = ".";
  bool quiet = false;

  /// Shape and positivity checks against the named system's layout; throws
  /// ConfigError listing every violation at once.
  void validate() const;
};

/// Parses a JSON config (text), collecting all problems into one ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Named scenario bundles. "fig4-online-offline": sampled kinematic runs,
/// infinity norm, two initial conditions with per-IC ball radii.
/// "fig5-alpha-sweep": force-actuated runs at three gains, 2-norm.
/// Both are qualitative reproductions with documented default numbers.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Per-ball design pipeline output: sampled sensitivity constants, the
/// Taylor-remainder mu, its Monte-Carlo refinement, and the certified and
/// refined window designs. The shipped schedule holds k = k_star from the
/// certified (mu-based) design.
struct BallDesign {
  Ball ball;
  ABEstimate ab;
  double mu = 0.0;
  MuStarEstimate mu_star;
  OfflineDesign certified;
  OfflineDesign refined;
  GainSchedule schedule;
};

struct ExperimentResult {
  std::vector<BallDesign> designs;
  std::vector<std::string> csv_files;  // paths in emission order
  std::string report_path;
  std::string report_text;
};

/// Builds the system named in the config.
std::unique_ptr<KinematicSystem> make_system(const ExperimentConfig& config);

/// Runs the design pipeline for every initial condition's ball. Asserts the
/// refinement ordering mu_star <= mu and rho(mu_star) <= rho(mu); violations
/// throw RunError since they break the method's own guarantee.
std::vector<BallDesign> design_balls(const ExperimentConfig& config, const KinematicSystem& sys);

/// Full scenario: designs, then one run per (strategy x alpha x initial
/// condition), each serialized to CSV under out_dir, plus a key = value
/// report of the design constants. Deterministic for a fixed seed.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Design constants only (no trajectory runs); returns the report text.
std::string design_report(const ExperimentConfig& config);

/// Report text is a flat, ordered `key = value` list; these two functions
/// are exact inverses so reports round-trip losslessly.
std::vector<std::pair<std::string, std::string>> parse_report(const std::string& text);
std::string serialize_report(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace coopman

#endif
