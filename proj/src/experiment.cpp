#include "coopman/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coopman/csv.hpp"
#include "coopman/errors.hpp"
#include "coopman/rng.hpp"
#include "coopman/systems/fly_crane4.hpp"
#include "coopman/systems/linear_tall.hpp"
#include "coopman/systems/planar_tri_link.hpp"

namespace coopman {

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double.
std::string format_exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_exact(v(i));
  }
  return out;
}

// Filename-safe rendering of a gain value: 2.5 -> "2p5".
std::string alpha_tag(double alpha) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  std::string s = buf;
  for (char& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
    if (c == '+') c = '_';
  }
  return s;
}

std::string norm_kind_name(NormKind k) { return k == NormKind::two ? "two" : "inf"; }
std::string norm_variant_name(NormVariant v) {
  return v == NormVariant::matrix ? "matrix" : "expanded";
}

NormKind norm_kind_from_name(const std::string& s, std::vector<std::string>& errs) {
  if (s == "two" || s == "2") return NormKind::two;
  if (s == "inf") return NormKind::inf;
  errs.push_back("norm.kind must be 'two' or 'inf', got '" + s + "'");
  return NormKind::inf;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& key,
                                 std::vector<std::string>& errs) {
  if (!j.is_array()) {
    errs.push_back(key + " must be an array of numbers");
    return Eigen::VectorXd();
  }
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      errs.push_back(key + "[" + std::to_string(i) + "] must be a number");
      return Eigen::VectorXd();
    }
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

bool filename_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

}  // namespace

std::unique_ptr<KinematicSystem> make_system(const ExperimentConfig& config) {
  if (config.system == "linear_tall") {
    return std::make_unique<LinearTallSystem>(LinearTallSystem::default_instance());
  }
  if (config.system == "planar_tri_link") return std::make_unique<PlanarTriLink>();
  if (config.system == "fly_crane4") return std::make_unique<FlyCrane4>();
  throw ConfigError({"unknown system '" + config.system +
                     "' (linear_tall, planar_tri_link, fly_crane4)"});
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  if (schema_version != 1) {
    errs.push_back("schema_version must be 1, got " + std::to_string(schema_version));
  }
  if (!filename_safe(name)) {
    errs.push_back("name must be nonempty and use only [A-Za-z0-9_-]");
  }

  const BlockLayout* layout = nullptr;
  std::unique_ptr<KinematicSystem> sys;
  if (system == "linear_tall" || system == "planar_tri_link" || system == "fly_crane4") {
    sys = make_system(*this);
    layout = &sys->layout();
  } else {
    errs.push_back("unknown system '" + system +
                   "' (linear_tall, planar_tri_link, fly_crane4)");
  }

  if (layout) {
    const int nb = layout->num_agents() + 1;
    if (d_blocks.size() != 0 && d_blocks.size() != nb) {
      errs.push_back("d_blocks needs one weight per agent plus the load (" +
                     std::to_string(nb) + ")");
    }
    for (int i = 0; i < d_blocks.size(); ++i) {
      if (!(d_blocks(i) >= 1.0) || !std::isfinite(d_blocks(i))) {
        errs.push_back("d_blocks[" + std::to_string(i) + "] must be >= 1");
      }
    }
    if (kbar_blocks.size() != 0 && kbar_blocks.size() != nb) {
      errs.push_back("kbar_blocks needs one gain per agent plus the load (" +
                     std::to_string(nb) + ")");
    }
    for (int i = 0; i < kbar_blocks.size(); ++i) {
      if (!(kbar_blocks(i) > 0.0) || !std::isfinite(kbar_blocks(i))) {
        errs.push_back("kbar_blocks[" + std::to_string(i) + "] must be positive");
      }
    }
    if (qref.size() != 0 && qref.size() != layout->config_dim()) {
      errs.push_back("qref must have the configuration dimension " +
                     std::to_string(layout->config_dim()));
    }
    for (std::size_t i = 0; i < initial_conditions.size(); ++i) {
      if (initial_conditions[i].size() != layout->config_dim()) {
        errs.push_back("initial_conditions[" + std::to_string(i) +
                       "] must have the configuration dimension " +
                       std::to_string(layout->config_dim()));
      }
    }
  }

  if (!(period > 0.0) || !std::isfinite(period)) errs.push_back("period must be positive");
  if (horizon_periods < 1) errs.push_back("horizon_periods must be >= 1");
  if (dt < 0.0 || !std::isfinite(dt)) errs.push_back("dt must be >= 0 (0 = automatic)");
  if (radius < 0.0 || !std::isfinite(radius)) {
    errs.push_back("radius must be >= 0 (0 = per initial condition)");
  }
  if (random_initial < 0) errs.push_back("random_initial must be >= 0");
  if (random_initial > 0 && !(radius > 0.0)) {
    errs.push_back("random_initial needs an explicit positive radius to draw from");
  }
  if (initial_conditions.empty() && random_initial == 0) {
    errs.push_back("at least one initial condition is required");
  }
  if (strategies.empty()) errs.push_back("at least one strategy is required");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) errs.push_back("alphas must be positive");
  }
  if (ab_samples < 1) errs.push_back("ab_samples must be >= 1");
  if (mu_star_trajectories < 1) errs.push_back("mu_star_trajectories must be >= 1");
  if (!(agent_mass > 0.0) || !std::isfinite(agent_mass)) {
    errs.push_back("agent_mass must be positive");
  }
  if (!(load_inertia_scale > 0.0) || !std::isfinite(load_inertia_scale)) {
    errs.push_back("load_inertia_scale must be positive");
  }
  if (out_dir.empty()) errs.push_back("out_dir must be nonempty");

  if (!errs.empty()) throw ConfigError(std::move(errs));
}

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError({std::string("json parse error: ") + err.what()});
  }
  if (!root.is_object()) throw ConfigError({"config root must be a JSON object"});

  std::vector<std::string> errs;
  ExperimentConfig cfg;

  static const char* known[] = {
      "schema_version", "name",   "system",   "norm",      "gains",          "qref",
      "initial_conditions", "random_initial", "radius", "strategies", "alphas",
      "horizon_periods", "dt",    "monte_carlo", "seed",   "dynamics",       "out_dir",
      "quiet"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return it.key() == k;
        }) == std::end(known)) {
      errs.push_back("unknown key '" + it.key() + "'");
    }
  }

  const auto get_int = [&](const json& j, const std::string& key, int& dst) {
    if (j.is_number_integer()) {
      dst = j.get<int>();
    } else {
      errs.push_back(key + " must be an integer");
    }
  };
  const auto get_uint = [&](const json& j, const std::string& key, std::uint64_t& dst) {
    if (j.is_number_unsigned()) {
      dst = j.get<std::uint64_t>();
    } else {
      errs.push_back(key + " must be a non-negative integer");
    }
  };
  const auto get_double = [&](const json& j, const std::string& key, double& dst) {
    if (j.is_number()) {
      dst = j.get<double>();
    } else {
      errs.push_back(key + " must be a number");
    }
  };
  const auto get_string = [&](const json& j, const std::string& key, std::string& dst) {
    if (j.is_string()) {
      dst = j.get<std::string>();
    } else {
      errs.push_back(key + " must be a string");
    }
  };

  if (root.contains("schema_version")) get_int(root["schema_version"], "schema_version", cfg.schema_version);
  else errs.push_back("schema_version is required");
  if (root.contains("name")) get_string(root["name"], "name", cfg.name);
  if (root.contains("system")) get_string(root["system"], "system", cfg.system);

  if (root.contains("norm")) {
    const json& n = root["norm"];
    if (!n.is_object()) {
      errs.push_back("norm must be an object");
    } else {
      if (n.contains("kind")) {
        std::string kind;
        get_string(n["kind"], "norm.kind", kind);
        cfg.norm_kind = norm_kind_from_name(kind, errs);
      }
      if (n.contains("variant")) {
        std::string variant;
        get_string(n["variant"], "norm.variant", variant);
        if (variant == "matrix") {
          cfg.norm_variant = NormVariant::matrix;
        } else if (variant == "expanded") {
          cfg.norm_variant = NormVariant::expanded;
        } else {
          errs.push_back("norm.variant must be 'matrix' or 'expanded'");
        }
      }
      if (n.contains("d_blocks")) cfg.d_blocks = vector_from_json(n["d_blocks"], "norm.d_blocks", errs);
    }
  }

  if (root.contains("gains")) {
    const json& g = root["gains"];
    if (!g.is_object()) {
      errs.push_back("gains must be an object");
    } else {
      if (g.contains("kbar_blocks")) {
        cfg.kbar_blocks = vector_from_json(g["kbar_blocks"], "gains.kbar_blocks", errs);
      }
      if (g.contains("period")) get_double(g["period"], "gains.period", cfg.period);
    }
  }

  if (root.contains("qref")) cfg.qref = vector_from_json(root["qref"], "qref", errs);
  if (root.contains("initial_conditions")) {
    const json& ics = root["initial_conditions"];
    if (!ics.is_array()) {
      errs.push_back("initial_conditions must be an array of arrays");
    } else {
      for (std::size_t i = 0; i < ics.size(); ++i) {
        cfg.initial_conditions.push_back(
            vector_from_json(ics[i], "initial_conditions[" + std::to_string(i) + "]", errs));
      }
    }
  }
  if (root.contains("random_initial")) get_int(root["random_initial"], "random_initial", cfg.random_initial);
  if (root.contains("radius")) get_double(root["radius"], "radius", cfg.radius);

  if (root.contains("strategies")) {
    const json& st = root["strategies"];
    if (!st.is_array()) {
      errs.push_back("strategies must be an array of strings");
    } else {
      cfg.strategies.clear();
      for (const json& s : st) {
        if (!s.is_string()) {
          errs.push_back("strategies entries must be strings");
          continue;
        }
        try {
          cfg.strategies.push_back(strategy_from_name(s.get<std::string>()));
        } catch (const StructuralError& err) {
          errs.push_back(err.what());
        }
      }
    }
  }
  if (root.contains("alphas")) {
    const Eigen::VectorXd a = vector_from_json(root["alphas"], "alphas", errs);
    cfg.alphas.assign(a.data(), a.data() + a.size());
  }
  if (root.contains("horizon_periods")) {
    get_int(root["horizon_periods"], "horizon_periods", cfg.horizon_periods);
  }
  if (root.contains("dt")) get_double(root["dt"], "dt", cfg.dt);

  if (root.contains("monte_carlo")) {
    const json& mc = root["monte_carlo"];
    if (!mc.is_object()) {
      errs.push_back("monte_carlo must be an object");
    } else {
      if (mc.contains("ab_samples")) get_uint(mc["ab_samples"], "monte_carlo.ab_samples", cfg.ab_samples);
      if (mc.contains("mu_star_trajectories")) {
        get_uint(mc["mu_star_trajectories"], "monte_carlo.mu_star_trajectories",
                 cfg.mu_star_trajectories);
      }
    }
  }
  if (root.contains("seed")) get_uint(root["seed"], "seed", cfg.seed);

  if (root.contains("dynamics")) {
    const json& dy = root["dynamics"];
    if (!dy.is_object()) {
      errs.push_back("dynamics must be an object");
    } else {
      if (dy.contains("agent_mass")) get_double(dy["agent_mass"], "dynamics.agent_mass", cfg.agent_mass);
      if (dy.contains("load_inertia_scale")) {
        get_double(dy["load_inertia_scale"], "dynamics.load_inertia_scale",
                   cfg.load_inertia_scale);
      }
      if (dy.contains("coriolis")) {
        std::string mode;
        get_string(dy["coriolis"], "dynamics.coriolis", mode);
        if (mode == "zero") {
          cfg.coriolis = CoriolisMode::zero;
        } else if (mode == "christoffel") {
          cfg.coriolis = CoriolisMode::christoffel;
        } else {
          errs.push_back("dynamics.coriolis must be 'zero' or 'christoffel'");
        }
      }
    }
  }
  if (root.contains("out_dir")) get_string(root["out_dir"], "out_dir", cfg.out_dir);
  if (root.contains("quiet")) {
    if (root["quiet"].is_boolean()) {
      cfg.quiet = root["quiet"].get<bool>();
    } else {
      errs.push_back("quiet must be a boolean");
    }
  }

  // Shape checks still run when the text had problems, so one pass reports
  // both kinds of violation together.
  try {
    cfg.validate();
  } catch (const ConfigError& err) {
    errs.insert(errs.end(), err.items().begin(), err.items().end());
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::vector<std::string> preset_names() { return {"fig4-online-offline", "fig5-alpha-sweep"}; }

ExperimentConfig preset_config(const std::string& name) {
  // Shared backbone: the four-agent aerial system with unit block gains,
  // load block weighted twice as heavily as the agents, period 1.5 s.
  ExperimentConfig cfg;
  cfg.system = "fly_crane4";
  cfg.period = 1.5;
  cfg.d_blocks = Eigen::VectorXd::Ones(5);
  cfg.d_blocks(4) = 2.0;
  cfg.kbar_blocks = Eigen::VectorXd::Ones(5);
  cfg.seed = 20260819;
  cfg.ab_samples = 200;
  cfg.mu_star_trajectories = 50;

  const Eigen::VectorXd qref = FlyCrane4().reference_configuration();
  // Documented default initial conditions (the source scenario gives none):
  // q_a close to the reference, q_b noticeably farther.
  Eigen::VectorXd close = qref;
  close(0) += 0.10;
  close(1) -= 0.08;
  close(2) += 0.05;
  close(3) -= 0.12;
  close(4) += 0.05;
  close(5) -= 0.04;
  close(6) += 0.03;
  close(7) += 0.04;
  close(8) -= 0.03;
  close(9) += 0.05;
  Eigen::VectorXd far = qref;
  far(0) += 0.25;
  far(1) -= 0.20;
  far(2) += 0.15;
  far(3) -= 0.22;
  far(4) += 0.30;
  far(5) -= 0.20;
  far(6) += 0.20;
  far(7) += 0.20;
  far(8) -= 0.15;
  far(9) += 0.25;

  if (name == "fig4-online-offline") {
    cfg.name = "fig4-online-offline";
    cfg.norm_kind = NormKind::inf;
    cfg.initial_conditions = {close, far};
    cfg.strategies = {Strategy::offline, Strategy::online};
    cfg.horizon_periods = 8;
    return cfg;
  }
  if (name == "fig5-alpha-sweep") {
    cfg.name = "fig5-alpha-sweep";
    cfg.norm_kind = NormKind::two;
    cfg.initial_conditions = {far};
    cfg.strategies = {Strategy::offline, Strategy::online};
    cfg.alphas = {2.0, 20.0, 200.0};
    cfg.horizon_periods = 6;
    return cfg;
  }
  throw ConfigError({"unknown preset '" + name + "' (fig4-online-offline, fig5-alpha-sweep)"});
}

namespace {

struct ResolvedScenario {
  Eigen::VectorXd qref;
  Eigen::VectorXd d_blocks;
  Eigen::VectorXd kbar_blocks;
  std::vector<Eigen::VectorXd> q0s;
  std::vector<int> design_of_ic;  // index into designs, one per q0
};

ResolvedScenario resolve(const ExperimentConfig& config, const KinematicSystem& sys,
                         const WeightedNorm& norm) {
  const BlockLayout& layout = sys.layout();
  ResolvedScenario rs;
  rs.qref = config.qref.size() ? config.qref : sys.reference_configuration();
  sys.check_domain(rs.qref);
  rs.d_blocks = config.d_blocks.size() ? config.d_blocks
                                       : Eigen::VectorXd::Ones(layout.num_agents() + 1);
  rs.kbar_blocks = config.kbar_blocks.size() ? config.kbar_blocks
                                             : Eigen::VectorXd::Ones(layout.num_agents() + 1);
  rs.q0s = config.initial_conditions;
  if (config.random_initial > 0) {
    const Rng master(config.seed);
    for (int i = 0; i < config.random_initial; ++i) {
      Rng sub = master.substream(0x1C000u + static_cast<std::uint64_t>(i));
      rs.q0s.push_back(rs.qref + sample_in_ball(sub, norm, config.radius));
    }
  }
  for (const Eigen::VectorXd& q0 : rs.q0s) sys.check_domain(q0);
  return rs;
}

BallDesign design_one(const ExperimentConfig& config, const KinematicSystem& sys,
                      const Ball& ball, const Eigen::VectorXd& kbar_blocks,
                      const Eigen::VectorXd& d_blocks, std::uint64_t ball_index) {
  const Rng master(config.seed);
  const std::uint64_t seed_ab = master.substream(0xAB00u + ball_index).seed();
  const std::uint64_t seed_mu = master.substream(0x3500u + ball_index).seed();

  BallDesign d{ball, {}, 0.0, {}, {}, {}, {}};
  d.ab = estimate_ab(sys, ball, kbar_blocks, config.ab_samples, seed_ab);
  d.mu = mu_from_ab(d.ab.a, d.ab.b, ball.radius);
  d.mu_star = mc_mu_star(sys, ball, kbar_blocks, config.mu_star_trajectories, seed_mu);
  d.certified = offline_design(d.mu, kbar_blocks, d_blocks, config.period);
  d.refined = offline_design(d.mu_star.mu_star, kbar_blocks, d_blocks, config.period);

  // Absolute floor 1e-8: on constant-Jacobian systems both constants are
  // exact zeros up to roundoff and the sampled ratio sees amplified noise.
  if (!(d.mu_star.mu_star <= d.mu * (1.0 + 1e-12) + 1e-8)) {
    throw RunError("design: sampled remainder exceeded the certified bound (mu_star = " +
                   format_exact(d.mu_star.mu_star) + " > mu = " + format_exact(d.mu) + ")");
  }
  if (!(d.refined.rho <= d.certified.rho * (1.0 + 1e-12) + 1e-8)) {
    throw RunError("design: refined contraction factor exceeded the certified one");
  }

  d.schedule.k = d.certified.k_star;
  d.schedule.kbar_blocks = kbar_blocks;
  d.schedule.period = config.period;
  return d;
}

void append_design(std::vector<std::pair<std::string, std::string>>& entries,
                   const BallDesign& d, std::size_t index) {
  const std::string p = "ball" + std::to_string(index) + ".";
  entries.emplace_back(p + "radius", format_exact(d.ball.radius));
  entries.emplace_back(p + "a_raw", format_exact(d.ab.a_raw));
  entries.emplace_back(p + "b_raw", format_exact(d.ab.b_raw));
  entries.emplace_back(p + "a", format_exact(d.ab.a));
  entries.emplace_back(p + "b", format_exact(d.ab.b));
  entries.emplace_back(p + "ab_samples", std::to_string(d.ab.n_samples));
  entries.emplace_back(p + "ab_skipped", std::to_string(d.ab.skipped));
  entries.emplace_back(p + "mu", format_exact(d.mu));
  entries.emplace_back(p + "mu_star", format_exact(d.mu_star.mu_star));
  entries.emplace_back(p + "mu_star_trajectories", std::to_string(d.mu_star.n_traj));
  entries.emplace_back(p + "mu_star_skipped", std::to_string(d.mu_star.skipped));
  entries.emplace_back(p + "tau_o_bar", format_exact(d.certified.tau_o_bar));
  entries.emplace_back(p + "tau_s_bar", format_exact(d.certified.tau_s_bar));
  entries.emplace_back(p + "rho", format_exact(d.certified.rho));
  entries.emplace_back(p + "k_star", format_exact(d.certified.k_star));
  entries.emplace_back(p + "refined.tau_o_bar", format_exact(d.refined.tau_o_bar));
  entries.emplace_back(p + "refined.tau_s_bar", format_exact(d.refined.tau_s_bar));
  entries.emplace_back(p + "refined.rho", format_exact(d.refined.rho));
  entries.emplace_back(p + "refined.k_star", format_exact(d.refined.k_star));
}

std::vector<std::pair<std::string, std::string>> header_entries(
    const ExperimentConfig& config, const ResolvedScenario& rs) {
  std::vector<std::pair<std::string, std::string>> entries;
  entries.emplace_back("schema_version", std::to_string(config.schema_version));
  entries.emplace_back("scenario", config.name);
  entries.emplace_back("system", config.system);
  entries.emplace_back("norm_kind", norm_kind_name(config.norm_kind));
  entries.emplace_back("norm_variant", norm_variant_name(config.norm_variant));
  entries.emplace_back("period", format_exact(config.period));
  entries.emplace_back("d", format_vector(rs.d_blocks));
  entries.emplace_back("kbar", format_vector(rs.kbar_blocks));
  entries.emplace_back("qref", format_vector(rs.qref));
  entries.emplace_back("seed", std::to_string(config.seed));
  entries.emplace_back("horizon_periods", std::to_string(config.horizon_periods));
  return entries;
}

}  // namespace

std::vector<BallDesign> design_balls(const ExperimentConfig& config, const KinematicSystem& sys) {
  const BlockLayout& layout = sys.layout();
  const Eigen::VectorXd d_blocks = config.d_blocks.size()
                                       ? config.d_blocks
                                       : Eigen::VectorXd::Ones(layout.num_agents() + 1);
  const WeightedNorm norm(layout, d_blocks, config.norm_kind, config.norm_variant);
  const ResolvedScenario rs = resolve(config, sys, norm);

  std::vector<BallDesign> designs;
  if (config.radius > 0.0) {
    designs.push_back(design_one(config, sys, Ball{rs.qref, config.radius, norm},
                                 rs.kbar_blocks, rs.d_blocks, 0));
  } else {
    for (std::size_t i = 0; i < rs.q0s.size(); ++i) {
      const double r = norm(rs.q0s[i] - rs.qref) * (1.0 + 1e-6);
      if (!(r > 0.0)) {
        throw ConfigError({"initial condition " + std::to_string(i) +
                           " coincides with the reference; give an explicit radius"});
      }
      designs.push_back(
          design_one(config, sys, Ball{rs.qref, r, norm}, rs.kbar_blocks, rs.d_blocks, i));
    }
  }
  return designs;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::unique_ptr<KinematicSystem> sys = make_system(config);
  const BlockLayout& layout = sys->layout();
  const Eigen::VectorXd d_blocks = config.d_blocks.size()
                                       ? config.d_blocks
                                       : Eigen::VectorXd::Ones(layout.num_agents() + 1);
  const WeightedNorm norm(layout, d_blocks, config.norm_kind, config.norm_variant);
  const ResolvedScenario rs = resolve(config, *sys, norm);

  ExperimentResult result;
  result.designs = design_balls(config, *sys);
  const bool shared_ball = config.radius > 0.0;

  std::filesystem::create_directories(config.out_dir);
  auto entries = header_entries(config, rs);
  for (std::size_t i = 0; i < result.designs.size(); ++i) {
    append_design(entries, result.designs[i], i);
  }

  const double t_end = config.horizon_periods * config.period;
  const double dt_kin = config.dt > 0.0 ? config.dt : config.period / 256.0;

  DynamicParams params;
  params.agent_masses = Eigen::VectorXd::Constant(layout.num_agents(), config.agent_mass);
  params.load_inertia = config.load_inertia_scale *
                        Eigen::MatrixXd::Identity(layout.load_dim, layout.load_dim);
  params.coriolis = config.coriolis;

  std::size_t run_index = 0;
  for (std::size_t ic = 0; ic < rs.q0s.size(); ++ic) {
    const BallDesign& design = result.designs[shared_ball ? 0 : ic];
    for (Strategy strategy : config.strategies) {
      const auto emit = [&](const std::string& file, const std::vector<double>& sample_norms,
                            double final_norm, std::uint64_t fallbacks,
                            const std::string& flags, double alpha) {
        const std::string rp = "run" + std::to_string(run_index) + ".";
        entries.emplace_back(rp + "file", file);
        entries.emplace_back(rp + "strategy", strategy_name(strategy));
        entries.emplace_back(rp + "ic", std::to_string(ic));
        entries.emplace_back(rp + "ball", std::to_string(shared_ball ? 0 : ic));
        if (alpha > 0.0) entries.emplace_back(rp + "alpha", format_exact(alpha));
        entries.emplace_back(rp + "initial_norm",
                             format_exact(norm(rs.q0s[ic] - rs.qref)));
        entries.emplace_back(rp + "final_norm", format_exact(final_norm));
        if (!sample_norms.empty()) {
          std::string joined;
          for (std::size_t h = 0; h < sample_norms.size(); ++h) {
            if (h) joined += ',';
            joined += format_exact(sample_norms[h]);
          }
          entries.emplace_back(rp + "sample_norms", joined);
        }
        entries.emplace_back(rp + "fallback_windows", std::to_string(fallbacks));
        if (!flags.empty()) entries.emplace_back(rp + "flags", flags);
        ++run_index;
      };

      if (config.alphas.empty()) {
        const std::string file = config.name + "_" + strategy_name(strategy) + "_ic" +
                                 std::to_string(ic) + ".csv";
        const std::string path = (std::filesystem::path(config.out_dir) / file).string();
        KinematicRun run;
        if (strategy == Strategy::continuous) {
          run = integrate_kinematic_continuous(*sys, rs.q0s[ic], design.ball,
                                               design.schedule.scaled_expanded(layout), t_end,
                                               dt_kin);
        } else {
          run = integrate_kinematic_sampled(*sys, rs.q0s[ic], design.ball, design.schedule,
                                            strategy, t_end, dt_kin);
        }
        write_run_csv(path, run, design.ball);
        result.csv_files.push_back(path);
        emit(file, run.sample_norms, run.error_norms.back(), run.fallback_windows, "", 0.0);
      } else {
        for (double alpha : config.alphas) {
          const std::string file = config.name + "_" + strategy_name(strategy) + "_alpha" +
                                   alpha_tag(alpha) + "_ic" + std::to_string(ic) + ".csv";
          const std::string path = (std::filesystem::path(config.out_dir) / file).string();
          double dt = config.dt;
          if (dt <= 0.0) {
            const long long n_sub = std::max<long long>(
                256, static_cast<long long>(std::ceil(10.0 * alpha * config.period - 1e-9)));
            dt = config.period / static_cast<double>(n_sub);
          }
          const Eigen::VectorXd qd0 = Eigen::VectorXd::Zero(layout.config_dim());
          const DynamicRun run = integrate_dynamic(*sys, params, rs.q0s[ic], qd0, design.ball,
                                                   design.schedule, strategy, alpha, t_end, dt);
          write_run_csv(path, run, design.ball);
          result.csv_files.push_back(path);
          std::string flags;
          if (run.ball_exited) flags += "ball_exited";
          if (run.diverged) flags += flags.empty() ? "diverged" : ",diverged";
          emit(file, run.sample_norms,
               run.error_norms.empty() ? 0.0 : run.error_norms.back(), run.fallback_windows,
               flags, alpha);
        }
      }
    }
  }

  result.report_text = serialize_report(entries);
  const std::string report_file = config.name + "_report.txt";
  result.report_path = (std::filesystem::path(config.out_dir) / report_file).string();
  std::ofstream out(result.report_path, std::ios::binary);
  if (!out) throw RunError("cannot open report '" + result.report_path + "' for writing");
  out << result.report_text;
  if (!out) throw RunError("write to report '" + result.report_path + "' failed");
  return result;
}

std::string design_report(const ExperimentConfig& config) {
  config.validate();
  const std::unique_ptr<KinematicSystem> sys = make_system(config);
  const BlockLayout& layout = sys->layout();
  const Eigen::VectorXd d_blocks = config.d_blocks.size()
                                       ? config.d_blocks
                                       : Eigen::VectorXd::Ones(layout.num_agents() + 1);
  const WeightedNorm norm(layout, d_blocks, config.norm_kind, config.norm_variant);
  const ResolvedScenario rs = resolve(config, *sys, norm);

  auto entries = header_entries(config, rs);
  const std::vector<BallDesign> designs = design_balls(config, *sys);
  for (std::size_t i = 0; i < designs.size(); ++i) append_design(entries, designs[i], i);
  return serialize_report(entries);
}

std::vector<std::pair<std::string, std::string>> parse_report(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t sep = line.find(" = ");
    if (sep == std::string::npos) {
      throw StructuralError("report line without ' = ' separator: '" + line + "'");
    }
    entries.emplace_back(line.substr(0, sep), line.substr(sep + 3));
  }
  return entries;
}

std::string serialize_report(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [key, value] : entries) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace coopman
