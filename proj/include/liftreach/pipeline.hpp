#pragma once

#include "liftreach/activate.hpp"
#include "liftreach/brs.hpp"
#include "liftreach/csv.hpp"
#include "liftreach/edmdc.hpp"
#include "liftreach/errors.hpp"
#include "liftreach/grid.hpp"
#include "liftreach/model.hpp"
#include "liftreach/ring.hpp"
#include "liftreach/stable.hpp"
#include "liftreach/verify.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftreach {

constexpr const char* kArtifactVersion = "0.1.0";

/// Bad or inconsistent configuration; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  double dt = 0.1;
  StateBounds bounds;
  InputBounds input_bounds;
  IDMParams idm;
  RingConfig ring;
  BackdoorConfig backdoor;
  int basis_degree = 3;
  double gamma = 0.999;
  bool stabilize = true;
  double svd_cutoff = 1e-10;
  int dataset_size = 10000;
  double train_test_split = 0.5;
  int episode_steps = 25;
  int sim_steps = 3000;
  std::vector<double> horizons{0.5, 1.0, 5.0, 10.0};
  int grid_resolution = 61;
  double cfl = 0.5;
  bool within_horizon = false;
  ActivationConfig activation;
  VerifyConfig verify;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (basis_degree < 1 || basis_degree % 2 == 0)
      throw ConfigError("config: basis_degree must be odd and >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("config: gamma must be in (0, 1]");
    if (!(svd_cutoff > 0.0 && svd_cutoff < 1.0))
      throw ConfigError("config: svd_cutoff must be in (0, 1)");
    if (dataset_size < 1) throw ConfigError("config: dataset_size must be positive");
    if (!(train_test_split > 0.0 && train_test_split < 1.0))
      throw ConfigError("config: train_test_split must be in (0, 1)");
    if (episode_steps < 1 || sim_steps < 1)
      throw ConfigError("config: episode and simulation lengths must be positive");
    if (horizons.empty()) throw ConfigError("config: need at least one horizon");
    for (double h : horizons)
      if (!(h > 0.0)) throw ConfigError("config: horizons must be positive");
    if (grid_resolution < 2) throw ConfigError("config: grid_resolution must be >= 2");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("config: cfl must be in (0, 1]");
    if (activation.samples_per_horizon < 1)
      throw ConfigError("config: activation.samples_per_horizon must be positive");
    if (!(activation.terminal_tol > 0.0))
      throw ConfigError("config: activation.terminal_tol must be positive");
    if (!(bounds.v_max > 0.0) || !(bounds.dd_max > bounds.dd_min))
      throw ConfigError("config: state bounds are inconsistent");
    if (!(input_bounds.a_min <= 0.0 && input_bounds.a_max >= 0.0 &&
          input_bounds.a_min < input_bounds.a_max))
      throw ConfigError("config: input bounds must bracket zero");
    try {
      ring.validate();
      idm.validate();
      backdoor.trigger.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
};

inline ordered_json config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["bounds"] = {{"v_max", c.bounds.v_max}, {"dd_min", c.bounds.dd_min}, {"dd_max", c.bounds.dd_max}};
  j["input_bounds"] = {{"a_min", c.input_bounds.a_min}, {"a_max", c.input_bounds.a_max}};
  j["idm"] = {{"v0", c.idm.v0}, {"T", c.idm.T},         {"a", c.idm.a},
              {"b", c.idm.b},   {"delta", c.idm.delta}, {"s0", c.idm.s0}};
  j["ring"] = {{"track_length", c.ring.track_length},
               {"n_vehicles", c.ring.n_vehicles},
               {"vehicle_length", c.ring.vehicle_length},
               {"av_index", c.ring.av_index},
               {"adversary_index", c.ring.adversary_index},
               {"av_headway_scale", c.ring.av_headway_scale}};
  j["backdoor"] = {{"enabled", c.backdoor.enabled},
                   {"t_adv", c.backdoor.trigger.t_adv},
                   {"a_adv", c.backdoor.trigger.a_adv}};
  j["basis_degree"] = c.basis_degree;
  j["gamma"] = c.gamma;
  j["stabilize"] = c.stabilize;
  j["svd_cutoff"] = c.svd_cutoff;
  j["dataset_size"] = c.dataset_size;
  j["train_test_split"] = c.train_test_split;
  j["episode_steps"] = c.episode_steps;
  j["sim_steps"] = c.sim_steps;
  j["horizons"] = c.horizons;
  j["grid_resolution"] = c.grid_resolution;
  j["cfl"] = c.cfl;
  j["within_horizon"] = c.within_horizon;
  j["activation"] = {{"samples_per_horizon", c.activation.samples_per_horizon},
                     {"box_x1", c.activation.box_x1},
                     {"box_x2", c.activation.box_x2},
                     {"box_x3", c.activation.box_x3},
                     {"follow_through_s", c.activation.follow_through_s},
                     {"terminal_tol", c.activation.terminal_tol}};
  j["verify"] = {{"n_seeds", c.verify.n_seeds},
                 {"n_train", c.verify.n_train},
                 {"n_test", c.verify.n_test},
                 {"noise_std", c.verify.noise_std},
                 {"radius", c.verify.radius}};
  return j;
}

inline PipelineConfig config_from_json(const ordered_json& j) {
  PipelineConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.dt = j.value("dt", c.dt);
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      c.bounds.v_max = b.value("v_max", c.bounds.v_max);
      c.bounds.dd_min = b.value("dd_min", c.bounds.dd_min);
      c.bounds.dd_max = b.value("dd_max", c.bounds.dd_max);
    }
    if (j.contains("input_bounds")) {
      const auto& b = j.at("input_bounds");
      c.input_bounds.a_min = b.value("a_min", c.input_bounds.a_min);
      c.input_bounds.a_max = b.value("a_max", c.input_bounds.a_max);
    }
    if (j.contains("idm")) {
      const auto& b = j.at("idm");
      c.idm.v0 = b.value("v0", c.idm.v0);
      c.idm.T = b.value("T", c.idm.T);
      c.idm.a = b.value("a", c.idm.a);
      c.idm.b = b.value("b", c.idm.b);
      c.idm.delta = b.value("delta", c.idm.delta);
      c.idm.s0 = b.value("s0", c.idm.s0);
    }
    if (j.contains("ring")) {
      const auto& b = j.at("ring");
      c.ring.track_length = b.value("track_length", c.ring.track_length);
      c.ring.n_vehicles = b.value("n_vehicles", c.ring.n_vehicles);
      c.ring.vehicle_length = b.value("vehicle_length", c.ring.vehicle_length);
      c.ring.av_index = b.value("av_index", c.ring.av_index);
      c.ring.adversary_index = b.value("adversary_index", c.ring.adversary_index);
      c.ring.av_headway_scale = b.value("av_headway_scale", c.ring.av_headway_scale);
    }
    if (j.contains("backdoor")) {
      const auto& b = j.at("backdoor");
      c.backdoor.enabled = b.value("enabled", c.backdoor.enabled);
      c.backdoor.trigger.t_adv = b.value("t_adv", c.backdoor.trigger.t_adv);
      c.backdoor.trigger.a_adv = b.value("a_adv", c.backdoor.trigger.a_adv);
    }
    c.basis_degree = j.value("basis_degree", c.basis_degree);
    c.gamma = j.value("gamma", c.gamma);
    c.stabilize = j.value("stabilize", c.stabilize);
    c.svd_cutoff = j.value("svd_cutoff", c.svd_cutoff);
    c.dataset_size = j.value("dataset_size", c.dataset_size);
    c.train_test_split = j.value("train_test_split", c.train_test_split);
    c.episode_steps = j.value("episode_steps", c.episode_steps);
    c.sim_steps = j.value("sim_steps", c.sim_steps);
    if (j.contains("horizons")) c.horizons = j.at("horizons").get<std::vector<double>>();
    c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
    c.cfl = j.value("cfl", c.cfl);
    c.within_horizon = j.value("within_horizon", c.within_horizon);
    if (j.contains("activation")) {
      const auto& b = j.at("activation");
      c.activation.samples_per_horizon =
          b.value("samples_per_horizon", c.activation.samples_per_horizon);
      if (b.contains("box_x1")) c.activation.box_x1 = b.at("box_x1").get<std::array<double, 2>>();
      if (b.contains("box_x2")) c.activation.box_x2 = b.at("box_x2").get<std::array<double, 2>>();
      if (b.contains("box_x3")) c.activation.box_x3 = b.at("box_x3").get<std::array<double, 2>>();
      c.activation.follow_through_s = b.value("follow_through_s", c.activation.follow_through_s);
      c.activation.terminal_tol = b.value("terminal_tol", c.activation.terminal_tol);
    }
    if (j.contains("verify")) {
      const auto& b = j.at("verify");
      c.verify.n_seeds = b.value("n_seeds", c.verify.n_seeds);
      c.verify.n_train = b.value("n_train", c.verify.n_train);
      c.verify.n_test = b.value("n_test", c.verify.n_test);
      c.verify.noise_std = b.value("noise_std", c.verify.noise_std);
      c.verify.radius = b.value("radius", c.verify.radius);
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.verify.gamma = c.gamma;
  c.verify.dt = c.dt;
  c.verify.base_seed = c.seed;
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string config_hash(const PipelineConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64_str(config_to_json(c).dump())));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Run manifest: command, config hash, and a digest per output file.

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

inline std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline void write_manifest(const std::string& out_dir, const std::string& command,
                           const PipelineConfig& cfg, const std::vector<std::string>& files) {
  ordered_json j;
  j["schema_version"] = 1;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["created_utc"] = utc_timestamp();
  ordered_json outs = ordered_json::array();
  for (const std::string& rel : files) {
    std::string full = out_dir + "/" + rel;
    ordered_json o;
    o["path"] = rel;
    o["bytes"] = static_cast<std::uint64_t>(std::filesystem::file_size(full));
    o["fnv1a64"] = digest_hex(fnv1a64_file(full));
    outs.push_back(o);
  }
  j["outputs"] = outs;
  std::ofstream f(out_dir + "/manifest.json");
  if (!f) throw IOError("cannot open for writing: " + out_dir + "/manifest.json");
  f << j.dump(2) << '\n';
  if (!f) throw IOError("write failed: " + out_dir + "/manifest.json");
}

struct ManifestCheck {
  bool ok = true;
  std::vector<std::string> problems;
};

inline ManifestCheck check_manifest(const std::string& dir) {
  ManifestCheck res;
  std::string path = dir + "/manifest.json";
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  ordered_json j = ordered_json::parse(f);
  for (const auto& o : j.at("outputs")) {
    std::string rel = o.at("path").get<std::string>();
    std::string full = dir + "/" + rel;
    if (!std::filesystem::exists(full)) {
      res.ok = false;
      res.problems.push_back(rel + ": missing");
      continue;
    }
    auto bytes = static_cast<std::uint64_t>(std::filesystem::file_size(full));
    if (bytes != o.at("bytes").get<std::uint64_t>()) {
      res.ok = false;
      res.problems.push_back(rel + ": size changed");
      continue;
    }
    if (digest_hex(fnv1a64_file(full)) != o.at("fnv1a64").get<std::string>()) {
      res.ok = false;
      res.problems.push_back(rel + ": digest changed");
    }
  }
  return res;
}

inline void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create output directory: " + out_dir);
}

// ---------------------------------------------------------------------------
// Commands. Each writes its artifacts plus manifest.json into out_dir.

inline int cmd_simulate(const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  std::mt19937_64 rng(cfg.seed);
  RingState st = init_ring_perturbed(cfg.ring, cfg.idm, rng);
  EpisodeResult ep = run_episode(st, cfg.ring, cfg.idm, cfg.backdoor,
                                 idm_adversary_policy(cfg.ring, cfg.idm), cfg.sim_steps, cfg.dt);
  write_vehicle_log_csv(ep.log, out_dir + "/ring_log.csv");
  write_trajectory_csv(ep.obs, out_dir + "/trajectory.csv");
  ordered_json j;
  j["steps"] = static_cast<int>(ep.obs.steps());
  j["collided"] = ep.collided;
  j["collision_step"] = ep.collision_step;
  j["first_trigger_step"] = ep.first_trigger_step;
  j["n_triggers"] = ep.n_triggers;
  std::ofstream f(out_dir + "/simulate_summary.json");
  if (!f) throw IOError("cannot open for writing: " + out_dir + "/simulate_summary.json");
  f << j.dump(2) << '\n';
  f.close();
  write_manifest(out_dir, "simulate", cfg,
                 {"ring_log.csv", "trajectory.csv", "simulate_summary.json"});
  std::cout << "simulate: " << ep.obs.steps() << " steps, "
            << (ep.collided ? "collision" : "no collision") << "\n";
  return 0;
}

inline int cmd_collect(const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  Dataset data = collect_dataset(cfg.ring, cfg.idm, cfg.bounds, cfg.input_bounds,
                                 cfg.dataset_size, cfg.seed, cfg.dt, cfg.episode_steps);
  write_dataset_csv(data, out_dir + "/dataset.csv");
  write_manifest(out_dir, "collect", cfg, {"dataset.csv"});
  std::cout << "collect: " << data.size() << " transitions -> " << out_dir << "/dataset.csv\n";
  return 0;
}

inline int cmd_fit(const PipelineConfig& cfg, const std::string& dataset_path,
                   const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  Dataset data = read_dataset_csv(dataset_path);
  if (data.empty()) throw std::invalid_argument("fit: dataset is empty");
  auto n_train = static_cast<std::size_t>(
      std::max<double>(1.0, std::floor(data.size() * cfg.train_test_split)));
  n_train = std::min(n_train, data.size());
  Dataset train(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n_train));
  Dataset test(data.begin() + static_cast<std::ptrdiff_t>(n_train), data.end());

  FitOptions fo;
  fo.svd_cutoff = cfg.svd_cutoff;
  FitResult fit = fit_edmdc(train, cfg.basis_degree, cfg.dt, fo);
  save_model(fit.model, out_dir + "/model_raw.json");

  LiftedModel final_model = fit.model;
  StabilizeResult st;
  if (cfg.stabilize) {
    st = project_stable(fit.model.A, cfg.gamma);
    final_model.A = st.A;
    final_model.gamma = cfg.gamma;
    final_model.tag = StabilityTag::kGammaStable;
    final_model.validate();
  }
  save_model(final_model, out_dir + "/model.json");

  double eps_raw = 0.0, eps_final = 0.0;
  const Dataset& eval = test.empty() ? train : test;
  for (double v : one_step_residuals(fit.model, eval)) eps_raw = std::max(eps_raw, v);
  for (double v : one_step_residuals(final_model, eval)) eps_final = std::max(eps_final, v);

  ordered_json j;
  j["n_train"] = static_cast<std::uint64_t>(train.size());
  j["n_test"] = static_cast<std::uint64_t>(eval.size());
  j["rank"] = fit.rank;
  j["rank_deficient"] = fit.rank_deficient;
  j["residual_rms_train"] = fit.residual_rms;
  j["eps_raw"] = eps_raw;
  j["eps_final"] = eps_final;
  j["rho_raw"] = spectral_radius(fit.model.A);
  j["rho_final"] = spectral_radius(final_model.A);
  j["stabilized"] = cfg.stabilize;
  j["already_stable"] = st.already_stable;
  j["used_fallback"] = st.used_fallback;
  j["projection_distance"] = st.distance;
  j["projection_iterations"] = st.iterations;
  ordered_json mod = ordered_json::array();
  for (double m : eigen_moduli(final_model.A)) mod.push_back(m);
  j["eigen_moduli_final"] = mod;
  std::ofstream f(out_dir + "/fit_report.json");
  if (!f) throw IOError("cannot open for writing: " + out_dir + "/fit_report.json");
  f << j.dump(2) << '\n';
  f.close();
  write_manifest(out_dir, "fit", cfg, {"model_raw.json", "model.json", "fit_report.json"});
  std::cout << "fit: d=" << cfg.basis_degree << " rank=" << fit.rank
            << " rho_raw=" << spectral_radius(fit.model.A)
            << " rho_final=" << spectral_radius(final_model.A) << "\n";
  if (fit.rank_deficient)
    std::cout << "fit: warning: regressor rank deficient, minimum-norm solution used\n";
  return 0;
}

inline std::string horizon_tag(double t) { return fmt_double(t); }

inline int cmd_reach(const PipelineConfig& cfg, const std::string& model_path,
                     const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  LiftedModel model = load_model(model_path);
  MonomialBasis basis = model.basis();
  HalfspaceTarget target = lifted_target(cfg.backdoor.trigger, basis);
  std::vector<std::string> files;
  for (double t : cfg.horizons) {
    int K = static_cast<int>(std::llround(t / model.dt));
    if (K < 0 || std::abs(K * model.dt - t) > 1e-9)
      throw std::invalid_argument("reach: horizon is not a multiple of dt");
    BRSChain chain = brs_halfspace(model, target, K, cfg.input_bounds, cfg.within_horizon);
    std::string tag = horizon_tag(t);
    save_chain(chain, out_dir + "/chain_horizon_" + tag + ".json");
    files.push_back("chain_horizon_" + tag + ".json");
    auto pts = brs_boundary_points(chain, basis, cfg.bounds, K);
    write_boundary_csv(pts, out_dir + "/brs_boundary_horizon_" + tag + ".csv");
    files.push_back("brs_boundary_horizon_" + tag + ".csv");
    if (model.N == 3) {
      LinearSystem3 sys = lifted_to_linear(model);
      GridAxes axes;
      axes.lo = {0.0, 0.0, cfg.bounds.dd_min};
      axes.hi = {cfg.bounds.v_max, cfg.bounds.v_max, cfg.bounds.dd_max};
      axes.n = {cfg.grid_resolution, cfg.grid_resolution, cfg.grid_resolution};
      Eigen::Vector3d w0(target.w(0), target.w(1), target.w(2));
      ValueGrid grid = brs_grid(sys, w0, target.c, axes, t, cfg.input_bounds, cfg.cfl);
      save_grid(grid, out_dir + "/value_grid_horizon_" + tag + ".json");
      files.push_back("value_grid_horizon_" + tag + ".json");
    }
    std::cout << "reach: horizon " << t << " s -> K=" << K << " steps\n";
  }
  write_manifest(out_dir, "reach", cfg, files);
  return 0;
}

inline int cmd_activate(const PipelineConfig& cfg, const std::string& model_path,
                        const std::vector<std::string>& chain_paths,
                        const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  LiftedModel model = load_model(model_path);
  std::string digest = model_digest(model);
  std::vector<std::string> files;
  for (const std::string& cp : chain_paths) {
    BRSChain chain = load_chain(cp);
    if (chain.source_model != digest)
      throw std::invalid_argument("activate: chain " + cp + " was not built from this model");
    ActivationResult res = validate_activation(model, chain, cfg.backdoor.trigger, cfg.ring,
                                               cfg.idm, cfg.input_bounds, cfg.activation,
                                               cfg.seed);
    std::string tag = horizon_tag(chain.K * model.dt);
    std::string rep = "activation_report_horizon_" + tag + ".json";
    std::ofstream f(out_dir + "/" + rep);
    if (!f) throw IOError("cannot open for writing: " + out_dir + "/" + rep);
    f << activation_report_to_json(res.report).dump(2) << '\n';
    files.push_back(rep);

    std::string det = "activation_samples_horizon_" + tag + ".csv";
    std::ofstream g(out_dir + "/" + det);
    if (!g) throw IOError("cannot open for writing: " + out_dir + "/" + det);
    g << "x1,x2,x3,plan_steps,trigger_step,collision_step,err_x1,err_x2,err_x3\n";
    for (const ActivationSample& s : res.samples)
      g << fmt_double(s.x0(0)) << ',' << fmt_double(s.x0(1)) << ',' << fmt_double(s.x0(2)) << ','
        << s.plan_steps << ',' << s.trigger_step << ',' << s.collision_step << ','
        << fmt_double(s.terminal_err[0]) << ',' << fmt_double(s.terminal_err[1]) << ','
        << fmt_double(s.terminal_err[2]) << '\n';
    files.push_back(det);
    std::cout << "activate: horizon " << chain.K * model.dt << " s rate=" << res.report.rate
              << " collisions=" << res.report.n_collisions << "\n";
  }
  write_manifest(out_dir, "activate", cfg, files);
  return 0;
}

inline int cmd_verify(const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_out_dir(out_dir);
  VerifyReport rep = run_verify_experiment(cfg.verify);

  ordered_json j;
  j["n_seeds"] = rep.cfg.n_seeds;
  j["noise_std"] = rep.cfg.noise_std;
  j["gamma"] = rep.cfg.gamma;
  j["mean_eps_raw"] = rep.mean_eps_ls;
  j["mean_eps_stable"] = rep.mean_eps_stable;
  ordered_json seeds = ordered_json::array();
  for (const VerifySeedResult& r : rep.seeds) {
    ordered_json s;
    s["eps_raw"] = r.eps_ls;
    s["eps_stable"] = r.eps_stable;
    s["sigma_stable"] = r.sigma_stable;
    s["max_r_stable"] = r.max_r_stable;
    s["bound_ok"] = r.bound_ok;
    s["rho_raw"] = r.rho_ls;
    s["rho_stable"] = r.rho_stable;
    s["moduli_stable"] = {r.moduli_stable(0), r.moduli_stable(1), r.moduli_stable(2)};
    seeds.push_back(s);
  }
  j["seeds"] = seeds;
  std::ofstream f(out_dir + "/verify_report.json");
  if (!f) throw IOError("cannot open for writing: " + out_dir + "/verify_report.json");
  f << j.dump(2) << '\n';
  f.close();

  std::ofstream g(out_dir + "/verify_curves.csv");
  if (!g) throw IOError("cannot open for writing: " + out_dir + "/verify_curves.csv");
  g << "k,mean_r_raw,std_r_raw,mean_r_stable,std_r_stable\n";
  for (std::size_t k = 0; k < rep.mean_r_ls.size(); ++k)
    g << k << ',' << fmt_double(rep.mean_r_ls[k]) << ',' << fmt_double(rep.std_r_ls[k]) << ','
      << fmt_double(rep.mean_r_stable[k]) << ',' << fmt_double(rep.std_r_stable[k]) << '\n';
  g.close();

  write_manifest(out_dir, "verify", cfg, {"verify_report.json", "verify_curves.csv"});
  int bound_ok = 0;
  for (const VerifySeedResult& r : rep.seeds) bound_ok += r.bound_ok ? 1 : 0;
  std::cout << "verify: " << bound_ok << "/" << rep.seeds.size()
            << " seeds within the propagation bound\n";
  return 0;
}

}  // namespace liftreach
