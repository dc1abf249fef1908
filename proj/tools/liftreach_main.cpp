// Command-line front end for the lifted-surrogate reachability pipeline.

#include "liftreach/pipeline.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  bool have_seed = false;
  std::uint64_t seed = 1;
  bool have_degree = false;
  int degree = 3;
  bool have_gamma = false;
  double gamma = 0.999;
  std::vector<double> horizons;
  bool have_grid_res = false;
  int grid_res = 61;
  bool within_horizon = false;
};

liftreach::PipelineConfig make_config(const GlobalArgs& g) {
  liftreach::PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = liftreach::load_config(g.config_path);
  if (g.have_seed) {
    cfg.seed = g.seed;
    cfg.verify.base_seed = g.seed;
  }
  if (g.have_degree) cfg.basis_degree = g.degree;
  if (g.have_gamma) {
    cfg.gamma = g.gamma;
    cfg.verify.gamma = g.gamma;
  }
  if (!g.horizons.empty()) cfg.horizons = g.horizons;
  if (g.have_grid_res) cfg.grid_resolution = g.grid_res;
  if (g.within_horizon) cfg.within_horizon = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted-surrogate reachability pipeline for the ring-road backdoor study"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "Pipeline configuration JSON");
  app.add_option("--out", g.out_dir, "Output directory (default: out)");
  app.add_option("--seed", g.seed, "Override the config seed")->each([&](const std::string&) {
    g.have_seed = true;
  });
  app.add_option("--d", g.degree, "Override the monomial basis degree (odd)")
      ->each([&](const std::string&) { g.have_degree = true; });
  app.add_option("--gamma", g.gamma, "Override the stabilization threshold")
      ->each([&](const std::string&) { g.have_gamma = true; });
  app.add_option("--horizons", g.horizons, "Override the BRS horizons in seconds")
      ->delimiter(',');
  app.add_option("--grid-res", g.grid_res, "Override the grid nodes per axis")
      ->each([&](const std::string&) { g.have_grid_res = true; });
  app.add_flag("--within-horizon", g.within_horizon,
               "BRS membership at any step up to the horizon instead of exactly at it");

  auto* sim = app.add_subcommand("simulate", "Baseline ring-road episode");
  auto* col = app.add_subcommand("collect", "Collect an excitation dataset");
  auto* fit = app.add_subcommand("fit", "Fit and stabilize the lifted surrogate");
  std::string dataset_path;
  fit->add_option("--dataset", dataset_path, "Dataset CSV (default: <out>/dataset.csv)");
  auto* reach = app.add_subcommand("reach", "Backward reachable sets of the trigger set");
  std::string model_path;
  reach->add_option("--model", model_path, "Model JSON (default: <out>/model.json)");
  auto* act = app.add_subcommand("activate", "Closed-loop activation validation");
  std::string act_model;
  std::vector<std::string> act_chains;
  act->add_option("--model", act_model, "Model JSON (default: <out>/model.json)");
  act->add_option("--brs", act_chains,
                  "Chain JSON files (default: chains for the config horizons in <out>)");
  auto* ver = app.add_subcommand("verify", "Surrogate-quality study on the benchmark plant");
  auto* chk = app.add_subcommand("check-manifest", "Re-digest the outputs listed in a manifest");
  std::string chk_dir;
  chk->add_option("--dir", chk_dir, "Directory holding manifest.json (default: <out>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    liftreach::PipelineConfig cfg = make_config(g);
    if (sim->parsed()) return liftreach::cmd_simulate(cfg, g.out_dir);
    if (col->parsed()) return liftreach::cmd_collect(cfg, g.out_dir);
    if (fit->parsed()) {
      if (dataset_path.empty()) dataset_path = g.out_dir + "/dataset.csv";
      return liftreach::cmd_fit(cfg, dataset_path, g.out_dir);
    }
    if (reach->parsed()) {
      if (model_path.empty()) model_path = g.out_dir + "/model.json";
      return liftreach::cmd_reach(cfg, model_path, g.out_dir);
    }
    if (act->parsed()) {
      if (act_model.empty()) act_model = g.out_dir + "/model.json";
      if (act_chains.empty())
        for (double t : cfg.horizons)
          act_chains.push_back(g.out_dir + "/chain_horizon_" + liftreach::horizon_tag(t) +
                               ".json");
      return liftreach::cmd_activate(cfg, act_model, act_chains, g.out_dir);
    }
    if (ver->parsed()) return liftreach::cmd_verify(cfg, g.out_dir);
    if (chk->parsed()) {
      if (chk_dir.empty()) chk_dir = g.out_dir;
      liftreach::ManifestCheck res = liftreach::check_manifest(chk_dir);
      if (res.ok) {
        std::cout << "manifest ok: " << chk_dir << "\n";
        return 0;
      }
      for (const std::string& p : res.problems) std::cerr << "manifest: " << p << "\n";
      return 4;
    }
  } catch (const liftreach::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const liftreach::IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
