#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "irml/errors.hpp"
#include "irml/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"implicit semantic communication laboratory"};
  app.name("irml");

  std::string experiment;
  std::string config_path, snr_list, out_dir;
  int64_t seed = -1;
  int servers = -1, local_steps = -1, rounds = -1;
  double noniid_p = -1;
  bool force = false, full = false;

  std::string id_help = "experiment id (";
  for (size_t i = 0; i < irml::ExperimentConfig::known_ids().size(); ++i)
    id_help += (i ? ", " : "") + irml::ExperimentConfig::known_ids()[i];
  id_help += ")";
  app.add_option("experiment", experiment, id_help)->required();
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--snr-db", snr_list, "comma-separated SNR grid in dB");
  app.add_option("--servers", servers, "server count K");
  app.add_option("--local-steps", local_steps, "local steps per round E");
  app.add_option("--rounds", rounds, "aggregation rounds T");
  app.add_option("--noniid-p", noniid_p, "non-iid mixing degree p in [0,1]");
  app.add_option("--out", out_dir, "output directory (default runs/<id>)");
  app.add_flag("--force", force, "overwrite an existing output directory");
  app.add_flag("--full", full, "run on the full dataset, not the subgraph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    irml::KeyValueConfig kv;
    if (!config_path.empty()) kv = irml::KeyValueConfig::parse_file(config_path);
    if (seed >= 0) kv.set("seed", std::to_string(seed));
    if (!snr_list.empty()) kv.set("snr_db", snr_list);
    if (servers >= 0) kv.set("servers", std::to_string(servers));
    if (local_steps >= 0) kv.set("local_steps", std::to_string(local_steps));
    if (rounds >= 0) kv.set("rounds", std::to_string(rounds));
    if (noniid_p >= 0) kv.set("noniid_p", std::to_string(noniid_p));
    if (!out_dir.empty()) kv.set("out", out_dir);
    if (force) kv.set("force", "1");
    if (full) kv.set("full", "1");

    irml::ExperimentConfig cfg =
        irml::ExperimentConfig::resolve(experiment, kv);
    irml::run_experiment(cfg);
    std::cout << "wrote " << cfg.out_dir << "\n";
    return 0;
  } catch (const irml::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const irml::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const irml::ComputeError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
