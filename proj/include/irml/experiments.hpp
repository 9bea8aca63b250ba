#pragma once
#include <string>
#include <vector>

#include "irml/config.hpp"

namespace irml {

// Resolved run parameters for every experiment; defaults are desk-scale
// (minutes, <= 2000-entity graphs) unless `full` is set.
struct ExperimentConfig {
  std::string id;
  uint64_t seed = 1;
  int n_seeds = 5;  // seed replicates averaged inside an experiment
  std::vector<double> snr_db = {0, 2, 4, 6, 8};
  int servers = 3;
  int local_steps = 5;
  int rounds = 40;
  double noniid_p = 1.0;
  std::string out_dir;      // default runs/<id>
  std::string data_dir;     // real dataset directory; empty -> synthetic
  bool force = false;
  bool full = false;

  // graph / codec
  int max_entities = 800;
  std::vector<int> layer_thresholds = {50, 6};
  int codec_dim = 8;
  int codec_epochs = 120;
  double codec_lr = 0.01;
  double codec_margin = 1.0;
  int codec_batch = 128;

  // messaging / decoding
  int n_messages = 400;
  int path_len = 3;
  double alpha = 0.35;

  // imitation
  int updates = 1500;
  int batch = 16;
  int j_steps = 2;
  double policy_lr = 0.05;
  double eval_lr = 0.1;
  double lambda = 1e-2;

  // classification proxy
  int gcn_hidden = 32;
  double gcn_lr = 0.2;
  int class_entities = 1200;
  int class_feature_dim = 96;

  // bound check
  int bound_dim = 12;
  double bound_mu = 0.5;
  double bound_l = 4.0;

  static const std::vector<std::string>& known_ids();
  static ExperimentConfig resolve(const std::string& id,
                                  const KeyValueConfig& kv);
};

// Runs one experiment: creates out_dir (refusing to overwrite without force),
// writes CSVs + SVG charts + manifest.json.  Throws Config/Data/ComputeError.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace irml
