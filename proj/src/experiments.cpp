#include "irml/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "irml/channel.hpp"
#include "irml/csv.hpp"
#include "irml/decoder.hpp"
#include "irml/federation.hpp"
#include "irml/gcn.hpp"
#include "irml/svg.hpp"
#include "irml/synth.hpp"

namespace irml {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- plumbing -------------------------------------------------------------

struct RunContext {
  const ExperimentConfig& cfg;
  fs::path out;
  json manifest;
  std::map<std::string, long> csv_rows;

  explicit RunContext(const ExperimentConfig& c) : cfg(c), out(c.out_dir) {}

  std::string path(const std::string& name) const {
    return (out / name).string();
  }
  void note_csv(const std::string& name, long rows) { csv_rows[name] = rows; }
};

uint64_t hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open input file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return fnv1a64(ss.str());
}

void prepare_out_dir(const ExperimentConfig& cfg) {
  fs::path p(cfg.out_dir);
  if (fs::exists(p) && !fs::is_empty(p) && !cfg.force)
    throw DataError("output directory exists: " + cfg.out_dir +
                    " (pass --force to overwrite)");
  fs::create_directories(p);
}

// ---- substrates -------------------------------------------------------------

KnowledgeGraph triples_substrate(const ExperimentConfig& cfg, json& manifest) {
  if (!cfg.data_dir.empty()) {
    std::string path = cfg.data_dir + "/train.txt";
    if (!fs::exists(path))
      throw DataError("dataset file missing: " + path);
    manifest["inputs"].push_back(
        {{"path", path}, {"fnv1a64", hex64(hash_file(path))}});
    KnowledgeGraph full = load_triples(path);
    if (cfg.full || full.n_entities() <= cfg.max_entities) {
      manifest["substrate"] = "dataset:" + path;
      return full;
    }
    manifest["substrate"] = "dataset-subgraph:" + path;
    return induced_subgraph(full, cfg.max_entities, derive_seed(cfg.seed, 21));
  }
  ScaleFreeSpec spec;
  spec.n_entities = cfg.max_entities;
  spec.n_relations = 24;
  spec.edges_per_node = 3;
  spec.seed = derive_seed(cfg.seed, 21);
  manifest["substrate"] = "synthetic:scale_free(n=" +
                          std::to_string(spec.n_entities) + ",m=3,r=24)";
  return synth_scale_free_kg(spec);
}

KnowledgeGraph ladder_substrate(const ExperimentConfig& cfg, json& manifest) {
  if (!cfg.data_dir.empty()) return triples_substrate(cfg, manifest);
  DegreeLadderSpec spec;
  spec.n_per_level = 40;
  spec.n_relations = 12;
  spec.seed = derive_seed(cfg.seed, 22);
  manifest["substrate"] = "synthetic:degree_ladder(levels=10..90,n=200)";
  return synth_degree_ladder_kg(spec);
}

KnowledgeGraph citation_substrate(const ExperimentConfig& cfg,
                                  const std::string& name, int n_subjects,
                                  double size_scale, json& manifest) {
  if (!cfg.data_dir.empty()) {
    std::string content = cfg.data_dir + "/" + name + ".content";
    std::string cites = cfg.data_dir + "/" + name + ".cites";
    if (!fs::exists(content) || !fs::exists(cites))
      throw DataError("dataset files missing: " + content + " / " + cites);
    manifest["inputs"].push_back(
        {{"path", content}, {"fnv1a64", hex64(hash_file(content))}});
    manifest["inputs"].push_back(
        {{"path", cites}, {"fnv1a64", hex64(hash_file(cites))}});
    manifest["substrate"] = "dataset:" + content;
    return load_planetoid(content, cites).kg;
  }
  CitationSpec spec;
  spec.n_entities = std::max(60, int(cfg.class_entities * size_scale));
  spec.n_subjects = n_subjects;
  spec.feature_dim = cfg.class_feature_dim;
  spec.seed = derive_seed(cfg.seed, fnv1a64(name));
  manifest["substrates"].push_back(
      name + ":synthetic:citation(n=" + std::to_string(spec.n_entities) +
      ",subjects=" + std::to_string(n_subjects) + ")");
  return synth_citation_graph(spec);
}

// ---- messaging pipeline ------------------------------------------------------

constexpr int kPilotSymbols = 4;

// Strip the pilot prefix so decoders only see payload spans.
ReceivedSignal payload_part(const ReceivedSignal& rx, int skip_spans) {
  int cut = rx.spans[skip_spans].offset;
  ReceivedSignal out;
  out.samples.assign(rx.samples.begin() + cut, rx.samples.end());
  for (size_t i = skip_spans; i < rx.spans.size(); ++i) {
    SymbolSpan sp = rx.spans[i];
    sp.offset -= cut;
    out.spans.push_back(sp);
  }
  out.gain = rx.gain;
  out.noise_var = rx.noise_var;
  return out;
}

struct DecodedMessage {
  std::vector<EntityId> hard;
  std::vector<EntityId> assisted;
  std::vector<EntityId> truth;
};

// Transmit pilot + path entities through the channel, estimate the gain from
// the pilot, and decode the payload both ways.
DecodedMessage send_and_decode(const KnowledgeGraph& kg,
                               const EmbeddingTable& table,
                               const ReasoningPath& path,
                               const ChannelModel& model,
                               uint64_t message_index, double alpha,
                               const LayerAssignment* layers,
                               bool layer_tags) {
  std::vector<EntityId> payload{path.origin};
  std::vector<RelationId> rels;
  for (const PathStep& st : path.steps) {
    payload.push_back(st.entity);
    rels.push_back(st.rel);
  }
  std::vector<EntityId> sent;
  for (int i = 0; i < kPilotSymbols; ++i) sent.push_back(i);
  sent.insert(sent.end(), payload.begin(), payload.end());

  EncodedSignal sig = encode_entities(sent, table);
  ReceivedSignal rx = transmit(sig, model, message_index);

  const int pilot_len = kPilotSymbols * table.dim;
  std::vector<double> sp(sig.samples.begin(), sig.samples.begin() + pilot_len);
  std::vector<double> rp(rx.samples.begin(), rx.samples.begin() + pilot_len);
  ChannelEstimate est = estimate_channel(sp, rp);

  ReceivedSignal body = payload_part(rx, kPilotSymbols);
  DecodedMessage out;
  out.truth = payload;
  out.hard = hard_decode(body, table, est.g_hat);
  RecoveryConfig rc;
  rc.alpha = alpha;
  rc.side_relations = rels;
  rc.layer_schedule = layers;
  if (layer_tags && layers) {
    for (EntityId e : payload) rc.side_layers.push_back(layers->layer[e]);
  }
  out.assisted = recover_with_reasoning(body, kg, table, est.g_hat, rc);
  return out;
}

ReasoningPath random_walk(const KnowledgeGraph& kg, EntityId origin, int steps,
                          Rng& rng) {
  ReasoningPath p;
  p.origin = origin;
  EntityId cur = origin;
  for (int t = 0; t < steps; ++t) {
    const std::vector<Edge>& edges = kg.out[cur];
    if (edges.empty()) break;
    const Edge& e =
        edges[std::uniform_int_distribution<size_t>(0, edges.size() - 1)(rng)];
    p.steps.push_back({e.rel, e.other});
    cur = e.other;
  }
  return p;
}

EmbeddingTable train_table(const KnowledgeGraph& kg,
                           const ExperimentConfig& cfg, uint64_t seed,
                           int dim_override = 0) {
  CodecConfig cc;
  cc.dim = dim_override > 0 ? dim_override : cfg.codec_dim;
  cc.epochs = cfg.codec_epochs;
  cc.lr = cfg.codec_lr;
  cc.margin = cfg.codec_margin;
  cc.batch_size = cfg.codec_batch;
  cc.seed = seed;
  return train_encoder(kg, cc).table;
}

void emit_chart(const RunContext& ctx, const std::string& name,
                const std::vector<SvgSeries>& series, const SvgChartSpec& spec) {
  emit_svg_chart(ctx.path(name), series, spec);
}

// ---- experiments ---------------------------------------------------------------

void run_ser_vs_snr(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  KnowledgeGraph kg = triples_substrate(cfg, ctx.manifest);
  LayerAssignment layers = layer_by_degree(kg, cfg.layer_thresholds);
  const int n_layers = layers.n_layers;

  // accumulate per (snr, mode): overall + per-layer
  std::vector<DecodeReport> hard(cfg.snr_db.size()), asst(cfg.snr_db.size());

  for (int rep = 0; rep < cfg.n_seeds; ++rep) {
    uint64_t rep_seed = derive_seed(cfg.seed, rep);
    EmbeddingTable table = train_table(kg, cfg, rep_seed);
    PathSampleOptions po;
    po.n_paths = cfg.n_messages;
    po.max_len = cfg.path_len;
    po.seed = derive_seed(rep_seed, 31);
    std::vector<ReasoningPath> paths = sample_expert_paths(kg, po);

    for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
      ChannelModel model;
      model.fading = Fading::Rayleigh;
      model.snr_db = cfg.snr_db[si];
      model.seed = derive_seed(rep_seed, 600 + si);
      for (size_t m = 0; m < paths.size(); ++m) {
        DecodedMessage d = send_and_decode(kg, table, paths[m], model, m,
                                           cfg.alpha, &layers, false);
        hard[si].merge(symbol_error_rate(d.hard, d.truth, &layers));
        asst[si].merge(symbol_error_rate(d.assisted, d.truth, &layers));
      }
    }
  }

  CsvWriter csv(ctx.path("ser_vs_snr.csv"));
  csv.row({"snr_db", "layer", "ser_hard", "ser_assisted", "symbols"});
  long rows = 0;
  std::vector<double> snr_x, hard_y, asst_y;
  for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
    if (int(hard[si].per_layer.size()) < n_layers)
      hard[si].per_layer.resize(n_layers);
    if (int(asst[si].per_layer.size()) < n_layers)
      asst[si].per_layer.resize(n_layers);
    csv.row({fmt_g17(cfg.snr_db[si]), "0", fmt_g17(hard[si].overall.ser()),
             fmt_g17(asst[si].overall.ser()),
             std::to_string(hard[si].overall.symbols)});
    ++rows;
    snr_x.push_back(cfg.snr_db[si]);
    hard_y.push_back(hard[si].overall.ser());
    asst_y.push_back(asst[si].overall.ser());
    for (int l = 0; l < n_layers; ++l) {
      csv.row({fmt_g17(cfg.snr_db[si]), std::to_string(l + 1),
               fmt_g17(hard[si].per_layer[l].ser()),
               fmt_g17(asst[si].per_layer[l].ser()),
               std::to_string(hard[si].per_layer[l].symbols)});
      ++rows;
    }
  }
  csv.close();
  ctx.note_csv("ser_vs_snr.csv", rows);

  // per-mode decode reports: snr_db,layer,symbols,errors,ser (layer 0 = all)
  for (int mode = 0; mode < 2; ++mode) {
    const std::vector<DecodeReport>& rep = mode ? asst : hard;
    std::string name =
        mode ? "ser_report_assisted.csv" : "ser_report_hard.csv";
    CsvWriter rc(ctx.path(name));
    rc.row({"snr_db", "layer", "symbols", "errors", "ser"});
    long rrows = 0;
    for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
      rc.row({fmt_g17(cfg.snr_db[si]), "0",
              std::to_string(rep[si].overall.symbols),
              std::to_string(rep[si].overall.errors),
              fmt_g17(rep[si].overall.ser())});
      ++rrows;
      for (int l = 0; l < n_layers; ++l) {
        rc.row({fmt_g17(cfg.snr_db[si]), std::to_string(l + 1),
                std::to_string(rep[si].per_layer[l].symbols),
                std::to_string(rep[si].per_layer[l].errors),
                fmt_g17(rep[si].per_layer[l].ser())});
        ++rrows;
      }
    }
    rc.close();
    ctx.note_csv(name, rrows);
  }

  SvgChartSpec spec;
  spec.title = "Symbol error rate vs SNR";
  spec.x_label = "SNR (dB)";
  spec.y_label = "SER";
  emit_chart(ctx, "ser_vs_snr.svg",
             {{"hard", snr_x, hard_y}, {"assisted", snr_x, asst_y}}, spec);
}

void run_acc_vs_degree(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  KnowledgeGraph kg = ladder_substrate(cfg, ctx.manifest);
  const std::vector<std::pair<int, int>> buckets = {
      {1, 20}, {21, 40}, {41, 60}, {61, 80}, {81, 100}};
  std::vector<std::vector<EntityId>> members(buckets.size());
  for (EntityId e = 0; e < kg.n_entities(); ++e) {
    int d = kg.degree(e);
    for (size_t b = 0; b < buckets.size(); ++b)
      if (d >= buckets[b].first && d <= buckets[b].second)
        members[b].push_back(e);
  }
  for (size_t b = 0; b < buckets.size(); ++b)
    if (members[b].empty())
      throw DataError("degree bucket " + std::to_string(buckets[b].first) +
                      "-" + std::to_string(buckets[b].second) + " is empty");

  const std::vector<double> snrs = {2.0, 8.0};
  const int per_bucket = std::max(10, cfg.n_messages / 5);
  // correct/total per (snr, bucket)
  std::vector<std::vector<long>> correct(snrs.size(),
                                         std::vector<long>(buckets.size(), 0));
  std::vector<std::vector<long>> total = correct;

  for (int rep = 0; rep < cfg.n_seeds; ++rep) {
    uint64_t rep_seed = derive_seed(cfg.seed, rep);
    EmbeddingTable table = train_table(kg, cfg, rep_seed);
    Rng walk_rng(derive_seed(rep_seed, 41));
    for (size_t b = 0; b < buckets.size(); ++b) {
      std::uniform_int_distribution<size_t> dm(0, members[b].size() - 1);
      for (int m = 0; m < per_bucket; ++m) {
        EntityId origin = members[b][dm(walk_rng)];
        ReasoningPath path = random_walk(kg, origin, cfg.path_len, walk_rng);
        for (size_t si = 0; si < snrs.size(); ++si) {
          ChannelModel model;
          model.fading = Fading::Rayleigh;
          model.snr_db = snrs[si];
          model.seed = derive_seed(rep_seed, 700 + si);
          DecodedMessage d =
              send_and_decode(kg, table, path, model,
                              uint64_t(b) * per_bucket + m, cfg.alpha,
                              nullptr, false);
          total[si][b]++;
          correct[si][b] += d.assisted[0] == d.truth[0];
        }
      }
    }
  }

  CsvWriter csv(ctx.path("acc_vs_degree.csv"));
  csv.row({"snr_db", "bucket_lo", "bucket_hi", "symbols", "correct",
           "accuracy"});
  long rows = 0;
  std::vector<SvgSeries> series;
  for (size_t si = 0; si < snrs.size(); ++si) {
    SvgSeries s;
    s.name = "snr=" + std::to_string(int(snrs[si])) + "dB";
    for (size_t b = 0; b < buckets.size(); ++b) {
      double acc = double(correct[si][b]) / total[si][b];
      csv.row({fmt_g17(snrs[si]), std::to_string(buckets[b].first),
               std::to_string(buckets[b].second),
               std::to_string(total[si][b]), std::to_string(correct[si][b]),
               fmt_g17(acc)});
      ++rows;
      s.x.push_back(0.5 * (buckets[b].first + buckets[b].second));
      s.y.push_back(acc);
    }
    series.push_back(std::move(s));
  }
  csv.close();
  ctx.note_csv("acc_vs_degree.csv", rows);

  SvgChartSpec spec;
  spec.title = "Recovery accuracy vs entity degree";
  spec.x_label = "degree bucket center";
  spec.y_label = "accuracy";
  emit_chart(ctx, "acc_vs_degree.svg", series, spec);
}

void run_layering_ablation(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  KnowledgeGraph kg = ladder_substrate(cfg, ctx.manifest);
  const std::map<int, std::vector<int>> bands = {
      {1, {}},
      {2, {50}},
      {3, {60, 30}},
      {4, {80, 60, 30}},
      {5, {80, 60, 40, 20}}};
  const double snr = 2.0;

  CsvWriter csv(ctx.path("layering_ablation.csv"));
  csv.row({"n_layers", "symbols", "correct", "accuracy"});
  long rows = 0;
  std::vector<double> xs, ys;

  for (const auto& [n_layers, thresholds] : bands) {
    LayerAssignment assign = layer_by_degree(kg, thresholds);
    long correct = 0, total = 0;
    for (int rep = 0; rep < cfg.n_seeds; ++rep) {
      uint64_t rep_seed = derive_seed(cfg.seed, rep);
      EmbeddingTable table = train_table(kg, cfg, rep_seed);
      Rng walk_rng(derive_seed(rep_seed, 51));
      std::uniform_int_distribution<EntityId> dent(0, kg.n_entities() - 1);
      ChannelModel model;
      model.fading = Fading::Rayleigh;
      model.snr_db = snr;
      model.seed = derive_seed(rep_seed, 800);
      for (int m = 0; m < cfg.n_messages; ++m) {
        ReasoningPath path =
            random_walk(kg, dent(walk_rng), cfg.path_len, walk_rng);
        DecodedMessage d = send_and_decode(kg, table, path, model, m,
                                           cfg.alpha, &assign, true);
        for (size_t i = 0; i < d.truth.size(); ++i) {
          ++total;
          correct += d.assisted[i] == d.truth[i];
        }
      }
    }
    double acc = double(correct) / total;
    csv.row({std::to_string(n_layers), std::to_string(total),
             std::to_string(correct), fmt_g17(acc)});
    ++rows;
    xs.push_back(n_layers);
    ys.push_back(acc);
  }
  csv.close();
  ctx.note_csv("layering_ablation.csv", rows);

  SvgChartSpec spec;
  spec.title = "Recovery accuracy vs abstraction layer count";
  spec.x_label = "layers";
  spec.y_label = "accuracy";
  emit_chart(ctx, "layering_ablation.svg", {{"accuracy", xs, ys}}, spec);
}

void run_imitation_toy(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  ToyMdp toy = synth_toy_mdp();
  ctx.manifest["substrate"] = "synthetic:toy_mdp(8 entities, 3 relations)";

  CsvWriter summary(ctx.path("imitation_summary.csv"));
  summary.row({"seed", "occupancy_tv", "greedy_match_rate"});
  long sum_rows = 0;
  std::vector<SvgSeries> series;

  for (int rep = 0; rep < cfg.n_seeds; ++rep) {
    uint64_t rep_seed = derive_seed(cfg.seed, rep);
    EmbeddingTable table = train_table(toy.kg, cfg, rep_seed);
    ImitationConfig ic;
    ic.updates = cfg.updates;
    ic.batch = cfg.batch;
    ic.j_steps = cfg.j_steps;
    ic.policy_lr = cfg.policy_lr;
    ic.eval_lr = cfg.eval_lr;
    ic.lambda = cfg.lambda;
    ic.seed = rep_seed;
    InterpreterTrainer tr(toy.kg, table, nullptr, toy.experts, ic);
    std::string hist_name =
        "imitation_history_s" + std::to_string(rep) + ".csv";
    CsvWriter hist(ctx.path(hist_name));
    hist.row({"update", "distance_I", "distance_II", "evaluator_acc",
              "policy_entropy"});
    long hist_rows = 0;
    SvgSeries s;
    s.name = "seed " + std::to_string(rep);
    for (int u = 1; u <= ic.updates; ++u) {
      tr.step();
      if (u % ic.history_every == 0 || u == ic.updates) {
        HistoryRow row = tr.metrics(u);
        hist.row({std::to_string(row.update), fmt_g17(row.distance_i),
                  fmt_g17(row.distance_ii), fmt_g17(row.evaluator_acc),
                  fmt_g17(row.policy_entropy)});
        ++hist_rows;
        s.x.push_back(row.update);
        s.y.push_back(row.distance_i);
      }
    }
    hist.close();
    ctx.note_csv(hist_name, hist_rows);
    std::vector<std::pair<EntityId, double>> init;
    std::set<EntityId> origins;
    for (const auto& p : toy.experts) origins.insert(p.origin);
    for (EntityId o : origins)
      init.push_back({o, 1.0 / origins.size()});
    OccupancyTable learner =
        occupancy_exact(tr.policy(), tr.context(), init, cfg.j_steps);
    OccupancyTable expert = occupancy_expert(toy.experts);
    summary.row({std::to_string(rep), fmt_g17(occupancy_tv(learner, expert)),
                 fmt_g17(tr.greedy_match_rate())});
    ++sum_rows;
    series.push_back(std::move(s));
  }
  summary.close();
  ctx.note_csv("imitation_summary.csv", sum_rows);

  SvgChartSpec spec;
  spec.title = "Occupancy distance during imitation";
  spec.x_label = "update";
  spec.y_label = "distance";
  emit_chart(ctx, "imitation_distance.svg", series, spec);
}

// Degree-sextile subjects let the non-iid partition act on an unlabeled KG.
void assign_degree_subjects(KnowledgeGraph& kg, int n_subjects) {
  std::vector<EntityId> order(kg.n_entities());
  for (EntityId e = 0; e < kg.n_entities(); ++e) order[e] = e;
  std::stable_sort(order.begin(), order.end(), [&](EntityId a, EntityId b) {
    return kg.degree(a) > kg.degree(b);
  });
  kg.labels.assign(kg.n_entities(), -1);
  kg.subject_names.clear();
  for (int s = 0; s < n_subjects; ++s)
    kg.subject_names.push_back("band" + std::to_string(s));
  const int per = (kg.n_entities() + n_subjects - 1) / n_subjects;
  for (int i = 0; i < kg.n_entities(); ++i)
    kg.labels[order[i]] = std::min(n_subjects - 1, i / per);
}

std::vector<ReasoningPath> walk_experts(const KnowledgeGraph& kg, int n_paths,
                                        int steps, uint64_t seed) {
  std::vector<EntityId> origins;
  for (EntityId e = 0; e < kg.n_entities(); ++e)
    if (!kg.out[e].empty()) origins.push_back(e);
  if (origins.empty()) throw DataError("server graph has no outgoing edges");
  Rng rng(seed);
  std::uniform_int_distribution<size_t> dorigin(0, origins.size() - 1);
  std::vector<ReasoningPath> out;
  int budget = 100 * n_paths;
  while (static_cast<int>(out.size()) < n_paths && budget-- > 0) {
    ReasoningPath p = random_walk(kg, origins[dorigin(rng)], steps, rng);
    if (p.length() == steps) out.push_back(std::move(p));
  }
  if (static_cast<int>(out.size()) < n_paths)
    throw DataError("walk sampling exhausted its retry budget");
  return out;
}

void run_fed_noniid(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  KnowledgeGraph kg = triples_substrate(cfg, ctx.manifest);
  assign_degree_subjects(kg, 6);

  const std::vector<double> ps = {0.0, 0.5, 1.0};
  CsvWriter summary(ctx.path("fed_noniid_summary.csv"));
  summary.row({"noniid_p", "final_loss", "final_match_rate"});
  long sum_rows = 0;
  std::vector<SvgSeries> series;

  for (size_t pi = 0; pi < ps.size(); ++pi) {
    PartitionSpec pspec;
    pspec.k_servers = cfg.servers;
    pspec.noniid_p = ps[pi];
    pspec.seed = derive_seed(cfg.seed, 900 + pi);
    Partition part = partition(kg, pspec);

    std::vector<EmbeddingTable> tables;
    std::vector<std::vector<ReasoningPath>> experts;
    for (int k = 0; k < cfg.servers; ++k) {
      tables.push_back(
          train_table(part.locals[k], cfg, derive_seed(cfg.seed, 910 + k)));
      experts.push_back(walk_experts(part.locals[k], 24, cfg.j_steps,
                                     derive_seed(cfg.seed, 920 + k)));
    }
    std::vector<const KnowledgeGraph*> kgs;
    std::vector<const EmbeddingTable*> tbls;
    for (int k = 0; k < cfg.servers; ++k) {
      kgs.push_back(&part.locals[k]);
      tbls.push_back(&tables[k]);
    }
    ImitationConfig ic;
    ic.batch = cfg.batch;
    ic.j_steps = cfg.j_steps;
    ic.policy_lr = cfg.policy_lr;
    ic.eval_lr = cfg.eval_lr;
    ic.lambda = cfg.lambda;
    FederationConfig fc;
    fc.servers = cfg.servers;
    fc.local_steps = cfg.local_steps;
    fc.total_steps = cfg.rounds * cfg.local_steps;
    fc.noniid_p = ps[pi];
    fc.seed = derive_seed(cfg.seed, 930 + pi);
    FedReasoningResult res =
        run_federated_reasoning(kgs, tbls, experts, ic, fc);

    std::string tag = "p" + std::to_string(int(ps[pi] * 100 + 0.5));
    CsvWriter part_csv(ctx.path("partition_" + tag + ".csv"));
    part_csv.row({"entity_id", "server_id", "subject_label"});
    long prow = 0;
    for (EntityId e = 0; e < kg.n_entities(); ++e) {
      part_csv.row({std::to_string(e), std::to_string(part.owner[e]),
                    kg.labels[e] >= 0 ? kg.subject_names[kg.labels[e]] : ""});
      ++prow;
    }
    part_csv.close();
    ctx.note_csv("partition_" + tag + ".csv", prow);

    CsvWriter trace(ctx.path("fed_noniid_trace_" + tag + ".csv"));
    trace.row({"round", "server_id", "local_loss", "val_accuracy"});
    long rows = 0;
    CsvWriter agg(ctx.path("fed_noniid_agg_" + tag + ".csv"));
    agg.row({"round", "aggregated_val_accuracy"});
    long arows = 0;
    SvgSeries s;
    s.name = "p=" + fmt_g17(ps[pi]);
    double final_loss = 0, final_acc = 0;
    for (const FedTraceRow& r : res.trace) {
      if (r.server == -1) {
        agg.row({std::to_string(r.round), fmt_g17(r.val_accuracy)});
        ++arows;
        s.x.push_back(r.round);
        s.y.push_back(r.val_accuracy);
        final_loss = r.local_loss;
        final_acc = r.val_accuracy;
      } else {
        trace.row({std::to_string(r.round), std::to_string(r.server),
                   fmt_g17(r.local_loss), fmt_g17(r.val_accuracy)});
        ++rows;
      }
    }
    trace.close();
    agg.close();
    ctx.note_csv("fed_noniid_trace_" + tag + ".csv", rows);
    ctx.note_csv("fed_noniid_agg_" + tag + ".csv", arows);
    summary.row({fmt_g17(ps[pi]), fmt_g17(final_loss), fmt_g17(final_acc)});
    ++sum_rows;
    series.push_back(std::move(s));
  }
  summary.close();
  ctx.note_csv("fed_noniid_summary.csv", sum_rows);

  SvgChartSpec spec;
  spec.title = "Federated reasoning under non-iid partitions";
  spec.x_label = "round";
  spec.y_label = "greedy match rate";
  emit_chart(ctx, "fed_noniid.svg", series, spec);
}

void run_fed_servers(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<std::pair<std::string, int>> datasets = {
      {"cora_synth", 7}, {"citeseer_synth", 6}};
  const std::vector<double> ps = {0.0, 1.0};
  const std::vector<int> ks = {2, 3, 4, 5, 6};

  CsvWriter csv(ctx.path("fed_servers_summary.csv"));
  csv.row({"dataset", "seed", "noniid_p", "servers", "val_accuracy"});
  long rows = 0;

  for (const auto& [dname, n_subjects] : datasets) {
    double size_scale = dname == "citeseer_synth" ? 0.9 : 1.0;
    KnowledgeGraph kg =
        citation_substrate(cfg, dname, n_subjects, size_scale, ctx.manifest);

    // fixed validation split: 20% of labeled nodes, seeded from the base seed
    std::vector<int> labeled;
    for (int i = 0; i < kg.n_entities(); ++i)
      if (kg.labels[i] >= 0) labeled.push_back(i);
    Rng vr(derive_seed(cfg.seed, fnv1a64(dname + ":val")));
    std::shuffle(labeled.begin(), labeled.end(), vr);
    std::vector<int> val(labeled.begin(),
                         labeled.begin() + labeled.size() / 5);
    std::sort(val.begin(), val.end());

    // mean accuracy per (p, K) across seeds, for the chart
    std::map<std::pair<double, int>, double> mean_acc;

    for (int rep = 0; rep < cfg.n_seeds; ++rep) {
      uint64_t rep_seed = derive_seed(cfg.seed, rep);
      for (double p : ps) {
        for (int k : ks) {
          PartitionSpec pspec;
          pspec.k_servers = k;
          pspec.noniid_p = p;
          pspec.seed = derive_seed(rep_seed, 950 + k * 10 + int(p));
          Partition part = partition_budgeted(kg, pspec);
          GcnConfig gc;
          gc.hidden = cfg.gcn_hidden;
          gc.lr = cfg.gcn_lr;
          gc.seed = rep_seed;
          FederationConfig fc;
          fc.servers = k;
          fc.local_steps = cfg.local_steps;
          fc.total_steps = cfg.rounds * cfg.local_steps;
          fc.noniid_p = p;
          fc.seed = rep_seed;
          FedClassResult res =
              run_federated_classification(kg, part, val, gc, fc);
          csv.row({dname, std::to_string(rep), fmt_g17(p), std::to_string(k),
                   fmt_g17(res.final_val_accuracy)});
          ++rows;
          mean_acc[{p, k}] += res.final_val_accuracy / cfg.n_seeds;
        }
      }
    }

    std::vector<SvgSeries> series;
    for (double p : ps) {
      SvgSeries s;
      s.name = "p=" + fmt_g17(p);
      for (int k : ks) {
        s.x.push_back(k);
        s.y.push_back(mean_acc[{p, k}]);
      }
      series.push_back(std::move(s));
    }
    SvgChartSpec spec;
    spec.title = "Federated classification accuracy vs servers (" + dname +
                 ")";
    spec.x_label = "servers";
    spec.y_label = "validation accuracy";
    emit_chart(ctx, "fed_servers_" + dname + ".svg", series, spec);
  }
  csv.close();
  ctx.note_csv("fed_servers_summary.csv", rows);
}

void run_bound_check(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  ctx.manifest["substrate"] =
      "synthetic:diagonal_quadratics(K=" + std::to_string(cfg.servers) + ")";
  std::vector<SvgSeries> series;
  for (int rep = 0; rep < cfg.n_seeds; ++rep) {
    BoundCheckResult res = irml::run_bound_check(
        cfg.servers, cfg.bound_dim, cfg.local_steps,
        cfg.rounds * cfg.local_steps, cfg.bound_mu, cfg.bound_l,
        derive_seed(cfg.seed, rep));
    std::string name = "bound_check_s" + std::to_string(rep) + ".csv";
    CsvWriter csv(ctx.path(name));
    csv.row({"T", "observed_gap", "bound"});
    long rows = 0;
    for (const BoundCheckRow& r : res.rows) {
      csv.row({std::to_string(r.t), fmt_g17(r.observed_gap),
               fmt_g17(r.bound)});
      ++rows;
    }
    csv.close();
    ctx.note_csv(name, rows);
    if (rep == 0) {
      SvgSeries obs{"observed", {}, {}}, bnd{"bound", {}, {}};
      for (const BoundCheckRow& r : res.rows) {
        obs.x.push_back(double(r.t));
        obs.y.push_back(std::max(r.observed_gap, 1e-16));
        bnd.x.push_back(double(r.t));
        bnd.y.push_back(r.bound);
      }
      series = {obs, bnd};
    }
  }
  SvgChartSpec spec;
  spec.title = "Optimality gap vs convergence bound";
  spec.x_label = "local steps T";
  spec.y_label = "gap";
  spec.log_y = true;
  emit_chart(ctx, "bound_check.svg", series, spec);
}

void run_constellation(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  KnowledgeGraph kg = ladder_substrate(cfg, ctx.manifest);
  LayerAssignment layers = layer_by_degree(kg, cfg.layer_thresholds);
  EmbeddingTable table = train_table(kg, cfg, cfg.seed, 2);
  save_table_csv(table, ctx.path("embedding.csv"));
  ctx.note_csv("embedding.csv", kg.n_entities() + kg.n_relations());

  CsvWriter csv(ctx.path("constellation.csv"));
  csv.row({"entity", "name", "degree", "layer", "x", "y"});
  long rows = 0;
  std::vector<SvgSeries> series(layers.n_layers);
  for (int l = 0; l < layers.n_layers; ++l)
    series[l].name = "scatter:layer " + std::to_string(l + 1);
  for (EntityId e = 0; e < kg.n_entities(); ++e) {
    csv.row({std::to_string(e), kg.entity_names[e],
             std::to_string(kg.degree(e)), std::to_string(layers.layer[e]),
             fmt_g17(table.entity[e][0]), fmt_g17(table.entity[e][1])});
    ++rows;
    series[layers.layer[e] - 1].x.push_back(table.entity[e][0]);
    series[layers.layer[e] - 1].y.push_back(table.entity[e][1]);
  }
  csv.close();
  ctx.note_csv("constellation.csv", rows);

  SvgChartSpec spec;
  spec.title = "Two-dimensional codeword constellation";
  spec.x_label = "dim 0";
  spec.y_label = "dim 1";
  emit_chart(ctx, "constellation.svg", series, spec);
}

}  // namespace

// ---- config resolution ------------------------------------------------------------

const std::vector<std::string>& ExperimentConfig::known_ids() {
  static const std::vector<std::string> ids = {
      "ser_vs_snr",    "acc_vs_degree", "layering_ablation", "imitation_toy",
      "fed_noniid",    "fed_servers",   "bound_check",       "constellation"};
  return ids;
}

ExperimentConfig ExperimentConfig::resolve(const std::string& id,
                                           const KeyValueConfig& kv) {
  const auto& ids = known_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw ConfigError("unknown experiment id: " + id);

  static const std::vector<std::string> known_keys = {
      "seed",        "n_seeds",       "snr_db",           "servers",
      "local_steps", "rounds",        "noniid_p",         "out",
      "data_dir",    "force",         "full",             "max_entities",
      "layer_thresholds",             "codec_dim",        "codec_epochs",
      "codec_lr",    "codec_margin",  "codec_batch",      "n_messages",
      "path_len",    "alpha",         "updates",          "batch",
      "j_steps",     "policy_lr",     "eval_lr",          "lambda",
      "gcn_hidden",  "gcn_lr",        "class_entities",   "class_feature_dim",
      "bound_dim",   "bound_mu",      "bound_l"};
  kv.validate(known_keys);

  ExperimentConfig cfg;
  cfg.id = id;
  // id-specific defaults before the file/CLI overrides
  if (id == "imitation_toy") cfg.updates = 400;
  if (id == "fed_noniid") {
    cfg.j_steps = 1;
    cfg.rounds = 30;
  }
  if (id == "constellation") cfg.codec_dim = 2;

  cfg.seed = static_cast<uint64_t>(kv.get_int("seed", cfg.seed));
  cfg.n_seeds = static_cast<int>(kv.get_int("n_seeds", cfg.n_seeds));
  cfg.snr_db = kv.get_double_list("snr_db", cfg.snr_db);
  cfg.servers = static_cast<int>(kv.get_int("servers", cfg.servers));
  cfg.local_steps =
      static_cast<int>(kv.get_int("local_steps", cfg.local_steps));
  cfg.rounds = static_cast<int>(kv.get_int("rounds", cfg.rounds));
  cfg.noniid_p = kv.get_double("noniid_p", cfg.noniid_p);
  cfg.out_dir = kv.get_string("out", "runs/" + id);
  cfg.data_dir = kv.get_string("data_dir", "");
  cfg.force = kv.get_bool("force", false);
  cfg.full = kv.get_bool("full", false);
  cfg.max_entities =
      static_cast<int>(kv.get_int("max_entities", cfg.max_entities));
  std::vector<double> lt;
  for (int t : cfg.layer_thresholds) lt.push_back(t);
  lt = kv.get_double_list("layer_thresholds", lt);
  cfg.layer_thresholds.clear();
  for (double t : lt) cfg.layer_thresholds.push_back(int(t));
  cfg.codec_dim = static_cast<int>(kv.get_int("codec_dim", cfg.codec_dim));
  cfg.codec_epochs =
      static_cast<int>(kv.get_int("codec_epochs", cfg.codec_epochs));
  cfg.codec_lr = kv.get_double("codec_lr", cfg.codec_lr);
  cfg.codec_margin = kv.get_double("codec_margin", cfg.codec_margin);
  cfg.codec_batch =
      static_cast<int>(kv.get_int("codec_batch", cfg.codec_batch));
  cfg.n_messages = static_cast<int>(kv.get_int("n_messages", cfg.n_messages));
  cfg.path_len = static_cast<int>(kv.get_int("path_len", cfg.path_len));
  cfg.alpha = kv.get_double("alpha", cfg.alpha);
  cfg.updates = static_cast<int>(kv.get_int("updates", cfg.updates));
  cfg.batch = static_cast<int>(kv.get_int("batch", cfg.batch));
  cfg.j_steps = static_cast<int>(kv.get_int("j_steps", cfg.j_steps));
  cfg.policy_lr = kv.get_double("policy_lr", cfg.policy_lr);
  cfg.eval_lr = kv.get_double("eval_lr", cfg.eval_lr);
  cfg.lambda = kv.get_double("lambda", cfg.lambda);
  cfg.gcn_hidden = static_cast<int>(kv.get_int("gcn_hidden", cfg.gcn_hidden));
  cfg.gcn_lr = kv.get_double("gcn_lr", cfg.gcn_lr);
  cfg.class_entities =
      static_cast<int>(kv.get_int("class_entities", cfg.class_entities));
  cfg.class_feature_dim = static_cast<int>(
      kv.get_int("class_feature_dim", cfg.class_feature_dim));
  cfg.bound_dim = static_cast<int>(kv.get_int("bound_dim", cfg.bound_dim));
  cfg.bound_mu = kv.get_double("bound_mu", cfg.bound_mu);
  cfg.bound_l = kv.get_double("bound_l", cfg.bound_l);

  if (cfg.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (cfg.snr_db.empty()) throw ConfigError("snr_db must be non-empty");
  if (cfg.servers < 1) throw ConfigError("servers must be >= 1");
  if (cfg.local_steps < 1 || cfg.rounds < 1)
    throw ConfigError("local_steps and rounds must be >= 1");
  if (cfg.noniid_p < 0 || cfg.noniid_p > 1)
    throw ConfigError("noniid_p must lie in [0, 1]");
  if (cfg.alpha < 0 || cfg.alpha > 1)
    throw ConfigError("alpha must lie in [0, 1]");
  return cfg;
}

void run_experiment(const ExperimentConfig& cfg) {
  prepare_out_dir(cfg);
  RunContext ctx(cfg);
  ctx.manifest["experiment"] = cfg.id;
  ctx.manifest["seed"] = cfg.seed;
  std::vector<uint64_t> seeds;
  for (int rep = 0; rep < cfg.n_seeds; ++rep)
    seeds.push_back(derive_seed(cfg.seed, rep));
  ctx.manifest["replicate_seeds"] = seeds;
  ctx.manifest["inputs"] = json::array();

  // config hash over the canonical resolved parameters
  {
    KeyValueConfig kc;
    kc.set("id", cfg.id);
    kc.set("seed", std::to_string(cfg.seed));
    kc.set("n_seeds", std::to_string(cfg.n_seeds));
    std::string snr;
    for (double s : cfg.snr_db) snr += fmt_g17(s) + ",";
    kc.set("snr_db", snr);
    kc.set("servers", std::to_string(cfg.servers));
    kc.set("local_steps", std::to_string(cfg.local_steps));
    kc.set("rounds", std::to_string(cfg.rounds));
    kc.set("noniid_p", fmt_g17(cfg.noniid_p));
    kc.set("max_entities", std::to_string(cfg.max_entities));
    std::string th;
    for (int t : cfg.layer_thresholds) th += std::to_string(t) + ",";
    kc.set("layer_thresholds", th);
    kc.set("codec_dim", std::to_string(cfg.codec_dim));
    kc.set("codec_epochs", std::to_string(cfg.codec_epochs));
    kc.set("codec_lr", fmt_g17(cfg.codec_lr));
    kc.set("codec_margin", fmt_g17(cfg.codec_margin));
    kc.set("codec_batch", std::to_string(cfg.codec_batch));
    kc.set("n_messages", std::to_string(cfg.n_messages));
    kc.set("path_len", std::to_string(cfg.path_len));
    kc.set("alpha", fmt_g17(cfg.alpha));
    kc.set("updates", std::to_string(cfg.updates));
    kc.set("batch", std::to_string(cfg.batch));
    kc.set("j_steps", std::to_string(cfg.j_steps));
    kc.set("policy_lr", fmt_g17(cfg.policy_lr));
    kc.set("eval_lr", fmt_g17(cfg.eval_lr));
    kc.set("lambda", fmt_g17(cfg.lambda));
    kc.set("gcn_hidden", std::to_string(cfg.gcn_hidden));
    kc.set("gcn_lr", fmt_g17(cfg.gcn_lr));
    kc.set("class_entities", std::to_string(cfg.class_entities));
    kc.set("class_feature_dim", std::to_string(cfg.class_feature_dim));
    kc.set("bound_dim", std::to_string(cfg.bound_dim));
    kc.set("bound_mu", fmt_g17(cfg.bound_mu));
    kc.set("bound_l", fmt_g17(cfg.bound_l));
    kc.set("data_dir", cfg.data_dir);
    kc.set("full", cfg.full ? "1" : "0");
    ctx.manifest["config_fnv1a64"] = hex64(fnv1a64(kc.canonical()));
  }

  auto t0 = std::chrono::steady_clock::now();
  if (cfg.id == "ser_vs_snr") run_ser_vs_snr(ctx);
  else if (cfg.id == "acc_vs_degree") run_acc_vs_degree(ctx);
  else if (cfg.id == "layering_ablation") run_layering_ablation(ctx);
  else if (cfg.id == "imitation_toy") run_imitation_toy(ctx);
  else if (cfg.id == "fed_noniid") run_fed_noniid(ctx);
  else if (cfg.id == "fed_servers") run_fed_servers(ctx);
  else if (cfg.id == "bound_check") run_bound_check(ctx);
  else if (cfg.id == "constellation") run_constellation(ctx);
  else throw ConfigError("unknown experiment id: " + cfg.id);
  auto t1 = std::chrono::steady_clock::now();

  ctx.manifest["runtime_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  json outputs = json::array();
  for (const auto& [name, rows] : ctx.csv_rows)
    outputs.push_back({{"file", name}, {"rows", rows}});
  ctx.manifest["outputs"] = outputs;

  std::ofstream mf(ctx.path("manifest.json"));
  if (!mf) throw DataError("cannot write manifest");
  mf << ctx.manifest.dump(2) << "\n";
}

}  // namespace irml
