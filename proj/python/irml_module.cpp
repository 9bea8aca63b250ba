#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irml/channel.hpp"
#include "irml/decoder.hpp"
#include "irml/experiments.hpp"
#include "irml/federation.hpp"
#include "irml/synth.hpp"

namespace py = pybind11;
using namespace irml;

namespace {

Fading parse_fading(const std::string& name) {
  if (name == "unit") return Fading::Unit;
  if (name == "fixed") return Fading::Fixed;
  if (name == "rayleigh") return Fading::Rayleigh;
  throw ConfigError("unknown fading model: " + name);
}

ReceivedSignal signal_from_samples(const std::vector<double>& samples,
                                   int dim) {
  if (dim <= 0 || samples.size() % dim != 0)
    throw ConfigError("sample count must be a multiple of the dimension");
  ReceivedSignal rx;
  rx.samples = samples;
  for (size_t i = 0; i * dim < samples.size(); ++i)
    rx.spans.push_back({'e', int(i), int(i * dim), dim});
  return rx;
}

std::vector<ReasoningPath> paths_from_py(
    const std::vector<std::pair<EntityId,
                                std::vector<std::pair<RelationId, EntityId>>>>&
        raw) {
  std::vector<ReasoningPath> out;
  for (const auto& [origin, steps] : raw) {
    ReasoningPath p;
    p.origin = origin;
    for (const auto& [rel, ent] : steps) p.steps.push_back({rel, ent});
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_irml, m) {
  m.doc() = "implicit semantic communication laboratory core";

  py::register_exception<ConfigError>(m, "IrmlConfigError");
  py::register_exception<DataError>(m, "IrmlDataError");
  py::register_exception<ComputeError>(m, "IrmlComputeError");

  py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
      .def("n_entities", &KnowledgeGraph::n_entities)
      .def("n_relations", &KnowledgeGraph::n_relations)
      .def("n_triples", &KnowledgeGraph::n_triples)
      .def("degree", &KnowledgeGraph::degree, py::arg("entity"))
      .def("available_relations", &KnowledgeGraph::available_relations,
           py::arg("entity"))
      .def("tails", &KnowledgeGraph::tails, py::arg("entity"),
           py::arg("relation"))
      .def_readonly("entity_names", &KnowledgeGraph::entity_names)
      .def_readonly("relation_names", &KnowledgeGraph::relation_names)
      .def_readonly("labels", &KnowledgeGraph::labels);

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_readonly("dim", &EmbeddingTable::dim)
      .def_readonly("entity", &EmbeddingTable::entity)
      .def_readonly("relation", &EmbeddingTable::relation);

  m.def(
      "scale_free_kg",
      [](int n_entities, int n_relations, int edges_per_node, uint64_t seed) {
        ScaleFreeSpec spec;
        spec.n_entities = n_entities;
        spec.n_relations = n_relations;
        spec.edges_per_node = edges_per_node;
        spec.seed = seed;
        return synth_scale_free_kg(spec);
      },
      py::arg("n_entities") = 200, py::arg("n_relations") = 8,
      py::arg("edges_per_node") = 3, py::arg("seed") = 1);

  m.def("toy_mdp", [] {
    ToyMdp toy = synth_toy_mdp();
    std::vector<
        std::pair<EntityId, std::vector<std::pair<RelationId, EntityId>>>>
        experts;
    for (const ReasoningPath& p : toy.experts) {
      std::vector<std::pair<RelationId, EntityId>> steps;
      for (const PathStep& st : p.steps) steps.push_back({st.rel, st.entity});
      experts.push_back({p.origin, steps});
    }
    return py::make_tuple(toy.kg, experts);
  });

  m.def(
      "load_triples",
      [](const std::string& path) { return load_triples(path); },
      py::arg("path"));

  m.def(
      "train_encoder",
      [](const KnowledgeGraph& kg, int dim, int epochs, double lr,
         double margin, int batch_size, uint64_t seed) {
        CodecConfig cfg;
        cfg.dim = dim;
        cfg.epochs = epochs;
        cfg.lr = lr;
        cfg.margin = margin;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        TrainResult res = train_encoder(kg, cfg);
        return py::make_tuple(res.table, res.epoch_mean_loss);
      },
      py::arg("kg"), py::arg("dim") = 8, py::arg("epochs") = 50,
      py::arg("lr") = 0.01, py::arg("margin") = 1.0,
      py::arg("batch_size") = 128, py::arg("seed") = 1);

  m.def(
      "encode_entities",
      [](const std::vector<EntityId>& entities, const EmbeddingTable& table) {
        return encode_entities(entities, table).samples;
      },
      py::arg("entities"), py::arg("table"));

  m.def(
      "transmit_entities",
      [](const std::vector<EntityId>& entities, const EmbeddingTable& table,
         const std::string& fading, double snr_db, uint64_t seed,
         uint64_t message_index) {
        ChannelModel model;
        model.fading = parse_fading(fading);
        model.snr_db = snr_db;
        model.seed = seed;
        ReceivedSignal rx =
            transmit(encode_entities(entities, table), model, message_index);
        return py::make_tuple(rx.samples, rx.gain, rx.noise_var);
      },
      py::arg("entities"), py::arg("table"), py::arg("fading") = "unit",
      py::arg("snr_db") = 10.0, py::arg("seed") = 1,
      py::arg("message_index") = 0);

  m.def(
      "estimate_channel",
      [](const std::vector<double>& sent, const std::vector<double>& recv) {
        ChannelEstimate est = estimate_channel(sent, recv);
        return py::make_tuple(est.g_hat, est.noise_var_hat);
      },
      py::arg("sent"), py::arg("received"));

  m.def(
      "hard_decode",
      [](const std::vector<double>& samples, const EmbeddingTable& table,
         double g_hat) {
        return hard_decode(signal_from_samples(samples, table.dim), table,
                           g_hat);
      },
      py::arg("samples"), py::arg("table"), py::arg("g_hat") = 1.0);

  m.def(
      "recover_with_reasoning",
      [](const std::vector<double>& samples, const KnowledgeGraph& kg,
         const EmbeddingTable& table, double g_hat, double alpha,
         const std::vector<RelationId>& side_relations) {
        RecoveryConfig cfg;
        cfg.alpha = alpha;
        cfg.side_relations = side_relations;
        return recover_with_reasoning(signal_from_samples(samples, table.dim),
                                      kg, table, g_hat, cfg);
      },
      py::arg("samples"), py::arg("kg"), py::arg("table"),
      py::arg("g_hat") = 1.0, py::arg("alpha") = 0.5,
      py::arg("side_relations") = std::vector<RelationId>{});

  m.def(
      "train_interpreter",
      [](const KnowledgeGraph& kg, const EmbeddingTable& table,
         const std::vector<std::pair<
             EntityId, std::vector<std::pair<RelationId, EntityId>>>>& experts,
         int updates, int batch, int j_steps, double policy_lr,
         double eval_lr, double lambda, uint64_t seed) {
        ImitationConfig cfg;
        cfg.updates = updates;
        cfg.batch = batch;
        cfg.j_steps = j_steps;
        cfg.policy_lr = policy_lr;
        cfg.eval_lr = eval_lr;
        cfg.lambda = lambda;
        cfg.seed = seed;
        std::vector<ReasoningPath> paths = paths_from_py(experts);
        InterpreterTrainer tr(kg, table, nullptr, paths, cfg);
        for (int u = 0; u < updates; ++u) tr.step();
        py::dict out;
        out["greedy_match_rate"] = tr.greedy_match_rate();
        HistoryRow row = tr.metrics(updates);
        out["distance_i"] = row.distance_i;
        out["distance_ii"] = row.distance_ii;
        out["policy_entropy"] = row.policy_entropy;
        return out;
      },
      py::arg("kg"), py::arg("table"), py::arg("experts"),
      py::arg("updates") = 200, py::arg("batch") = 16, py::arg("j_steps") = 2,
      py::arg("policy_lr") = 0.05, py::arg("eval_lr") = 0.1,
      py::arg("lambda") = 1e-2, py::arg("seed") = 1);

  m.def(
      "theorem3_bound",
      [](double mu, double l_smooth, double sigma_l, double rho,
         double divergence, double l_p, int e_local, int n_entities,
         double init_gap_sq, int t_steps) {
        BoundParams p;
        p.mu = mu;
        p.l_smooth = l_smooth;
        p.sigma_l = sigma_l;
        p.rho = rho;
        p.divergence = divergence;
        p.l_p = l_p;
        p.e_local = e_local;
        p.n_entities = n_entities;
        p.init_gap_sq = init_gap_sq;
        return theorem3_bound(p, t_steps);
      },
      py::arg("mu"), py::arg("l_smooth"), py::arg("sigma_l"), py::arg("rho"),
      py::arg("divergence"), py::arg("l_p"), py::arg("e_local"),
      py::arg("n_entities"), py::arg("init_gap_sq"), py::arg("t_steps"));

  m.def(
      "run_experiment",
      [](const std::string& id, const py::dict& overrides) {
        KeyValueConfig kv;
        for (const auto& item : overrides)
          kv.set(py::str(item.first), py::str(item.second));
        ExperimentConfig cfg = ExperimentConfig::resolve(id, kv);
        run_experiment(cfg);
        return cfg.out_dir;
      },
      py::arg("id"), py::arg("overrides") = py::dict());

  m.def("known_experiments",
        [] { return ExperimentConfig::known_ids(); });
}
