#include "irml/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irml {

namespace {

// Nearest entity to a (gain-corrected) slice; ties -> lowest id.
std::pair<EntityId, double> nearest_entity(const double* y, int dim,
                                           const EmbeddingTable& table) {
  EntityId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (EntityId e = 0; e < static_cast<EntityId>(table.entity.size()); ++e) {
    double d = 0;
    const std::vector<double>& v = table.entity[e];
    for (int i = 0; i < dim; ++i) {
      double diff = y[i] - v[i];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  return {best, best_d};
}

std::vector<double> corrected_slice(const ReceivedSignal& rx,
                                    const SymbolSpan& sp, double g_hat) {
  std::vector<double> y(sp.len);
  for (int i = 0; i < sp.len; ++i) y[i] = rx.samples[sp.offset + i] / g_hat;
  return y;
}

}  // namespace

std::vector<EntityId> hard_decode(const ReceivedSignal& rx,
                                  const EmbeddingTable& table, double g_hat) {
  if (g_hat == 0.0) throw ComputeError("zero gain estimate");
  if (table.entity.empty()) throw ComputeError("empty entity codebook");
  std::vector<EntityId> out;
  for (const SymbolSpan& sp : rx.spans) {
    if (sp.kind != 'e') continue;
    if (sp.len != table.dim) throw ComputeError("span width != embedding dim");
    std::vector<double> y = corrected_slice(rx, sp, g_hat);
    out.push_back(nearest_entity(y.data(), table.dim, table).first);
  }
  return out;
}

SoftDecodeResult soft_decode_path(const std::vector<double>& received_head,
                                  const PolicyNetwork& net,
                                  const PolicyContext& ctx,
                                  const EmbeddingTable& table, int j_steps,
                                  double g_hat) {
  if (g_hat == 0.0) throw ComputeError("zero gain estimate");
  if (static_cast<int>(received_head.size()) != table.dim)
    throw ComputeError("head width != embedding dim");
  SoftDecodeResult res;
  res.p_hat.resize(table.dim);
  for (int i = 0; i < table.dim; ++i) res.p_hat[i] = received_head[i] / g_hat;
  EntityId state =
      nearest_entity(res.p_hat.data(), table.dim, table).first;
  for (int t = 0; t < j_steps; ++t) {
    PolicyEval ev = policy_forward(net, ctx, state);
    if (ev.actions.empty()) {
      res.truncated = true;
      break;
    }
    int idx = 0;
    for (size_t j = 1; j < ev.probs.size(); ++j)
      if (ev.probs[j] > ev.probs[idx]) idx = static_cast<int>(j);
    RelationId r = ev.actions[idx];
    res.relations.push_back(r);
    for (int i = 0; i < table.dim; ++i)
      res.p_hat[i] += table.relation[r][i];
    state = ctx.tails[state][idx].front();
  }
  return res;
}

std::vector<EntityId> recover_with_reasoning(const ReceivedSignal& rx,
                                             const KnowledgeGraph& kg,
                                             const EmbeddingTable& table,
                                             double g_hat,
                                             const RecoveryConfig& cfg) {
  if (g_hat == 0.0) throw ComputeError("zero gain estimate");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
    throw ConfigError("alpha must lie in [0, 1]");

  std::vector<int> entity_spans;
  for (size_t i = 0; i < rx.spans.size(); ++i)
    if (rx.spans[i].kind == 'e') entity_spans.push_back(static_cast<int>(i));
  const int n = static_cast<int>(entity_spans.size());
  if (n == 0) return {};
  if (!cfg.side_relations.empty() &&
      static_cast<int>(cfg.side_relations.size()) != n - 1)
    throw ComputeError("side relation count != entity symbols - 1");
  if (!cfg.side_layers.empty()) {
    if (static_cast<int>(cfg.side_layers.size()) != n)
      throw ComputeError("side layer count != entity symbols");
    if (!cfg.layer_schedule)
      throw ComputeError("layer tags need a layer assignment");
  }

  // Per-symbol gain-corrected slices, channel distances to every entity, and
  // the hard-decision confidence (nearest codeword distance).
  const int ne = static_cast<int>(table.entity.size());
  auto admissible = [&](int s, EntityId e) {
    return cfg.side_layers.empty() ||
           cfg.layer_schedule->layer[e] == cfg.side_layers[s];
  };

  std::vector<std::vector<double>> slices(n);
  std::vector<std::vector<double>> chan(n);
  std::vector<double> conf(n);
  for (int s = 0; s < n; ++s) {
    const SymbolSpan& sp = rx.spans[entity_spans[s]];
    if (sp.len != table.dim) throw ComputeError("span width != embedding dim");
    slices[s] = corrected_slice(rx, sp, g_hat);
    chan[s].resize(ne);
    double best = std::numeric_limits<double>::infinity();
    for (EntityId e = 0; e < ne; ++e) {
      chan[s][e] = sq_dist(slices[s], table.entity[e]);
      if (admissible(s, e)) best = std::min(best, chan[s][e]);
    }
    if (!std::isfinite(best))
      throw ComputeError("a layer tag admits no codewords");
    conf[s] = best;
  }

  // Decode order: most confident first; an optional layer schedule decodes
  // abstraction layer 1 before 2, confidence ordering within each layer (the
  // layer key is the tag when present, else the layer of the symbol's nearest
  // codeword).
  std::vector<int> order(n);
  for (int s = 0; s < n; ++s) order[s] = s;
  std::vector<int> layer_key(n, 1);
  if (!cfg.side_layers.empty()) {
    layer_key = cfg.side_layers;
  } else if (cfg.layer_schedule) {
    for (int s = 0; s < n; ++s) {
      EntityId guess = 0;
      for (EntityId e = 1; e < ne; ++e)
        if (chan[s][e] < chan[s][guess]) guess = e;
      layer_key[s] = cfg.layer_schedule->layer[guess];
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (layer_key[a] != layer_key[b]) return layer_key[a] < layer_key[b];
    if (conf[a] != conf[b]) return conf[a] < conf[b];
    return a < b;
  });

  std::vector<EntityId> decoded(n, -1);
  std::vector<bool> done(n, false);
  for (int oi = 0; oi < n; ++oi) {
    int s = order[oi];
    EntityId best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (EntityId e = 0; e < ne; ++e) {
      if (!admissible(s, e)) continue;
      double score = chan[s][e];
      if (cfg.alpha < 1.0) {
        // best translation consistency against decoded neighbors
        double cons = std::numeric_limits<double>::infinity();
        if (!cfg.side_relations.empty()) {
          if (s > 0 && done[s - 1]) {
            RelationId r = cfg.side_relations[s - 1];
            cons = std::min(cons,
                            translation_residual(table.entity[decoded[s - 1]],
                                                 table.relation[r],
                                                 table.entity[e]));
          }
          if (s + 1 < n && done[s + 1]) {
            RelationId r = cfg.side_relations[s];
            cons = std::min(cons,
                            translation_residual(table.entity[e],
                                                 table.relation[r],
                                                 table.entity[decoded[s + 1]]));
          }
        } else {
          for (int t = 0; t < n; ++t) {
            if (t == s || !done[t]) continue;
            EntityId nb = decoded[t];
            for (const Edge& ed : kg.out[nb])
              if (ed.other == e)
                cons = std::min(cons, translation_residual(
                                          table.entity[nb],
                                          table.relation[ed.rel],
                                          table.entity[e]));
            for (const Edge& ed : kg.in[nb])
              if (ed.other == e)
                cons = std::min(cons, translation_residual(
                                          table.entity[e],
                                          table.relation[ed.rel],
                                          table.entity[nb]));
          }
        }
        if (std::isfinite(cons))
          score = cfg.alpha * chan[s][e] + (1.0 - cfg.alpha) * cons;
      }
      if (score < best_score) {
        best_score = score;
        best = e;
      }
    }
    decoded[s] = best;
    done[s] = true;
  }
  return decoded;
}

void DecodeReport::merge(const DecodeReport& o) {
  overall.symbols += o.overall.symbols;
  overall.errors += o.overall.errors;
  if (per_layer.size() < o.per_layer.size())
    per_layer.resize(o.per_layer.size());
  for (size_t i = 0; i < o.per_layer.size(); ++i) {
    per_layer[i].symbols += o.per_layer[i].symbols;
    per_layer[i].errors += o.per_layer[i].errors;
  }
}

DecodeReport symbol_error_rate(const std::vector<EntityId>& decoded,
                               const std::vector<EntityId>& truth,
                               const LayerAssignment* layers) {
  if (decoded.size() != truth.size())
    throw ComputeError("decoded/truth length mismatch");
  DecodeReport rep;
  if (layers) rep.per_layer.resize(layers->n_layers);
  for (size_t i = 0; i < truth.size(); ++i) {
    bool err = decoded[i] != truth[i];
    rep.overall.symbols++;
    rep.overall.errors += err;
    if (layers) {
      int l = layers->layer[truth[i]];
      rep.per_layer[l - 1].symbols++;
      rep.per_layer[l - 1].errors += err;
    }
  }
  return rep;
}

}  // namespace irml
