#pragma once
#include "irml/channel.hpp"
#include "irml/reasoner.hpp"

namespace irml {

// Per-symbol nearest codeword over the entity codebook after gain removal;
// ties go to the lowest entity id; g_hat == 0 is a ComputeError.  Only spans
// of kind 'e' are decoded, in order.
std::vector<EntityId> hard_decode(const ReceivedSignal& rx,
                                  const EmbeddingTable& table, double g_hat);

struct SoftDecodeResult {
  std::vector<double> p_hat;        // received head + summed relation vectors
  std::vector<RelationId> relations;
  bool truncated = false;           // dead end before j_steps
};

// Path-message estimate: start from the received head vector and add J
// relation vectors chosen greedily by the policy from the nearest-entity
// state.
SoftDecodeResult soft_decode_path(const std::vector<double>& received_head,
                                  const PolicyNetwork& net,
                                  const PolicyContext& ctx,
                                  const EmbeddingTable& table, int j_steps,
                                  double g_hat);

struct RecoveryConfig {
  double alpha = 0.5;  // weight of the channel term; 1 - alpha on consistency
  // Path protocol side info: relation ids between consecutive entity symbols
  // (size = n_entity_symbols - 1).  Empty -> candidates from kg adjacency.
  std::vector<RelationId> side_relations;
  // Optional layered schedule: decode layer 1 first, then 2, ...; within a
  // layer most-confident first.  Null -> pure confidence order.
  const LayerAssignment* layer_schedule = nullptr;
  // Layered-protocol side info: the abstraction layer of each entity symbol
  // (size = n_entity_symbols).  Candidates are restricted to that layer and
  // the decode order follows the tags; empty -> no restriction.  Requires
  // layer_schedule.
  std::vector<int> side_layers;
};

// Reasoning-assisted recovery: score(e) = alpha * channel distance +
// (1-alpha) * best translation consistency against already-decoded symbols;
// symbols are decoded most-confident-first (ascending nearest-codeword
// distance).  alpha = 1 reduces to hard_decode exactly.
std::vector<EntityId> recover_with_reasoning(const ReceivedSignal& rx,
                                             const KnowledgeGraph& kg,
                                             const EmbeddingTable& table,
                                             double g_hat,
                                             const RecoveryConfig& cfg);

struct LayerErrors {
  long symbols = 0;
  long errors = 0;
  double ser() const { return symbols ? double(errors) / symbols : 0.0; }
};

struct DecodeReport {
  LayerErrors overall;
  std::vector<LayerErrors> per_layer;  // index 0 = layer 1
  void merge(const DecodeReport& o);
};

// Exact error fractions; layers (optional) bucket errors by the true entity's
// layer.  Length mismatch -> ComputeError.
DecodeReport symbol_error_rate(const std::vector<EntityId>& decoded,
                               const std::vector<EntityId>& truth,
                               const LayerAssignment* layers = nullptr);

}  // namespace irml
