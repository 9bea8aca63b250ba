#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irml/errors.hpp"
#include "irml/rng.hpp"

namespace irml {

using EntityId = int32_t;
using RelationId = int32_t;

struct Triple {
  EntityId head;
  RelationId rel;
  EntityId tail;
  bool operator==(const Triple& o) const {
    return head == o.head && rel == o.rel && tail == o.tail;
  }
};

struct Edge {
  RelationId rel;
  EntityId other;
};

// Directed multi-relational graph with optional node labels and features.
// Build by adding entities/triples, then call finalize() to dedup triples and
// construct sorted adjacency.
struct KnowledgeGraph {
  std::vector<std::string> entity_names;
  std::vector<std::string> relation_names;
  std::vector<Triple> triples;
  std::vector<std::vector<Edge>> out;  // per entity: (rel, tail), sorted
  std::vector<std::vector<Edge>> in;   // per entity: (rel, head), sorted
  std::vector<int> labels;             // subject index per entity, -1 = none
  std::vector<std::string> subject_names;
  std::vector<std::vector<float>> features;  // optional, uniform width

  int n_entities() const { return static_cast<int>(entity_names.size()); }
  int n_relations() const { return static_cast<int>(relation_names.size()); }
  int n_triples() const { return static_cast<int>(triples.size()); }

  EntityId add_entity(const std::string& name);
  RelationId add_relation(const std::string& name);
  void add_triple(EntityId h, RelationId r, EntityId t);
  void finalize();  // dedup + adjacency + membership index

  // Incident triple count, incoming plus outgoing.
  int degree(EntityId e) const {
    return static_cast<int>(out[e].size() + in[e].size());
  }
  bool has_triple(EntityId h, RelationId r, EntityId t) const;
  // Distinct relation ids with at least one outgoing edge at e, ascending.
  std::vector<RelationId> available_relations(EntityId e) const;
  // Tails of (e, r), ascending entity id.
  std::vector<EntityId> tails(EntityId e, RelationId r) const;

 private:
  std::unordered_set<uint64_t> triple_index_;
  uint64_t key(EntityId h, RelationId r, EntityId t) const {
    return (static_cast<uint64_t>(h) * (n_relations() + 1u) + r) *
               (n_entities() + 1u) +
           t;
  }
};

// --- loaders ---------------------------------------------------------------

// TAB-separated "head<TAB>relation<TAB>tail" lines, UTF-8, duplicates dropped.
KnowledgeGraph load_triples(const std::string& path);

struct PlanetoidLoad {
  KnowledgeGraph kg;
  int skipped_citations = 0;  // citations naming unknown ids
};
// Planetoid .content (id, features..., label) and .cites (cited citing) files.
PlanetoidLoad load_planetoid(const std::string& content_path,
                             const std::string& cites_path);

// --- abstraction layers ----------------------------------------------------

struct LayerAssignment {
  std::vector<int> layer;  // 1-based layer per entity; 1 = highest abstraction
  int n_layers = 0;
  std::vector<int> counts() const;
  std::vector<double> fractions() const;
};

// thresholds must be strictly descending positive degree cutoffs; with
// thresholds t1 > ... > t_{L-1}: layer 1 <=> degree > t1, layer i in [2,L-1]
// <=> t_i <= degree <= t_{i-1}, layer L <=> degree < t_{L-1}.
LayerAssignment layer_by_degree(const KnowledgeGraph& kg,
                                const std::vector<int>& thresholds);

// --- reasoning paths ---------------------------------------------------------

struct PathStep {
  RelationId rel;
  EntityId entity;
};

struct ReasoningPath {
  EntityId origin = -1;
  std::vector<PathStep> steps;
  int length() const { return static_cast<int>(steps.size()); }
  EntityId terminal() const {
    return steps.empty() ? origin : steps.back().entity;
  }
};

// Entity payload of a message prior to encoding.
struct ExplicitSemantics {
  std::vector<EntityId> entities;  // declaration order, no duplicates
  std::optional<EntityId> origin;
};

struct PathSampleOptions {
  int n_paths = 100;
  int max_len = 4;  // horizon J; longer shortest paths are resampled
  uint64_t seed = 1;
  int retry_factor = 100;  // retry budget = retry_factor * n_paths
  // When set, only traverse edges that do not move to a strictly higher
  // abstraction (smaller layer index).
  const LayerAssignment* layer_monotone = nullptr;
};

// Shortest directed paths between uniformly sampled ordered entity pairs via
// two-sided BFS; ties broken by the smallest next entity id, then smallest
// relation id.  Throws DataError when the retry budget is exhausted.
std::vector<ReasoningPath> sample_expert_paths(const KnowledgeGraph& kg,
                                               const PathSampleOptions& opt);

// Deterministic single-pair shortest path; empty optional when unreachable or
// longer than max_len.
std::optional<ReasoningPath> shortest_path(
    const KnowledgeGraph& kg, EntityId from, EntityId to, int max_len,
    const LayerAssignment* layer_monotone = nullptr);

// --- partitioning ------------------------------------------------------------

struct PartitionSpec {
  int k_servers = 3;
  double noniid_p = 1.0;  // 1 = iid uniform, 0 = single-subject servers
  uint64_t seed = 1;
};

struct Partition {
  std::vector<int> owner;  // entity -> server id, -1 = unassigned
  std::vector<KnowledgeGraph> locals;
  std::vector<std::vector<EntityId>> local_to_global;
  std::vector<Triple> dropped;  // triples crossing two owned servers
  int unused_triples = 0;       // triples touching an unassigned entity
};

// Conserving partition: every entity owned by exactly one server.  Subjects
// are assigned round-robin to servers; each server draws (1-p) of its subject
// pool exclusively, the leftovers are pooled and dealt evenly.
Partition partition(const KnowledgeGraph& kg, const PartitionSpec& spec);

// Budgeted protocol: each server holds a fixed budget of n_entities/n_subjects
// entities, (1-p) of them from its single assigned subject and p of them drawn
// uniformly across subjects; entities beyond the K budgets stay unassigned, so
// coverage grows with the server count.
Partition partition_budgeted(const KnowledgeGraph& kg,
                             const PartitionSpec& spec);

// Cross-server triples under an ownership map (both endpoints owned, owners
// differ).
std::vector<Triple> dropped_edges(const KnowledgeGraph& kg,
                                  const std::vector<int>& owner);

// Seeded connected induced subgraph of at most max_entities entities (BFS ball
// around a random start, undirected expansion, smallest-id frontier order).
KnowledgeGraph induced_subgraph(const KnowledgeGraph& kg, int max_entities,
                                uint64_t seed);

}  // namespace irml
