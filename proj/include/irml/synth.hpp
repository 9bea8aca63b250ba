#pragma once
#include "irml/graph.hpp"

namespace irml {

// Seeded scale-free typed KG (preferential attachment, coin-flipped edge
// direction, zipf-ish relation usage).  Stand-in for a KG-benchmark subgraph
// when no dataset directory is supplied: heavy-tailed degrees with hubs past
// the top layering threshold.
struct ScaleFreeSpec {
  int n_entities = 2000;
  int n_relations = 24;
  int edges_per_node = 6;
  uint64_t seed = 1;
};
KnowledgeGraph synth_scale_free_kg(const ScaleFreeSpec& spec);

// Seeded KG with planted degree targets: n_per_level entities aimed at each
// target degree, wired configuration-model style over shuffled stubs.  Edge
// labels follow the latent geometry except for a label_noise fraction that is
// labeled at random, like imperfectly extracted real-world triples; entities
// with many edges average the noise out while sparsely connected ones do not.
// Guarantees every degree bucket of a bucketed accuracy sweep is populated,
// which heavy-tailed graphs do not.
struct DegreeLadderSpec {
  std::vector<int> target_degrees = {10, 30, 50, 70, 90};
  int n_per_level = 40;
  // Optional per-level entity counts (same length as target_degrees).  When
  // empty every level holds n_per_level entities; a decreasing profile such
  // as {400, 200, 100, 50, 25} reproduces the heavy-tailed shape of real
  // knowledge graphs, where hubs are rare and leaves plentiful.
  std::vector<int> level_counts;
  int n_relations = 12;
  double label_noise = 0.25;
  uint64_t seed = 1;
};
KnowledgeGraph synth_degree_ladder_kg(const DegreeLadderSpec& spec);

// Fixed 8-entity, 3-relation ring MDP: "next" steps +1, "skip" steps +2,
// "back" steps -1.  Expert behavior is the deterministic 2-step "next, next"
// pattern from every entity, so a stationary policy can imitate it exactly.
struct ToyMdp {
  KnowledgeGraph kg;
  std::vector<ReasoningPath> experts;
};
ToyMdp synth_toy_mdp();

// Seeded citation-style labeled graph: planted subject partition, homophilous
// directed edges, bag-of-words features concentrated on per-subject word
// blocks.  Stand-in for a Planetoid citation dataset.
struct CitationSpec {
  int n_entities = 2708;
  int n_subjects = 6;
  int feature_dim = 96;
  int avg_out_degree = 4;
  double homophily = 0.92;
  int words_per_node = 12;
  double word_fidelity = 0.82;  // probability a word comes from own block
  uint64_t seed = 1;
};
KnowledgeGraph synth_citation_graph(const CitationSpec& spec);

}  // namespace irml
