#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "irml/graph.hpp"

namespace irml {

struct CodecConfig {
  int dim = 50;
  int epochs = 200;
  double lr = 0.01;
  double margin = 1.0;  // hinge margin
  int batch_size = 128;
  int negatives_per_positive = 1;
  uint64_t seed = 1;
};

struct EmbeddingTable {
  int dim = 0;
  std::vector<std::vector<double>> entity;
  std::vector<std::vector<double>> relation;
};

// Uniform init on [-6/sqrt(d), +6/sqrt(d)] per coordinate.
EmbeddingTable init_table(int n_entities, int n_relations, int dim,
                          uint64_t seed);

// Positive triple paired with its corruption; the corruption shares the
// relation and replaces head or tail.
struct TriplePair {
  Triple pos;
  Triple neg;
};

// Sum over pairs of max{0, margin + ||h+r-t||^2 - ||h'+r-t'||^2}.
double margin_loss(const std::vector<TriplePair>& pairs,
                   const EmbeddingTable& table, double margin);

// Per-vector subgradient contributions, keyed by ('e'|'r', id); hinge-inactive
// pairs contribute nothing.
using GradMap = std::map<std::pair<char, int>, std::vector<double>>;
GradMap loss_gradient(const std::vector<TriplePair>& pairs,
                      const EmbeddingTable& table, double margin);

struct TrainResult {
  EmbeddingTable table;
  std::vector<double> epoch_mean_loss;  // mean hinge per pair, each epoch
};

// Minibatch SGD over shuffled triples with uniform head/tail corruption
// (corruptions colliding with real triples are resampled); entity vectors are
// renormalized to unit length after every epoch.  Zero epochs returns the
// seeded initialization untouched.
TrainResult train_encoder(const KnowledgeGraph& kg, const CodecConfig& cfg);

// --- signals -----------------------------------------------------------------

struct SymbolSpan {
  char kind;  // 'e' entity, 'r' relation
  int id;
  int offset;
  int len;
};

struct EncodedSignal {
  std::vector<double> samples;
  std::vector<SymbolSpan> spans;  // tile samples exactly, in order
  double power() const;           // mean square sample; empty -> ComputeError
};

// Concatenated entity vectors in declaration order.
EncodedSignal encode_entities(const std::vector<EntityId>& entities,
                              const EmbeddingTable& table);
// Path encoding: origin, then per step either (relation, entity) vectors when
// include_relations, or entity vectors only (relations ride as side info).
EncodedSignal encode_path(const ReasoningPath& path,
                          const EmbeddingTable& table, bool include_relations);

// 17-significant-digit CSV with rows kind,id,c0..c{d-1}; parse round-trips to
// identical doubles.
void save_table_csv(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_table_csv(const std::string& path);

// --- small vector helpers shared across modules -----------------------------

double dot(const std::vector<double>& a, const std::vector<double>& b);
double sq_dist(const std::vector<double>& a, const std::vector<double>& b);
// || h + r - t ||^2
double translation_residual(const std::vector<double>& h,
                            const std::vector<double>& r,
                            const std::vector<double>& t);

}  // namespace irml
