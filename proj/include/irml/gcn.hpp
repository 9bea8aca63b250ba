#pragma once
#include <vector>

#include "irml/graph.hpp"

namespace irml {

// Symmetrically normalized adjacency with self-loops over the undirected
// union of a graph's triples, plus dense node features; the substrate for the
// node-classification proxy task.
struct GcnGraph {
  int n = 0;
  std::vector<int> row_ptr, col;  // CSR of A_hat
  std::vector<double> val;
  std::vector<std::vector<double>> x;  // node features
  int in_dim = 0;
};

GcnGraph build_gcn_graph(const KnowledgeGraph& kg);

struct GcnConfig {
  int hidden = 32;
  double lr = 0.2;
  uint64_t seed = 1;
};

// Two-layer GCN: Z = A_hat * relu(A_hat * X * W1) * W2, softmax cross-entropy
// on labeled training nodes, manual backprop, full-batch gradient steps.
struct GcnModel {
  int in_dim = 0, hidden = 0, n_classes = 0;
  std::vector<double> w1;  // in_dim x hidden, row-major
  std::vector<double> w2;  // hidden x n_classes
};

GcnModel init_gcn(int in_dim, int hidden, int n_classes, uint64_t seed);

// One full-batch gradient step on the cross-entropy over train_idx; returns
// the pre-step loss.
double gcn_step(GcnModel& m, const GcnGraph& g, const std::vector<int>& train_idx,
                const std::vector<int>& labels, double lr);

std::vector<int> gcn_predict(const GcnModel& m, const GcnGraph& g);
double gcn_accuracy(const GcnModel& m, const GcnGraph& g,
                    const std::vector<int>& idx, const std::vector<int>& labels);

}  // namespace irml
