#pragma once
#include <vector>

#include "irml/gcn.hpp"
#include "irml/graph.hpp"
#include "irml/reasoner.hpp"

namespace irml {

// Coordinatewise weighted average into dst; weights must sum to 1 within 1e-9
// and shapes must agree exactly.
void fedavg(std::vector<double>& dst,
            const std::vector<const std::vector<double>*>& srcs,
            const std::vector<double>& gamma);

struct FederationConfig {
  int servers = 3;
  int local_steps = 5;   // E: steps between aggregations
  int total_steps = 100; // T: total local steps per server
  double noniid_p = 1.0;
  uint64_t seed = 1;
  bool identical_server_seeds = false;  // replicas share one RNG stream
};

struct FedTraceRow {
  int round = 0;
  int server = -1;  // -1 = aggregated row
  double local_loss = 0.0;
  double val_accuracy = 0.0;
};

// --- federated imitation (interpreter weights only; evaluators stay local) ----

struct FedReasoningResult {
  PolicyNetwork global;
  std::vector<FedTraceRow> trace;
  int dropped_triples = 0;
};

FedReasoningResult run_federated_reasoning(
    const std::vector<const KnowledgeGraph*>& server_kgs,
    const std::vector<const EmbeddingTable*>& server_tables,
    const std::vector<std::vector<ReasoningPath>>& server_experts,
    const ImitationConfig& imitation, const FederationConfig& fed);

// --- federated node classification (proxy task) -------------------------------

struct FedClassResult {
  GcnModel global;
  std::vector<FedTraceRow> trace;
  double final_val_accuracy = 0.0;
};

// Each server trains on its induced local graph and labeled local nodes; the
// aggregated model is scored on the global graph's validation nodes.
FedClassResult run_federated_classification(
    const KnowledgeGraph& global_kg, const Partition& part,
    const std::vector<int>& val_idx, const GcnConfig& gcn,
    const FederationConfig& fed);

// --- cross-server link policy ---------------------------------------------------

// Logistic scorer on symmetric embedding-pair features, trained with the same
// FedAvg loop on dropped cross-server triples (positives) vs uniformly
// sampled non-edges (1:1).
struct CrossServerPolicy {
  std::vector<double> w;
  double b = 0.0;
  bool trivial = false;  // no dropped edges: always scores 0
  double score(const std::vector<double>& eu,
               const std::vector<double>& ev) const;
};

CrossServerPolicy train_cross_server_policy(const KnowledgeGraph& kg,
                                            const std::vector<int>& owner,
                                            const std::vector<Triple>& dropped,
                                            const EmbeddingTable& table,
                                            const FederationConfig& fed,
                                            int steps, double lr);

// --- convergence machinery -------------------------------------------------------

// rho = F* - sum_k gamma_k F_k*.
double heterogeneity_rho(double f_star, const std::vector<double>& f_k_star,
                         const std::vector<double>& gamma);

// || K * Xk^T Ak^T Ak^T Ak Ak Xk  -  X^T A^T A^T A A X ||_F^2 with dense
// row-major matrices; feature widths must match.
double divergence_d(const std::vector<std::vector<double>>& a_k,
                    const std::vector<std::vector<double>>& x_k,
                    const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& x, int k_servers);

struct BoundParams {
  double mu = 1.0;       // strong convexity
  double l_smooth = 1.0; // smoothness
  double sigma_l = 0.0;  // uniform bound on local gradient norms
  double rho = 0.0;      // heterogeneity
  double divergence = 0.0;
  double l_p = 0.0;      // Lipschitz constant on the divergence term
  int e_local = 1;       // E
  long n_entities = 1;   // N
  double init_gap_sq = 0.0;  // ||w_1 - w*||^2
};

// kappa = L/mu, zeta = max(8 kappa, E), eta_t = 2/(mu (zeta + t));
// Omega = 4(1+2(E-1)^2) sigma_L^2 + 4 L rho + (mu^2 zeta / 4) ||w1-w*||^2;
// bound(T) = (2 kappa / (zeta + T - 1)) * (Omega/mu + 2 L_p D / (mu N)).
double theorem3_bound(const BoundParams& p, long t_steps);

// Synthetic strongly-convex quadratic suite: K diagonal quadratics with
// spectra inside [mu, L], FedAvg with the decaying schedule, observed
// aggregated optimality gap logged at every aggregation against the bound.
struct BoundCheckRow {
  long t = 0;
  double observed_gap = 0.0;
  double bound = 0.0;
};
struct BoundCheckResult {
  std::vector<BoundCheckRow> rows;
  BoundParams params;
};
BoundCheckResult run_bound_check(int k_servers, int dim, int e_local,
                                 int total_steps, double mu, double l_smooth,
                                 uint64_t seed);

}  // namespace irml
