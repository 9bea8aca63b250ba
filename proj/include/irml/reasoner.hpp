#pragma once
#include <map>
#include <tuple>
#include <vector>

#include "irml/codec.hpp"
#include "irml/graph.hpp"

namespace irml {

// --- policy (interpreter) -----------------------------------------------------

// Two-layer graph-convolutional policy: per-entity input feature = embedding
// concat one-hot abstraction layer, aggregated as the mean over the entity and
// its (undirected) neighbors, then relu(W1 .) -> relation scores W2 -> masked
// softmax over the relations available at the entity, clipped to
// [eps, 1-eps] and renormalized.
struct PolicyNetwork {
  int in_dim = 0, hidden = 0, n_relations = 0;
  std::vector<double> w1;  // hidden x in_dim, row-major
  std::vector<double> w2;  // n_relations x hidden, row-major
  double eps = 1e-3;
};

PolicyNetwork init_policy(int in_dim, int hidden, int n_relations,
                          uint64_t seed, double scale = 0.1);

// Per-graph precomputation: aggregated input features, available actions, and
// (optionally layer-masked) tail lists.
struct PolicyContext {
  int in_dim = 0;
  int n_layers = 1;
  std::vector<std::vector<double>> agg;           // per entity
  std::vector<std::vector<RelationId>> avail;     // sorted relation ids
  std::vector<std::vector<std::vector<EntityId>>> tails;  // per entity, per avail idx
};
// layers: optional abstraction layers (adds the one-hot block and, when
// mask_upward, drops tails that climb to a smaller layer index together with
// any action left without tails).
PolicyContext build_policy_context(const KnowledgeGraph& kg,
                                   const EmbeddingTable& table,
                                   const LayerAssignment* layers = nullptr,
                                   bool mask_upward = false);

struct PolicyEval {
  std::vector<RelationId> actions;  // = ctx.avail[e]
  std::vector<double> probs;        // clipped + renormalized, sums to 1
  // forward cache for backprop
  std::vector<double> hidden;       // relu(W1 a)
  std::vector<double> soft;         // pre-clip softmax
  std::vector<bool> unclipped;      // softmax value inside (eps, 1-eps)
};

PolicyEval policy_forward(const PolicyNetwork& net, const PolicyContext& ctx,
                          EntityId e);

// Accumulate coeff * d(log prob[action_idx])/dW into gw1/gw2 (same layout as
// the network weights).
void add_logprob_grad(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId e, const PolicyEval& ev, int action_idx,
                      double coeff, std::vector<double>& gw1,
                      std::vector<double>& gw2);
// Accumulate coeff * d(entropy of the action distribution)/dW.
void add_entropy_grad(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId e, const PolicyEval& ev, double coeff,
                      std::vector<double>& gw1, std::vector<double>& gw2);

// One episode: J actions (relation sampled from the policy, tail uniform among
// the relation's tails); greedy mode takes the max-probability relation
// (ties: lowest relation id) and the lowest tail id, and is fully
// deterministic.  Dead ends truncate.
ReasoningPath rollout(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId origin, int j_steps, Rng& rng,
                      bool greedy = false);

// --- occupancy measures -------------------------------------------------------

// Mass per ((entity, t), relation); the Markov state is the pair (current
// entity, step index).
struct OccupancyTable {
  std::map<std::tuple<EntityId, int, RelationId>, double> mass;
  double total() const;
  // Sum over actions at one state.
  double state_mass(EntityId e, int t) const;
};

// Exact dynamic program from an initial entity distribution.
OccupancyTable occupancy_exact(const PolicyNetwork& net,
                               const PolicyContext& ctx,
                               const std::vector<std::pair<EntityId, double>>& init,
                               int j_steps);
// Monte-Carlo estimate from n_rollouts sampled episodes.
OccupancyTable occupancy_mc(const PolicyNetwork& net, const PolicyContext& ctx,
                            const std::vector<EntityId>& origins, int j_steps,
                            int n_rollouts, Rng& rng);
// Empirical occupancy of a path set replayed as a policy.
OccupancyTable occupancy_expert(const std::vector<ReasoningPath>& paths);

double occupancy_tv(const OccupancyTable& a, const OccupancyTable& b);

// --- distances and objective ---------------------------------------------------

// Gamma = sum over the expert support of c_E * (-log c_D), c_D clipped to
// [eps, 1].
double distance_statistic(const OccupancyTable& expert,
                          const OccupancyTable& learner, double eps = 1e-3);

// Mean expert translation residual ||e_t + r_{t+1} - e_{t+1}||^2 minus the
// same statistic over generated paths; either set empty -> ComputeError.
double distance_energy(const std::vector<ReasoningPath>& expert,
                       const std::vector<ReasoningPath>& generated,
                       const EmbeddingTable& table);

// H = sum c(a,s) * (-log(c(a,s)/sum_a' c(a',s))).
double causal_entropy(const OccupancyTable& occ);

// F = -H(learner) + lambda * Gamma(expert, learner).
double loss_f(const OccupancyTable& learner, const OccupancyTable& expert,
              double lambda, double eps = 1e-3);

// --- evaluator ------------------------------------------------------------------

// One-hidden-layer discriminator with sigmoid output on the fixed-length path
// feature (origin embedding concat summed step relation vectors).
struct EvaluatorNetwork {
  int in_dim = 0, hidden = 0;
  std::vector<double> w1;  // hidden x in_dim
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
};

EvaluatorNetwork init_evaluator(int in_dim, int hidden, uint64_t seed,
                                double scale = 0.1);
std::vector<double> path_feature(const ReasoningPath& path,
                                 const EmbeddingTable& table);
double evaluator_forward(const EvaluatorNetwork& net,
                         const std::vector<double>& x);
// Accumulate coeff * d(log D)/dparams (use_log_d) or coeff * d(log(1-D)).
void add_evaluator_grad(const EvaluatorNetwork& net,
                        const std::vector<double>& x, bool use_log_d,
                        double coeff, EvaluatorNetwork& grad);

// Gradient-ascent steps on mean log D(expert) + mean log(1-D(generated)).
void train_evaluator(EvaluatorNetwork& net,
                     const std::vector<std::vector<double>>& expert_x,
                     const std::vector<std::vector<double>>& generated_x,
                     int steps, double lr);

// --- imitation training -----------------------------------------------------------

struct ImitationConfig {
  int updates = 2000;
  int batch = 16;
  int j_steps = 2;
  double policy_lr = 0.05;
  double eval_lr = 0.1;
  int eval_steps = 2;
  double lambda = 1e-2;  // entropy bonus weight
  int hidden = 32;
  int eval_hidden = 32;
  uint64_t seed = 1;
  bool mask_upward = false;
  int history_every = 20;
};

struct HistoryRow {
  int update = 0;
  double distance_i = 0;      // occupancy cross-statistic on the batch
  double distance_ii = 0;     // translation-energy difference on the batch
  double evaluator_acc = 0;
  double policy_entropy = 0;  // mean action entropy over generated steps
};

// Single-trainer state; the federated loop drives K of these and averages the
// policy weights.  One step = sample origins, roll out, evaluator ascent,
// likelihood-ratio policy step with entropy bonus.
class InterpreterTrainer {
 public:
  InterpreterTrainer(const KnowledgeGraph& kg, const EmbeddingTable& table,
                     const LayerAssignment* layers,
                     std::vector<ReasoningPath> experts, ImitationConfig cfg);
  void step();
  HistoryRow metrics(int update_index);
  // Fraction of expert paths whose greedy rollout from the same origin
  // reproduces the exact step sequence.
  double greedy_match_rate() const;

  PolicyNetwork& policy() { return policy_; }
  const PolicyNetwork& policy() const { return policy_; }
  EvaluatorNetwork& evaluator() { return eval_; }
  const PolicyContext& context() const { return ctx_; }
  const std::vector<ReasoningPath>& experts() const { return experts_; }
  int steps_done() const { return steps_done_; }

 private:
  const KnowledgeGraph& kg_;
  const EmbeddingTable& table_;
  ImitationConfig cfg_;
  PolicyContext ctx_;
  PolicyNetwork policy_;
  EvaluatorNetwork eval_;
  std::vector<ReasoningPath> experts_;
  std::vector<std::vector<double>> expert_x_;
  Rng rng_;
  int steps_done_ = 0;
  std::vector<ReasoningPath> last_batch_;
  std::vector<ReasoningPath> last_expert_batch_;
};

struct ImitationResult {
  PolicyNetwork policy;
  EvaluatorNetwork evaluator;
  std::vector<HistoryRow> history;
};

ImitationResult train_interpreter(const KnowledgeGraph& kg,
                                  const EmbeddingTable& table,
                                  const LayerAssignment* layers,
                                  const std::vector<ReasoningPath>& experts,
                                  const ImitationConfig& cfg);

}  // namespace irml
