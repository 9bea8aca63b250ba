#include "irml/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace irml {

// --- policy -----------------------------------------------------------------------

PolicyNetwork init_policy(int in_dim, int hidden, int n_relations, uint64_t seed,
                          double scale) {
  PolicyNetwork net;
  net.in_dim = in_dim;
  net.hidden = hidden;
  net.n_relations = n_relations;
  net.w1.assign(static_cast<size_t>(hidden) * in_dim, 0.0);
  net.w2.assign(static_cast<size_t>(n_relations) * hidden, 0.0);
  if (scale > 0) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& x : net.w1) x = u(rng);
    for (double& x : net.w2) x = u(rng);
  }
  return net;
}

PolicyContext build_policy_context(const KnowledgeGraph& kg,
                                   const EmbeddingTable& table,
                                   const LayerAssignment* layers,
                                   bool mask_upward) {
  if (static_cast<int>(table.entity.size()) != kg.n_entities())
    throw ComputeError("embedding table does not cover the graph");
  PolicyContext ctx;
  ctx.n_layers = layers ? layers->n_layers : 1;
  ctx.in_dim = table.dim + ctx.n_layers;
  const int n = kg.n_entities();

  auto input_feature = [&](EntityId e) {
    std::vector<double> x(ctx.in_dim, 0.0);
    for (int i = 0; i < table.dim; ++i) x[i] = table.entity[e][i];
    int l = layers ? layers->layer[e] : 1;
    x[table.dim + (l - 1)] = 1.0;
    return x;
  };

  ctx.agg.resize(n);
  for (EntityId e = 0; e < n; ++e) {
    // mean input feature over the entity and its undirected neighbors
    std::vector<EntityId> nbrs{e};
    for (const Edge& ed : kg.out[e]) nbrs.push_back(ed.other);
    for (const Edge& ed : kg.in[e]) nbrs.push_back(ed.other);
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    std::vector<double> acc(ctx.in_dim, 0.0);
    for (EntityId u : nbrs) {
      std::vector<double> x = input_feature(u);
      for (int i = 0; i < ctx.in_dim; ++i) acc[i] += x[i];
    }
    for (double& v : acc) v /= nbrs.size();
    ctx.agg[e] = std::move(acc);
  }

  ctx.avail.resize(n);
  ctx.tails.resize(n);
  for (EntityId e = 0; e < n; ++e) {
    for (RelationId r : kg.available_relations(e)) {
      std::vector<EntityId> ts = kg.tails(e, r);
      if (mask_upward && layers) {
        std::vector<EntityId> kept;
        for (EntityId t : ts)
          if (layers->layer[t] >= layers->layer[e]) kept.push_back(t);
        ts = std::move(kept);
      }
      if (!ts.empty()) {
        ctx.avail[e].push_back(r);
        ctx.tails[e].push_back(std::move(ts));
      }
    }
  }
  return ctx;
}

PolicyEval policy_forward(const PolicyNetwork& net, const PolicyContext& ctx,
                          EntityId e) {
  PolicyEval ev;
  ev.actions = ctx.avail[e];
  const int m = static_cast<int>(ev.actions.size());
  if (m == 0) return ev;
  const std::vector<double>& a = ctx.agg[e];
  ev.hidden.resize(net.hidden);
  for (int h = 0; h < net.hidden; ++h) {
    double s = 0;
    const double* row = &net.w1[static_cast<size_t>(h) * net.in_dim];
    for (int i = 0; i < net.in_dim; ++i) s += row[i] * a[i];
    ev.hidden[h] = s > 0 ? s : 0.0;
  }
  std::vector<double> z(m);
  for (int j = 0; j < m; ++j) {
    const double* row = &net.w2[static_cast<size_t>(ev.actions[j]) * net.hidden];
    double s = 0;
    for (int h = 0; h < net.hidden; ++h) s += row[h] * ev.hidden[h];
    z[j] = s;
  }
  double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0;
  ev.soft.resize(m);
  for (int j = 0; j < m; ++j) {
    ev.soft[j] = std::exp(z[j] - zmax);
    sum += ev.soft[j];
  }
  for (double& p : ev.soft) p /= sum;
  ev.unclipped.resize(m);
  ev.probs.resize(m);
  double s2 = 0;
  for (int j = 0; j < m; ++j) {
    double c = std::min(std::max(ev.soft[j], net.eps), 1.0 - net.eps);
    ev.unclipped[j] = ev.soft[j] > net.eps && ev.soft[j] < 1.0 - net.eps;
    ev.probs[j] = c;
    s2 += c;
  }
  for (double& p : ev.probs) p /= s2;
  return ev;
}

namespace {

// Chain dL/d(renormalized probs) back onto the weights; shared by the
// log-prob and entropy gradients.
void chain_to_weights(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId e, const PolicyEval& ev,
                      const std::vector<double>& dl_dptilde, double coeff,
                      std::vector<double>& gw1, std::vector<double>& gw2) {
  const int m = static_cast<int>(ev.actions.size());
  // p_tilde = c / sum(c), c = clip(soft)
  double s = 0;
  std::vector<double> c(m);
  for (int j = 0; j < m; ++j) {
    c[j] = std::min(std::max(ev.soft[j], net.eps), 1.0 - net.eps);
    s += c[j];
  }
  double inner = 0;  // sum_i dl_dptilde_i * p_tilde_i
  for (int j = 0; j < m; ++j) inner += dl_dptilde[j] * (c[j] / s);
  std::vector<double> dl_dsoft(m);
  for (int j = 0; j < m; ++j) {
    double dl_dc = (dl_dptilde[j] - inner) / s;
    dl_dsoft[j] = ev.unclipped[j] ? dl_dc : 0.0;
  }
  // softmax jacobian
  double inner2 = 0;
  for (int j = 0; j < m; ++j) inner2 += dl_dsoft[j] * ev.soft[j];
  std::vector<double> dl_dz(m);
  for (int j = 0; j < m; ++j)
    dl_dz[j] = ev.soft[j] * (dl_dsoft[j] - inner2);
  // through W2 and the relu layer
  std::vector<double> dl_dh(net.hidden, 0.0);
  for (int j = 0; j < m; ++j) {
    double* grow = &gw2[static_cast<size_t>(ev.actions[j]) * net.hidden];
    const double* row = &net.w2[static_cast<size_t>(ev.actions[j]) * net.hidden];
    for (int h = 0; h < net.hidden; ++h) {
      grow[h] += coeff * dl_dz[j] * ev.hidden[h];
      dl_dh[h] += dl_dz[j] * row[h];
    }
  }
  const std::vector<double>& a = ctx.agg[e];
  for (int h = 0; h < net.hidden; ++h) {
    if (ev.hidden[h] <= 0) continue;  // relu gate
    double* grow = &gw1[static_cast<size_t>(h) * net.in_dim];
    for (int i = 0; i < net.in_dim; ++i)
      grow[i] += coeff * dl_dh[h] * a[i];
  }
}

}  // namespace

void add_logprob_grad(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId e, const PolicyEval& ev, int action_idx,
                      double coeff, std::vector<double>& gw1,
                      std::vector<double>& gw2) {
  const int m = static_cast<int>(ev.actions.size());
  std::vector<double> dl(m, 0.0);
  dl[action_idx] = 1.0 / ev.probs[action_idx];
  chain_to_weights(net, ctx, e, ev, dl, coeff, gw1, gw2);
}

void add_entropy_grad(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId e, const PolicyEval& ev, double coeff,
                      std::vector<double>& gw1, std::vector<double>& gw2) {
  const int m = static_cast<int>(ev.actions.size());
  std::vector<double> dl(m);
  for (int j = 0; j < m; ++j) dl[j] = -(std::log(ev.probs[j]) + 1.0);
  chain_to_weights(net, ctx, e, ev, dl, coeff, gw1, gw2);
}

ReasoningPath rollout(const PolicyNetwork& net, const PolicyContext& ctx,
                      EntityId origin, int j_steps, Rng& rng, bool greedy) {
  ReasoningPath path;
  path.origin = origin;
  EntityId cur = origin;
  for (int t = 0; t < j_steps; ++t) {
    PolicyEval ev = policy_forward(net, ctx, cur);
    if (ev.actions.empty()) break;
    int idx = 0;
    if (greedy) {
      for (size_t j = 1; j < ev.probs.size(); ++j)
        if (ev.probs[j] > ev.probs[idx]) idx = static_cast<int>(j);
    } else {
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double cum = 0;
      idx = static_cast<int>(ev.probs.size()) - 1;
      for (size_t j = 0; j < ev.probs.size(); ++j) {
        cum += ev.probs[j];
        if (u < cum) {
          idx = static_cast<int>(j);
          break;
        }
      }
    }
    const std::vector<EntityId>& ts = ctx.tails[cur][idx];
    EntityId next;
    if (greedy || ts.size() == 1) {
      next = ts.front();
    } else {
      next = ts[std::uniform_int_distribution<size_t>(0, ts.size() - 1)(rng)];
    }
    path.steps.push_back({ev.actions[idx], next});
    cur = next;
  }
  return path;
}

// --- occupancy --------------------------------------------------------------------

double OccupancyTable::total() const {
  double s = 0;
  for (const auto& [k, v] : mass) s += v;
  return s;
}

double OccupancyTable::state_mass(EntityId e, int t) const {
  double s = 0;
  auto lo = mass.lower_bound({e, t, std::numeric_limits<RelationId>::min()});
  for (auto it = lo; it != mass.end(); ++it) {
    if (std::get<0>(it->first) != e || std::get<1>(it->first) != t) break;
    s += it->second;
  }
  return s;
}

OccupancyTable occupancy_exact(
    const PolicyNetwork& net, const PolicyContext& ctx,
    const std::vector<std::pair<EntityId, double>>& init, int j_steps) {
  OccupancyTable occ;
  std::map<EntityId, double> cur;
  for (const auto& [e, w] : init) cur[e] += w;
  for (int t = 0; t < j_steps; ++t) {
    std::map<EntityId, double> next;
    for (const auto& [e, w] : cur) {
      if (w <= 0) continue;
      PolicyEval ev = policy_forward(net, ctx, e);
      for (size_t j = 0; j < ev.actions.size(); ++j) {
        double m = w * ev.probs[j];
        occ.mass[{e, t, ev.actions[j]}] += m;
        const auto& ts = ctx.tails[e][j];
        for (EntityId nxt : ts) next[nxt] += m / ts.size();
      }
    }
    cur = std::move(next);
  }
  return occ;
}

OccupancyTable occupancy_mc(const PolicyNetwork& net, const PolicyContext& ctx,
                            const std::vector<EntityId>& origins, int j_steps,
                            int n_rollouts, Rng& rng) {
  if (origins.empty()) throw ComputeError("no rollout origins");
  OccupancyTable occ;
  std::uniform_int_distribution<size_t> dorigin(0, origins.size() - 1);
  for (int i = 0; i < n_rollouts; ++i) {
    ReasoningPath p =
        rollout(net, ctx, origins[dorigin(rng)], j_steps, rng, false);
    EntityId cur = p.origin;
    for (size_t t = 0; t < p.steps.size(); ++t) {
      occ.mass[{cur, static_cast<int>(t), p.steps[t].rel}] += 1.0 / n_rollouts;
      cur = p.steps[t].entity;
    }
  }
  return occ;
}

OccupancyTable occupancy_expert(const std::vector<ReasoningPath>& paths) {
  if (paths.empty()) throw ComputeError("no expert paths");
  OccupancyTable occ;
  for (const ReasoningPath& p : paths) {
    EntityId cur = p.origin;
    for (size_t t = 0; t < p.steps.size(); ++t) {
      occ.mass[{cur, static_cast<int>(t), p.steps[t].rel}] +=
          1.0 / paths.size();
      cur = p.steps[t].entity;
    }
  }
  return occ;
}

double occupancy_tv(const OccupancyTable& a, const OccupancyTable& b) {
  double ta = a.total(), tb = b.total();
  if (ta <= 0 || tb <= 0) throw ComputeError("empty occupancy measure");
  double s = 0;
  auto ia = a.mass.begin();
  auto ib = b.mass.begin();
  while (ia != a.mass.end() || ib != b.mass.end()) {
    if (ib == b.mass.end() || (ia != a.mass.end() && ia->first < ib->first)) {
      s += std::abs(ia->second / ta);
      ++ia;
    } else if (ia == a.mass.end() || ib->first < ia->first) {
      s += std::abs(ib->second / tb);
      ++ib;
    } else {
      s += std::abs(ia->second / ta - ib->second / tb);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * s;
}

// --- distances ---------------------------------------------------------------------

double distance_statistic(const OccupancyTable& expert,
                          const OccupancyTable& learner, double eps) {
  double g = 0;
  for (const auto& [k, ce] : expert.mass) {
    if (ce <= 0) continue;
    auto it = learner.mass.find(k);
    double cd = it == learner.mass.end() ? 0.0 : it->second;
    cd = std::min(std::max(cd, eps), 1.0);
    g += ce * (-std::log(cd));
  }
  return g;
}

namespace {
// mean ||e_t + r_{t+1} - e_{t+1}||^2 over all steps of a path set
double mean_step_energy(const std::vector<ReasoningPath>& paths,
                        const EmbeddingTable& tb, bool* ok) {
  double s = 0;
  long n = 0;
  for (const ReasoningPath& p : paths) {
    EntityId cur = p.origin;
    for (const PathStep& st : p.steps) {
      s += translation_residual(tb.entity[cur], tb.relation[st.rel],
                                tb.entity[st.entity]);
      cur = st.entity;
      ++n;
    }
  }
  *ok = n > 0;
  return n ? s / n : 0.0;
}
}  // namespace

double distance_energy(const std::vector<ReasoningPath>& expert,
                       const std::vector<ReasoningPath>& generated,
                       const EmbeddingTable& table) {
  if (expert.empty() || generated.empty())
    throw ComputeError("distance_energy needs non-empty path sets");
  bool oka = false, okb = false;
  double a = mean_step_energy(expert, table, &oka);
  double b = mean_step_energy(generated, table, &okb);
  if (!oka || !okb)
    throw ComputeError("distance_energy needs at least one step per set");
  return a - b;
}

double causal_entropy(const OccupancyTable& occ) {
  // group by state (entity, t)
  double h = 0;
  auto it = occ.mass.begin();
  while (it != occ.mass.end()) {
    EntityId e = std::get<0>(it->first);
    int t = std::get<1>(it->first);
    double s = 0;
    auto jt = it;
    for (; jt != occ.mass.end() && std::get<0>(jt->first) == e &&
           std::get<1>(jt->first) == t;
         ++jt)
      s += jt->second;
    for (; it != jt; ++it) {
      double c = it->second;
      if (c > 0 && s > 0) h += c * (-std::log(c / s));
    }
  }
  return h;
}

double loss_f(const OccupancyTable& learner, const OccupancyTable& expert,
              double lambda, double eps) {
  return -causal_entropy(learner) +
         lambda * distance_statistic(expert, learner, eps);
}

// --- evaluator -----------------------------------------------------------------------

EvaluatorNetwork init_evaluator(int in_dim, int hidden, uint64_t seed,
                                double scale) {
  EvaluatorNetwork net;
  net.in_dim = in_dim;
  net.hidden = hidden;
  net.w1.assign(static_cast<size_t>(hidden) * in_dim, 0.0);
  net.b1.assign(hidden, 0.0);
  net.w2.assign(hidden, 0.0);
  net.b2 = 0.0;
  if (scale > 0) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& x : net.w1) x = u(rng);
    for (double& x : net.w2) x = u(rng);
  }
  return net;
}

std::vector<double> path_feature(const ReasoningPath& path,
                                 const EmbeddingTable& table) {
  const int d = table.dim;
  std::vector<double> x(2 * d, 0.0);
  for (int i = 0; i < d; ++i) x[i] = table.entity[path.origin][i];
  for (const PathStep& st : path.steps)
    for (int i = 0; i < d; ++i) x[d + i] += table.relation[st.rel][i];
  return x;
}

double evaluator_forward(const EvaluatorNetwork& net,
                         const std::vector<double>& x) {
  double o = net.b2;
  for (int h = 0; h < net.hidden; ++h) {
    double s = net.b1[h];
    const double* row = &net.w1[static_cast<size_t>(h) * net.in_dim];
    for (int i = 0; i < net.in_dim; ++i) s += row[i] * x[i];
    if (s > 0) o += net.w2[h] * s;
  }
  return 1.0 / (1.0 + std::exp(-o));
}

void add_evaluator_grad(const EvaluatorNetwork& net,
                        const std::vector<double>& x, bool use_log_d,
                        double coeff, EvaluatorNetwork& grad) {
  // recompute the forward pass with the hidden activations kept
  std::vector<double> h(net.hidden);
  double o = net.b2;
  for (int k = 0; k < net.hidden; ++k) {
    double s = net.b1[k];
    const double* row = &net.w1[static_cast<size_t>(k) * net.in_dim];
    for (int i = 0; i < net.in_dim; ++i) s += row[i] * x[i];
    h[k] = s > 0 ? s : 0.0;
    o += net.w2[k] * h[k];
  }
  double y = 1.0 / (1.0 + std::exp(-o));
  double dl_do = use_log_d ? (1.0 - y) : -y;
  dl_do *= coeff;
  grad.b2 += dl_do;
  for (int k = 0; k < net.hidden; ++k) {
    grad.w2[k] += dl_do * h[k];
    if (h[k] <= 0) continue;
    double dh = dl_do * net.w2[k];
    grad.b1[k] += dh;
    double* grow = &grad.w1[static_cast<size_t>(k) * net.in_dim];
    for (int i = 0; i < net.in_dim; ++i) grow[i] += dh * x[i];
  }
}

void train_evaluator(EvaluatorNetwork& net,
                     const std::vector<std::vector<double>>& expert_x,
                     const std::vector<std::vector<double>>& generated_x,
                     int steps, double lr) {
  if (expert_x.empty() || generated_x.empty())
    throw ComputeError("evaluator training needs both classes");
  for (int s = 0; s < steps; ++s) {
    EvaluatorNetwork g = net;
    std::fill(g.w1.begin(), g.w1.end(), 0.0);
    std::fill(g.b1.begin(), g.b1.end(), 0.0);
    std::fill(g.w2.begin(), g.w2.end(), 0.0);
    g.b2 = 0.0;
    for (const auto& x : expert_x)
      add_evaluator_grad(net, x, true, 1.0 / expert_x.size(), g);
    for (const auto& x : generated_x)
      add_evaluator_grad(net, x, false, 1.0 / generated_x.size(), g);
    for (size_t i = 0; i < net.w1.size(); ++i) net.w1[i] += lr * g.w1[i];
    for (size_t i = 0; i < net.b1.size(); ++i) net.b1[i] += lr * g.b1[i];
    for (size_t i = 0; i < net.w2.size(); ++i) net.w2[i] += lr * g.w2[i];
    net.b2 += lr * g.b2;
  }
}

// --- imitation trainer ----------------------------------------------------------------

InterpreterTrainer::InterpreterTrainer(const KnowledgeGraph& kg,
                                       const EmbeddingTable& table,
                                       const LayerAssignment* layers,
                                       std::vector<ReasoningPath> experts,
                                       ImitationConfig cfg)
    : kg_(kg),
      table_(table),
      cfg_(cfg),
      ctx_(build_policy_context(kg, table, layers, cfg.mask_upward)),
      experts_(std::move(experts)),
      rng_(cfg.seed) {
  if (experts_.empty()) throw DataError("imitation needs expert paths");
  policy_ = init_policy(ctx_.in_dim, cfg_.hidden, kg.n_relations(),
                        splitmix64(cfg_.seed ^ 0x5eedf00dULL), 0.1);
  eval_ = init_evaluator(2 * table.dim, cfg_.eval_hidden,
                         splitmix64(cfg_.seed ^ 0x0ddba11ULL), 0.1);
  expert_x_.reserve(experts_.size());
  for (const auto& p : experts_) expert_x_.push_back(path_feature(p, table_));
}

void InterpreterTrainer::step() {
  const int b = cfg_.batch;
  std::uniform_int_distribution<size_t> de(0, experts_.size() - 1);
  std::vector<size_t> idx(b);
  for (int i = 0; i < b; ++i) idx[i] = de(rng_);

  // roll out one generated path per sampled expert origin
  std::vector<ReasoningPath> gen;
  gen.reserve(b);
  for (int i = 0; i < b; ++i)
    gen.push_back(rollout(policy_, ctx_, experts_[idx[i]].origin, cfg_.j_steps,
                          rng_, false));

  if (steps_done_ == 0 && cfg_.j_steps >= 2) {
    std::vector<int> lens;
    for (const auto& p : gen) lens.push_back(p.length());
    std::sort(lens.begin(), lens.end());
    if (lens[lens.size() / 2] < 2)
      throw ComputeError(
          "dead-end-dominated graph: median rollout length below 2");
  }

  // evaluator ascent on expert-vs-generated
  std::vector<std::vector<double>> ex, gx;
  for (int i = 0; i < b; ++i) ex.push_back(expert_x_[idx[i]]);
  for (const auto& p : gen) gx.push_back(path_feature(p, table_));
  train_evaluator(eval_, ex, gx, cfg_.eval_steps, cfg_.eval_lr);

  // likelihood-ratio policy step: per-path reward from the evaluator spread
  // over all steps, plus the entropy bonus
  std::vector<double> reward(b);
  double mean_r = 0;
  for (int i = 0; i < b; ++i) {
    double d = evaluator_forward(eval_, gx[i]);
    d = std::min(std::max(d, 1e-7), 1.0 - 1e-7);
    reward[i] = -std::log(1.0 - d);
    mean_r += reward[i];
  }
  mean_r /= b;
  std::vector<double> gw1(policy_.w1.size(), 0.0);
  std::vector<double> gw2(policy_.w2.size(), 0.0);
  for (int i = 0; i < b; ++i) {
    double adv = reward[i] - mean_r;
    EntityId cur = gen[i].origin;
    for (const PathStep& st : gen[i].steps) {
      PolicyEval ev = policy_forward(policy_, ctx_, cur);
      int aidx = static_cast<int>(
          std::find(ev.actions.begin(), ev.actions.end(), st.rel) -
          ev.actions.begin());
      add_logprob_grad(policy_, ctx_, cur, ev, aidx, adv / b, gw1, gw2);
      add_entropy_grad(policy_, ctx_, cur, ev, cfg_.lambda / b, gw1, gw2);
      cur = st.entity;
    }
  }
  for (size_t i = 0; i < policy_.w1.size(); ++i)
    policy_.w1[i] += cfg_.policy_lr * gw1[i];
  for (size_t i = 0; i < policy_.w2.size(); ++i)
    policy_.w2[i] += cfg_.policy_lr * gw2[i];

  last_batch_ = std::move(gen);
  last_expert_batch_.clear();
  for (int i = 0; i < b; ++i) last_expert_batch_.push_back(experts_[idx[i]]);
  ++steps_done_;
}

HistoryRow InterpreterTrainer::metrics(int update_index) {
  HistoryRow row;
  row.update = update_index;
  if (last_batch_.empty()) return row;
  OccupancyTable occ_e = occupancy_expert(experts_);
  bool any_steps = false;
  for (const auto& p : last_batch_) any_steps |= !p.steps.empty();
  if (any_steps) {
    OccupancyTable occ_g = occupancy_expert(last_batch_);
    row.distance_i = distance_statistic(occ_e, occ_g, policy_.eps);
    row.distance_ii = distance_energy(last_expert_batch_, last_batch_, table_);
  }
  double acc = 0;
  for (const auto& p : last_expert_batch_)
    acc += evaluator_forward(eval_, path_feature(p, table_)) > 0.5 ? 1 : 0;
  for (const auto& p : last_batch_)
    acc += evaluator_forward(eval_, path_feature(p, table_)) <= 0.5 ? 1 : 0;
  row.evaluator_acc = acc / (last_expert_batch_.size() + last_batch_.size());
  double ent = 0;
  long n = 0;
  for (const auto& p : last_batch_) {
    EntityId cur = p.origin;
    for (const PathStep& st : p.steps) {
      PolicyEval ev = policy_forward(policy_, ctx_, cur);
      for (double q : ev.probs)
        if (q > 0) ent += -q * std::log(q);
      ++n;
      cur = st.entity;
    }
  }
  row.policy_entropy = n ? ent / n : 0.0;
  return row;
}

double InterpreterTrainer::greedy_match_rate() const {
  if (experts_.empty()) return 0.0;
  Rng dummy(0);
  int hits = 0;
  for (const auto& p : experts_) {
    ReasoningPath g =
        rollout(policy_, ctx_, p.origin, p.length(), dummy, true);
    bool same = g.length() == p.length();
    for (int i = 0; same && i < p.length(); ++i)
      same = g.steps[i].rel == p.steps[i].rel &&
             g.steps[i].entity == p.steps[i].entity;
    hits += same;
  }
  return static_cast<double>(hits) / experts_.size();
}

ImitationResult train_interpreter(const KnowledgeGraph& kg,
                                  const EmbeddingTable& table,
                                  const LayerAssignment* layers,
                                  const std::vector<ReasoningPath>& experts,
                                  const ImitationConfig& cfg) {
  InterpreterTrainer tr(kg, table, layers, experts, cfg);
  ImitationResult res;
  for (int u = 1; u <= cfg.updates; ++u) {
    tr.step();
    if (u % cfg.history_every == 0 || u == cfg.updates)
      res.history.push_back(tr.metrics(u));
  }
  res.policy = tr.policy();
  res.evaluator = tr.evaluator();
  return res;
}

}  // namespace irml
