#include "irml/federation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace irml {

void fedavg(std::vector<double>& dst,
            const std::vector<const std::vector<double>*>& srcs,
            const std::vector<double>& gamma) {
  if (srcs.empty() || srcs.size() != gamma.size())
    throw ComputeError("fedavg needs one weight per source");
  double s = 0;
  for (double g : gamma) s += g;
  if (std::abs(s - 1.0) > 1e-9)
    throw ComputeError("fedavg weights must sum to 1");
  const size_t n = srcs[0]->size();
  for (const auto* src : srcs)
    if (src->size() != n) throw ComputeError("fedavg shape mismatch");
  dst.assign(n, 0.0);
  for (size_t k = 0; k < srcs.size(); ++k) {
    const std::vector<double>& w = *srcs[k];
    for (size_t i = 0; i < n; ++i) dst[i] += gamma[k] * w[i];
  }
}

namespace {

std::vector<double> entity_count_gamma(const std::vector<long>& counts) {
  long total = 0;
  for (long c : counts) total += c;
  if (total <= 0) throw ComputeError("no entities across servers");
  std::vector<double> g(counts.size());
  for (size_t k = 0; k < counts.size(); ++k)
    g[k] = static_cast<double>(counts[k]) / total;
  return g;
}

}  // namespace

FedReasoningResult run_federated_reasoning(
    const std::vector<const KnowledgeGraph*>& server_kgs,
    const std::vector<const EmbeddingTable*>& server_tables,
    const std::vector<std::vector<ReasoningPath>>& server_experts,
    const ImitationConfig& imitation, const FederationConfig& fed) {
  const int k = fed.servers;
  if (k < 1) throw ConfigError("server count must be >= 1");
  if (static_cast<int>(server_kgs.size()) != k ||
      static_cast<int>(server_tables.size()) != k ||
      static_cast<int>(server_experts.size()) != k)
    throw ComputeError("per-server inputs must match the server count");

  std::vector<long> counts(k);
  for (int i = 0; i < k; ++i) counts[i] = server_kgs[i]->n_entities();
  std::vector<double> gamma = entity_count_gamma(counts);

  std::vector<InterpreterTrainer> trainers;
  trainers.reserve(k);
  for (int i = 0; i < k; ++i) {
    ImitationConfig cfg = imitation;
    cfg.seed = fed.identical_server_seeds ? fed.seed : derive_seed(fed.seed, i);
    trainers.emplace_back(*server_kgs[i], *server_tables[i], nullptr,
                          server_experts[i], cfg);
  }
  // Shapes must agree for averaging to make sense.
  for (int i = 1; i < k; ++i)
    if (trainers[i].policy().w1.size() != trainers[0].policy().w1.size() ||
        trainers[i].policy().w2.size() != trainers[0].policy().w2.size())
      throw ComputeError("server policy shapes differ");

  // Round zero: every server starts from the server-0 initialization, i.e. one
  // shared global model.
  for (int i = 1; i < k; ++i) {
    trainers[i].policy().w1 = trainers[0].policy().w1;
    trainers[i].policy().w2 = trainers[0].policy().w2;
  }

  FedReasoningResult res;
  res.global = trainers[0].policy();
  int done = 0, round = 0;
  while (done < fed.total_steps) {
    ++round;
    const int burst = std::min(fed.local_steps, fed.total_steps - done);
    std::vector<double> losses(k);
    for (int i = 0; i < k; ++i) {
      for (int s = 0; s < burst; ++s) trainers[i].step();
      HistoryRow row = trainers[i].metrics(done + burst);
      losses[i] = row.distance_i;
      res.trace.push_back(
          {round, i, row.distance_i, trainers[i].greedy_match_rate()});
    }
    done += burst;

    std::vector<const std::vector<double>*> w1s, w2s;
    for (int i = 0; i < k; ++i) {
      w1s.push_back(&trainers[i].policy().w1);
      w2s.push_back(&trainers[i].policy().w2);
    }
    fedavg(res.global.w1, w1s, gamma);
    fedavg(res.global.w2, w2s, gamma);
    for (int i = 0; i < k; ++i) {
      trainers[i].policy().w1 = res.global.w1;
      trainers[i].policy().w2 = res.global.w2;
    }

    double agg_loss = 0, agg_acc = 0;
    for (int i = 0; i < k; ++i) {
      agg_loss += gamma[i] * losses[i];
      agg_acc += gamma[i] * trainers[i].greedy_match_rate();
    }
    res.trace.push_back({round, -1, agg_loss, agg_acc});
  }
  return res;
}

FedClassResult run_federated_classification(const KnowledgeGraph& global_kg,
                                            const Partition& part,
                                            const std::vector<int>& val_idx,
                                            const GcnConfig& gcn,
                                            const FederationConfig& fed) {
  const int k = static_cast<int>(part.locals.size());
  if (k < 1) throw ComputeError("partition has no servers");
  if (global_kg.subject_names.empty())
    throw DataError("classification needs labeled subjects");
  const int n_classes = static_cast<int>(global_kg.subject_names.size());

  GcnGraph gglob = build_gcn_graph(global_kg);
  std::unordered_set<int> val_set(val_idx.begin(), val_idx.end());

  std::vector<GcnGraph> glocal(k);
  std::vector<std::vector<int>> train_local(k), labels_local(k);
  std::vector<long> counts(k);
  for (int i = 0; i < k; ++i) {
    glocal[i] = build_gcn_graph(part.locals[i]);
    counts[i] = part.locals[i].n_entities();
    labels_local[i].assign(part.locals[i].labels.begin(),
                           part.locals[i].labels.end());
    for (int v = 0; v < part.locals[i].n_entities(); ++v) {
      int gid = part.local_to_global[i][v];
      if (part.locals[i].labels[v] >= 0 && !val_set.count(gid))
        train_local[i].push_back(v);
    }
    if (train_local[i].empty())
      throw DataError("a server has no labeled training nodes");
  }
  std::vector<double> gamma = entity_count_gamma(counts);

  FedClassResult res;
  res.global = init_gcn(gglob.in_dim, gcn.hidden, n_classes, gcn.seed);
  std::vector<GcnModel> models(k, res.global);

  int done = 0, round = 0;
  while (done < fed.total_steps) {
    ++round;
    const int burst = std::min(fed.local_steps, fed.total_steps - done);
    std::vector<double> losses(k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int s = 0; s < burst; ++s)
        losses[i] = gcn_step(models[i], glocal[i], train_local[i],
                             labels_local[i], gcn.lr);
    done += burst;

    std::vector<const std::vector<double>*> w1s, w2s;
    for (int i = 0; i < k; ++i) {
      w1s.push_back(&models[i].w1);
      w2s.push_back(&models[i].w2);
    }
    fedavg(res.global.w1, w1s, gamma);
    fedavg(res.global.w2, w2s, gamma);

    for (int i = 0; i < k; ++i) {
      res.trace.push_back({round, i, losses[i],
                           gcn_accuracy(models[i], gglob, val_idx,
                                        global_kg.labels)});
      models[i].w1 = res.global.w1;
      models[i].w2 = res.global.w2;
    }
    double agg_loss = 0;
    for (int i = 0; i < k; ++i) agg_loss += gamma[i] * losses[i];
    res.final_val_accuracy =
        gcn_accuracy(res.global, gglob, val_idx, global_kg.labels);
    res.trace.push_back({round, -1, agg_loss, res.final_val_accuracy});
  }
  return res;
}

// --- cross-server link policy ---------------------------------------------------

double CrossServerPolicy::score(const std::vector<double>& eu,
                                const std::vector<double>& ev) const {
  if (trivial) return 0.0;
  const size_t d = eu.size();
  double z = b;
  for (size_t i = 0; i < d; ++i) {
    z += w[i] * std::abs(eu[i] - ev[i]);
    z += w[d + i] * eu[i] * ev[i];
  }
  return 1.0 / (1.0 + std::exp(-z));
}

CrossServerPolicy train_cross_server_policy(const KnowledgeGraph& kg,
                                            const std::vector<int>& owner,
                                            const std::vector<Triple>& dropped,
                                            const EmbeddingTable& table,
                                            const FederationConfig& fed,
                                            int steps, double lr) {
  CrossServerPolicy pol;
  const int d = table.dim;
  pol.w.assign(2 * d, 0.0);
  if (dropped.empty()) {
    pol.trivial = true;
    return pol;
  }

  auto connected = [&](EntityId u, EntityId v) {
    for (const Edge& e : kg.out[u])
      if (e.other == v) return true;
    for (const Edge& e : kg.out[v])
      if (e.other == u) return true;
    return false;
  };

  // positives: dropped cross-server pairs; negatives: uniform non-edges, 1:1
  std::vector<std::pair<EntityId, EntityId>> pos, neg;
  for (const Triple& t : dropped) pos.push_back({t.head, t.tail});
  Rng rng(splitmix64(fed.seed ^ 0xc0ffee11ULL));
  std::uniform_int_distribution<EntityId> dent(0, kg.n_entities() - 1);
  for (size_t i = 0; i < pos.size(); ++i) {
    for (int tries = 0; tries < 1000; ++tries) {
      EntityId u = dent(rng), v = dent(rng);
      if (u == v || connected(u, v)) continue;
      neg.push_back({u, v});
      break;
    }
  }
  if (neg.empty()) {
    pol.trivial = true;
    return pol;
  }

  auto feature = [&](EntityId u, EntityId v) {
    std::vector<double> x(2 * d);
    for (int i = 0; i < d; ++i) {
      x[i] = std::abs(table.entity[u][i] - table.entity[v][i]);
      x[d + i] = table.entity[u][i] * table.entity[v][i];
    }
    return x;
  };
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (auto& [u, v] : pos) {
    xs.push_back(feature(u, v));
    ys.push_back(1);
  }
  for (auto& [u, v] : neg) {
    xs.push_back(feature(u, v));
    ys.push_back(0);
  }

  // shard round-robin over the servers, FedAvg on the logistic weights
  const int k = std::max(1, fed.servers);
  std::vector<std::vector<size_t>> shard(k);
  for (size_t i = 0; i < xs.size(); ++i) shard[i % k].push_back(i);
  std::vector<double> gamma(k, 0.0);
  size_t used = 0;
  for (int i = 0; i < k; ++i) used += shard[i].size();
  for (int i = 0; i < k; ++i)
    gamma[i] = static_cast<double>(shard[i].size()) / used;

  std::vector<std::vector<double>> wk(k, std::vector<double>(2 * d + 1, 0.0));
  std::vector<double> wg(2 * d + 1, 0.0);
  int done = 0;
  while (done < steps) {
    const int burst = std::min(fed.local_steps, steps - done);
    for (int i = 0; i < k; ++i) {
      if (shard[i].empty()) continue;
      for (int s = 0; s < burst; ++s) {
        std::vector<double> g(2 * d + 1, 0.0);
        for (size_t idx : shard[i]) {
          double z = wk[i][2 * d];
          for (int j = 0; j < 2 * d; ++j) z += wk[i][j] * xs[idx][j];
          double p = 1.0 / (1.0 + std::exp(-z));
          double diff = p - ys[idx];
          for (int j = 0; j < 2 * d; ++j) g[j] += diff * xs[idx][j];
          g[2 * d] += diff;
        }
        for (int j = 0; j <= 2 * d; ++j)
          wk[i][j] -= lr * g[j] / shard[i].size();
      }
    }
    done += burst;
    std::vector<const std::vector<double>*> srcs;
    for (int i = 0; i < k; ++i) srcs.push_back(&wk[i]);
    fedavg(wg, srcs, gamma);
    for (int i = 0; i < k; ++i) wk[i] = wg;
  }
  for (int j = 0; j < 2 * d; ++j) pol.w[j] = wg[j];
  pol.b = wg[2 * d];
  return pol;
}

// --- convergence machinery -------------------------------------------------------

double heterogeneity_rho(double f_star, const std::vector<double>& f_k_star,
                         const std::vector<double>& gamma) {
  if (f_k_star.size() != gamma.size())
    throw ComputeError("per-server minima and weights must align");
  double s = f_star;
  for (size_t i = 0; i < gamma.size(); ++i) s -= gamma[i] * f_k_star[i];
  return s;
}

namespace {

// C = A * B, dense row-major rectangular.
std::vector<std::vector<double>> matmul(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size())
    throw ComputeError("matmul shape mismatch");
  const size_t n = a.size(), m = b[0].size(), inner = b.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t t = 0; t < inner; ++t) {
      const double av = a[i][t];
      if (av == 0.0) continue;
      for (size_t j = 0; j < m; ++j) c[i][j] += av * b[t][j];
    }
  return c;
}

// M = W^T W for W (n x d) -> (d x d).
std::vector<std::vector<double>> gram(
    const std::vector<std::vector<double>>& w) {
  const size_t d = w.empty() ? 0 : w[0].size();
  std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
  for (const auto& row : w)
    for (size_t i = 0; i < d; ++i) {
      if (row[i] == 0.0) continue;
      for (size_t j = 0; j < d; ++j) m[i][j] += row[i] * row[j];
    }
  return m;
}

}  // namespace

double divergence_d(const std::vector<std::vector<double>>& a_k,
                    const std::vector<std::vector<double>>& x_k,
                    const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& x, int k_servers) {
  if (x_k.empty() || x.empty() || x_k[0].size() != x[0].size())
    throw ComputeError("feature widths must match");
  // W = A (A X); the statistic compares K * Wk^T Wk against W^T W.
  std::vector<std::vector<double>> wk = matmul(a_k, matmul(a_k, x_k));
  std::vector<std::vector<double>> w = matmul(a, matmul(a, x));
  std::vector<std::vector<double>> mk = gram(wk);
  std::vector<std::vector<double>> m = gram(w);
  double s = 0;
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) {
      double diff = k_servers * mk[i][j] - m[i][j];
      s += diff * diff;
    }
  return s;
}

double theorem3_bound(const BoundParams& p, long t_steps) {
  if (p.mu <= 0 || p.l_smooth <= 0 || p.e_local < 1 || p.n_entities < 1 ||
      t_steps < 1)
    throw ComputeError("bound parameters out of range");
  const double kappa = p.l_smooth / p.mu;
  const double zeta = std::max(8.0 * kappa, static_cast<double>(p.e_local));
  const double e1 = p.e_local - 1.0;
  const double omega = 4.0 * (1.0 + 2.0 * e1 * e1) * p.sigma_l * p.sigma_l +
                       4.0 * p.l_smooth * p.rho +
                       (p.mu * p.mu * zeta / 4.0) * p.init_gap_sq;
  return (2.0 * kappa / (zeta + t_steps - 1.0)) *
         (omega / p.mu +
          2.0 * p.l_p * p.divergence / (p.mu * p.n_entities));
}

BoundCheckResult run_bound_check(int k_servers, int dim, int e_local,
                                 int total_steps, double mu, double l_smooth,
                                 uint64_t seed) {
  if (k_servers < 1 || dim < 1 || e_local < 1 || total_steps < 1)
    throw ConfigError("bound check sizes must be positive");
  if (mu <= 0 || l_smooth < mu)
    throw ConfigError("need 0 < mu <= L");

  // K diagonal quadratics f_k(w) = 0.5 sum_i h_ki (w_i - c_ki)^2 with spectra
  // inside [mu, L]; gamma uniform.
  Rng rng(seed);
  std::uniform_real_distribution<double> uh(mu, l_smooth), uc(-1.0, 1.0);
  std::vector<std::vector<double>> h(k_servers, std::vector<double>(dim));
  std::vector<std::vector<double>> c(k_servers, std::vector<double>(dim));
  for (int k = 0; k < k_servers; ++k)
    for (int i = 0; i < dim; ++i) {
      h[k][i] = uh(rng);
      c[k][i] = uc(rng);
    }
  const double gamma = 1.0 / k_servers;

  // global optimum and minimum value
  std::vector<double> wstar(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    double num = 0, den = 0;
    for (int k = 0; k < k_servers; ++k) {
      num += gamma * h[k][i] * c[k][i];
      den += gamma * h[k][i];
    }
    wstar[i] = num / den;
  }
  auto f_global = [&](const std::vector<double>& w) {
    double s = 0;
    for (int k = 0; k < k_servers; ++k)
      for (int i = 0; i < dim; ++i) {
        double dl = w[i] - c[k][i];
        s += gamma * 0.5 * h[k][i] * dl * dl;
      }
    return s;
  };
  const double f_star = f_global(wstar);
  const double rho = heterogeneity_rho(
      f_star, std::vector<double>(k_servers, 0.0),
      std::vector<double>(k_servers, gamma));

  const double kappa = l_smooth / mu;
  const double zeta = std::max(8.0 * kappa, static_cast<double>(e_local));
  std::vector<double> w1(dim, 0.0);
  double init_gap_sq = 0;
  for (int i = 0; i < dim; ++i)
    init_gap_sq += (w1[i] - wstar[i]) * (w1[i] - wstar[i]);

  // FedAvg with the decaying schedule; sigma_l is measured as the largest
  // local gradient norm along the whole trajectory.
  std::vector<std::vector<double>> wk(k_servers, w1);
  double sigma_l = 0;
  std::vector<std::pair<long, double>> gaps;
  std::vector<double> wbar(dim);
  for (long t = 1; t <= total_steps; ++t) {
    const double eta = 2.0 / (mu * (zeta + t));
    for (int k = 0; k < k_servers; ++k) {
      double norm2 = 0;
      for (int i = 0; i < dim; ++i) {
        double g = h[k][i] * (wk[k][i] - c[k][i]);
        norm2 += g * g;
        wk[k][i] -= eta * g;
      }
      sigma_l = std::max(sigma_l, std::sqrt(norm2));
    }
    if (t % e_local == 0 || t == total_steps) {
      for (int i = 0; i < dim; ++i) {
        double s = 0;
        for (int k = 0; k < k_servers; ++k) s += gamma * wk[k][i];
        wbar[i] = s;
      }
      for (int k = 0; k < k_servers; ++k) wk[k] = wbar;
      gaps.push_back({t, f_global(wbar) - f_star});
    }
  }

  BoundCheckResult res;
  res.params.mu = mu;
  res.params.l_smooth = l_smooth;
  res.params.sigma_l = sigma_l;
  res.params.rho = rho;
  res.params.divergence = 0.0;
  res.params.l_p = 0.0;
  res.params.e_local = e_local;
  res.params.n_entities = 1;
  res.params.init_gap_sq = init_gap_sq;
  for (auto& [t, gap] : gaps)
    res.rows.push_back({t, gap, theorem3_bound(res.params, t)});
  return res;
}

}  // namespace irml
