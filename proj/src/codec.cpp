#include "irml/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irml/csv.hpp"

namespace irml {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double translation_residual(const std::vector<double>& h,
                            const std::vector<double>& r,
                            const std::vector<double>& t) {
  double s = 0;
  for (size_t i = 0; i < h.size(); ++i) {
    double d = h[i] + r[i] - t[i];
    s += d * d;
  }
  return s;
}

EmbeddingTable init_table(int n_entities, int n_relations, int dim,
                          uint64_t seed) {
  if (dim < 1) throw ConfigError("embedding dim must be positive");
  EmbeddingTable t;
  t.dim = dim;
  Rng rng(seed);
  double lim = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> u(-lim, lim);
  t.entity.resize(n_entities);
  for (auto& v : t.entity) {
    v.resize(dim);
    for (double& x : v) x = u(rng);
  }
  t.relation.resize(n_relations);
  for (auto& v : t.relation) {
    v.resize(dim);
    for (double& x : v) x = u(rng);
  }
  return t;
}

double margin_loss(const std::vector<TriplePair>& pairs,
                   const EmbeddingTable& tb, double margin) {
  double loss = 0;
  for (const TriplePair& p : pairs) {
    double dp = translation_residual(tb.entity[p.pos.head],
                                     tb.relation[p.pos.rel],
                                     tb.entity[p.pos.tail]);
    double dn = translation_residual(tb.entity[p.neg.head],
                                     tb.relation[p.neg.rel],
                                     tb.entity[p.neg.tail]);
    loss += std::max(0.0, margin + dp - dn);
  }
  return loss;
}

GradMap loss_gradient(const std::vector<TriplePair>& pairs,
                      const EmbeddingTable& tb, double margin) {
  GradMap g;
  const int d = tb.dim;
  auto acc = [&](char kind, int id, double scale,
                 const std::vector<double>& h, const std::vector<double>& r,
                 const std::vector<double>& t) {
    auto& v = g[{kind, id}];
    if (v.empty()) v.assign(d, 0.0);
    for (int i = 0; i < d; ++i) v[i] += scale * 2.0 * (h[i] + r[i] - t[i]);
  };
  for (const TriplePair& p : pairs) {
    const auto& hp = tb.entity[p.pos.head];
    const auto& rp = tb.relation[p.pos.rel];
    const auto& tp = tb.entity[p.pos.tail];
    const auto& hn = tb.entity[p.neg.head];
    const auto& rn = tb.relation[p.neg.rel];
    const auto& tn = tb.entity[p.neg.tail];
    double act = margin + translation_residual(hp, rp, tp) -
                 translation_residual(hn, rn, tn);
    if (act <= 0.0) continue;
    acc('e', p.pos.head, +1.0, hp, rp, tp);
    acc('r', p.pos.rel, +1.0, hp, rp, tp);
    acc('e', p.pos.tail, -1.0, hp, rp, tp);
    acc('e', p.neg.head, -1.0, hn, rn, tn);
    acc('r', p.neg.rel, -1.0, hn, rn, tn);
    acc('e', p.neg.tail, +1.0, hn, rn, tn);
  }
  return g;
}

TrainResult train_encoder(const KnowledgeGraph& kg, const CodecConfig& cfg) {
  if (kg.n_triples() == 0) throw DataError("cannot train on an empty graph");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.negatives_per_positive < 1)
    throw ConfigError("invalid codec config");
  TrainResult res;
  res.table = init_table(kg.n_entities(), kg.n_relations(), cfg.dim, cfg.seed);
  EmbeddingTable& tb = res.table;
  Rng rng(splitmix64(cfg.seed));
  const int n = kg.n_entities();
  std::uniform_int_distribution<int> de(0, n - 1);
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<int> order(kg.n_triples());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    long epoch_pairs = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<TriplePair> batch;
      batch.reserve((stop - start) * cfg.negatives_per_positive);
      for (size_t b = start; b < stop; ++b) {
        const Triple& pos = kg.triples[order[b]];
        for (int nn = 0; nn < cfg.negatives_per_positive; ++nn) {
          Triple neg = pos;
          for (int tries = 0; tries < 100; ++tries) {
            EntityId rnd = de(rng);
            if (coin(rng))
              neg.head = rnd;
            else
              neg.tail = rnd;
            if (!kg.has_triple(neg.head, neg.rel, neg.tail)) break;
            neg = pos;
          }
          if (neg == pos) continue;  // graph too dense to corrupt here
          batch.push_back({pos, neg});
        }
      }
      if (batch.empty()) continue;
      epoch_loss += margin_loss(batch, tb, cfg.margin);
      epoch_pairs += static_cast<long>(batch.size());
      GradMap g = loss_gradient(batch, tb, cfg.margin);
      for (const auto& [key, grad] : g) {
        auto& vec = key.first == 'e' ? tb.entity[key.second]
                                     : tb.relation[key.second];
        for (int i = 0; i < tb.dim; ++i) vec[i] -= cfg.lr * grad[i];
      }
    }
    // project entities back onto the unit sphere
    for (auto& v : tb.entity) {
      double norm = std::sqrt(dot(v, v));
      if (norm > 1e-12)
        for (double& x : v) x /= norm;
    }
    res.epoch_mean_loss.push_back(epoch_pairs ? epoch_loss / epoch_pairs : 0.0);
  }
  return res;
}

// --- signals --------------------------------------------------------------------

double EncodedSignal::power() const {
  if (samples.empty()) throw ComputeError("power of an empty signal");
  double s = 0;
  for (double x : samples) s += x * x;
  return s / samples.size();
}

namespace {
void append_symbol(EncodedSignal& sig, char kind, int id,
                   const std::vector<double>& vec) {
  sig.spans.push_back({kind, id, static_cast<int>(sig.samples.size()),
                       static_cast<int>(vec.size())});
  sig.samples.insert(sig.samples.end(), vec.begin(), vec.end());
}
}  // namespace

EncodedSignal encode_entities(const std::vector<EntityId>& entities,
                              const EmbeddingTable& table) {
  EncodedSignal sig;
  for (EntityId e : entities) {
    if (e < 0 || e >= static_cast<int>(table.entity.size()))
      throw ComputeError("entity id outside the codebook");
    append_symbol(sig, 'e', e, table.entity[e]);
  }
  return sig;
}

EncodedSignal encode_path(const ReasoningPath& path,
                          const EmbeddingTable& table,
                          bool include_relations) {
  EncodedSignal sig;
  append_symbol(sig, 'e', path.origin, table.entity[path.origin]);
  for (const PathStep& st : path.steps) {
    if (include_relations)
      append_symbol(sig, 'r', st.rel, table.relation[st.rel]);
    append_symbol(sig, 'e', st.entity, table.entity[st.entity]);
  }
  return sig;
}

void save_table_csv(const EmbeddingTable& table, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> header = {"kind", "id"};
  for (int i = 0; i < table.dim; ++i) header.push_back("c" + std::to_string(i));
  w.row(header);
  auto dump = [&](char kind, const std::vector<std::vector<double>>& vecs) {
    for (size_t id = 0; id < vecs.size(); ++id) {
      std::vector<std::string> cells = {std::string(1, kind),
                                        std::to_string(id)};
      for (double v : vecs[id]) cells.push_back(fmt_g17(v));
      w.row(cells);
    }
  };
  dump('e', table.entity);
  dump('r', table.relation);
}

EmbeddingTable load_table_csv(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.size() < 2) throw DataError("embedding csv has no rows: " + path);
  EmbeddingTable t;
  t.dim = static_cast<int>(rows[0].size()) - 2;
  if (t.dim < 1) throw DataError("embedding csv header malformed: " + path);
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (static_cast<int>(r.size()) != t.dim + 2)
      throw DataError("embedding csv row width mismatch: " + path);
    std::vector<double> v(t.dim);
    for (int j = 0; j < t.dim; ++j) v[j] = std::stod(r[2 + j]);
    auto& dst = r[0] == "e" ? t.entity : t.relation;
    size_t id = std::stoul(r[1]);
    if (id != dst.size())
      throw DataError("embedding csv ids must be dense and ordered: " + path);
    dst.push_back(std::move(v));
  }
  return t;
}

}  // namespace irml
