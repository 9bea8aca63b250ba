#include "irml/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_set>

namespace irml {

namespace {

// Latent geometry behind the synthetic graphs: entities get positions,
// relations get offsets drawn from the pair-offset distribution, and every
// edge is labeled with the relation (and orientation) whose translation best
// explains it.  Random relation labels would leave nothing for a translation
// codec to learn; this mirrors the consistent relation semantics of real KG
// benchmarks.
struct LatentGeometry {
  static constexpr int kDim = 8;
  std::vector<std::vector<double>> z;  // per entity
  std::vector<std::vector<double>> v;  // per relation

  LatentGeometry(int n_entities, int n_relations, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(double(kDim)));
    z.resize(n_entities);
    for (auto& p : z) {
      p.resize(kDim);
      for (double& x : p) x = g(rng);
    }
    v.resize(n_relations);
    for (auto& o : v) {
      o.resize(kDim);
      for (double& x : o) x = g(rng) - g(rng);
    }
  }

  double residual(EntityId h, RelationId r, EntityId t) const {
    double s = 0;
    for (int i = 0; i < kDim; ++i) {
      double d = z[h][i] + v[r][i] - z[t][i];
      s += d * d;
    }
    return s;
  }

  // all labelings of an undirected pair, best explanation first
  std::vector<std::tuple<double, EntityId, RelationId, EntityId>> ranked(
      EntityId a, EntityId b) const {
    std::vector<std::tuple<double, EntityId, RelationId, EntityId>> opts;
    opts.reserve(2 * v.size());
    for (RelationId r = 0; r < static_cast<RelationId>(v.size()); ++r) {
      opts.push_back({residual(a, r, b), a, r, b});
      opts.push_back({residual(b, r, a), b, r, a});
    }
    std::sort(opts.begin(), opts.end());
    return opts;
  }
};

}  // namespace

KnowledgeGraph synth_scale_free_kg(const ScaleFreeSpec& spec) {
  if (spec.n_entities < 4 || spec.n_relations < 1 || spec.edges_per_node < 1)
    throw ConfigError("scale-free spec out of range");
  Rng rng(spec.seed);
  KnowledgeGraph kg;
  for (int i = 0; i < spec.n_entities; ++i)
    kg.add_entity("e" + std::to_string(i));
  for (int r = 0; r < spec.n_relations; ++r)
    kg.add_relation("r" + std::to_string(r));

  // preferential attachment over an endpoint multiset; edge labels come from
  // the latent geometry so relation usage reflects which offsets explain the
  // hub-heavy pair distribution
  LatentGeometry geo(spec.n_entities, spec.n_relations, rng);
  std::vector<EntityId> endpoints;
  auto add_explained = [&](EntityId a, EntityId b) {
    auto [res, h, r, t] = geo.ranked(a, b).front();
    (void)res;
    kg.add_triple(h, r, t);
  };
  std::unordered_set<uint64_t> seen;  // undirected dedup of endpoint pairs
  auto pair_key = [&](EntityId a, EntityId b) {
    if (a > b) std::swap(a, b);
    return static_cast<uint64_t>(a) * spec.n_entities + b;
  };

  const int m0 = spec.edges_per_node + 1;
  for (int i = 1; i < m0; ++i) {
    EntityId a = i, b = i - 1;
    add_explained(a, b);
    seen.insert(pair_key(a, b));
    endpoints.push_back(a);
    endpoints.push_back(b);
  }
  for (int i = m0; i < spec.n_entities; ++i) {
    int added = 0, attempts = 0;
    while (added < spec.edges_per_node && attempts < 50 * spec.edges_per_node) {
      ++attempts;
      std::uniform_int_distribution<size_t> dt(0, endpoints.size() - 1);
      EntityId target = endpoints[dt(rng)];
      if (target == i || seen.count(pair_key(i, target))) continue;
      seen.insert(pair_key(i, target));
      add_explained(i, target);
      endpoints.push_back(i);
      endpoints.push_back(target);
      ++added;
    }
    if (added == 0) {  // never leave an isolated entity
      EntityId target = endpoints[std::uniform_int_distribution<size_t>(
          0, endpoints.size() - 1)(rng)];
      if (target == i) target = 0;
      add_explained(i, target);
      endpoints.push_back(i);
      endpoints.push_back(target);
    }
  }
  kg.finalize();
  return kg;
}

KnowledgeGraph synth_citation_graph(const CitationSpec& spec) {
  if (spec.n_entities < spec.n_subjects || spec.n_subjects < 2)
    throw ConfigError("citation spec out of range");
  if (spec.feature_dim < spec.n_subjects)
    throw ConfigError("feature_dim must be at least n_subjects");
  Rng rng(spec.seed);
  KnowledgeGraph kg;
  RelationId cites = kg.add_relation("cites");
  for (int s = 0; s < spec.n_subjects; ++s)
    kg.subject_names.push_back("s" + std::to_string(s));
  for (int i = 0; i < spec.n_entities; ++i) {
    kg.add_entity("n" + std::to_string(i));
    kg.labels.push_back(i % spec.n_subjects);
  }

  // homophilous directed citations
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> dn(0, spec.n_entities - 1);
  std::unordered_set<uint64_t> seen;
  for (int i = 0; i < spec.n_entities; ++i) {
    for (int e = 0; e < spec.avg_out_degree; ++e) {
      bool want_same = u01(rng) < spec.homophily;
      int target = -1;
      for (int tries = 0; tries < 64; ++tries) {
        int cand = dn(rng);
        if (cand == i) continue;
        bool same = kg.labels[cand] == kg.labels[i];
        if (same == want_same) {
          uint64_t key = static_cast<uint64_t>(i) * spec.n_entities + cand;
          if (!seen.count(key)) {
            seen.insert(key);
            target = cand;
            break;
          }
        }
      }
      if (target >= 0) kg.add_triple(i, cites, target);
    }
  }

  // bag-of-words features: per-subject word block plus noise words
  const int block = spec.feature_dim / spec.n_subjects;
  std::uniform_int_distribution<int> dword(0, spec.feature_dim - 1);
  for (int i = 0; i < spec.n_entities; ++i) {
    std::vector<float> f(spec.feature_dim, 0.0f);
    int s = kg.labels[i];
    int lo = s * block;
    std::uniform_int_distribution<int> dblock(lo, lo + block - 1);
    for (int w = 0; w < spec.words_per_node; ++w) {
      int word =
          u01(rng) < spec.word_fidelity ? dblock(rng) : dword(rng);
      f[word] = 1.0f;
    }
    kg.features.push_back(std::move(f));
  }
  kg.finalize();
  return kg;
}

KnowledgeGraph synth_degree_ladder_kg(const DegreeLadderSpec& spec) {
  if (spec.target_degrees.empty() || spec.n_per_level < 1 ||
      spec.n_relations < 1)
    throw ConfigError("degree ladder needs levels, entities, and relations");
  const int levels = static_cast<int>(spec.target_degrees.size());
  std::vector<int> counts = spec.level_counts;
  if (counts.empty()) counts.assign(levels, spec.n_per_level);
  if (static_cast<int>(counts.size()) != levels)
    throw ConfigError("level_counts must match target_degrees in length");
  for (int c : counts)
    if (c < 1) throw ConfigError("every ladder level needs entities");
  KnowledgeGraph kg;
  std::vector<int> level_of;
  for (int lv = 0; lv < levels; ++lv)
    for (int i = 0; i < counts[lv]; ++i) level_of.push_back(lv);
  const int n = static_cast<int>(level_of.size());
  for (int i = 0; i < n; ++i) kg.add_entity("e" + std::to_string(i));
  for (int r = 0; r < spec.n_relations; ++r)
    kg.add_relation("r" + std::to_string(r));

  // one stub per remaining unit of target degree, shuffled and paired;
  // each pair takes its best-explained labeling, falling back down the
  // ranking when the exact triple already exists
  std::vector<EntityId> stubs;
  for (int i = 0; i < n; ++i) {
    int target = spec.target_degrees[level_of[i]];
    for (int s = 0; s < target; ++s) stubs.push_back(i);
  }
  Rng rng(spec.seed);
  LatentGeometry geo(n, spec.n_relations, rng);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<RelationId> drel(0, spec.n_relations - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::set<std::tuple<EntityId, RelationId, EntityId>> seen;
  for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
    EntityId u = stubs[i], v = stubs[i + 1];
    if (u == v) continue;
    if (u01(rng) < spec.label_noise) {
      if (coin(rng)) std::swap(u, v);
      for (int tries = 0; tries < spec.n_relations; ++tries) {
        RelationId r = drel(rng);
        if (seen.insert({u, r, v}).second) {
          kg.add_triple(u, r, v);
          break;
        }
      }
      continue;
    }
    for (const auto& [res, h, r, t] : geo.ranked(u, v)) {
      (void)res;
      if (seen.insert({h, r, t}).second) {
        kg.add_triple(h, r, t);
        break;
      }
    }
  }
  kg.finalize();
  return kg;
}

ToyMdp synth_toy_mdp() {
  ToyMdp toy;
  KnowledgeGraph& kg = toy.kg;
  const int n = 8;
  for (int i = 0; i < n; ++i) kg.add_entity("s" + std::to_string(i));
  RelationId next = kg.add_relation("next");
  RelationId skip = kg.add_relation("skip");
  RelationId back = kg.add_relation("back");
  for (EntityId i = 0; i < n; ++i) {
    kg.add_triple(i, next, (i + 1) % n);
    kg.add_triple(i, skip, (i + 2) % n);
    kg.add_triple(i, back, (i + n - 1) % n);
  }
  kg.finalize();
  for (EntityId o = 0; o < n; ++o) {
    ReasoningPath p;
    p.origin = o;
    p.steps.push_back({next, EntityId((o + 1) % n)});
    p.steps.push_back({next, EntityId((o + 2) % n)});
    toy.experts.push_back(std::move(p));
  }
  return toy;
}

}  // namespace irml
