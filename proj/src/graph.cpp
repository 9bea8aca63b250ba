#include "irml/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace irml {

EntityId KnowledgeGraph::add_entity(const std::string& name) {
  entity_names.push_back(name);
  return static_cast<EntityId>(entity_names.size() - 1);
}

RelationId KnowledgeGraph::add_relation(const std::string& name) {
  relation_names.push_back(name);
  return static_cast<RelationId>(relation_names.size() - 1);
}

void KnowledgeGraph::add_triple(EntityId h, RelationId r, EntityId t) {
  triples.push_back({h, r, t});
}

void KnowledgeGraph::finalize() {
  const int n = n_entities();
  for (const Triple& tr : triples) {
    if (tr.head < 0 || tr.head >= n || tr.tail < 0 || tr.tail >= n ||
        tr.rel < 0 || tr.rel >= n_relations())
      throw DataError("triple references unknown entity or relation id");
  }
  // dedup, keeping first occurrences in order
  triple_index_.clear();
  triple_index_.reserve(triples.size() * 2);
  std::vector<Triple> kept;
  kept.reserve(triples.size());
  for (const Triple& tr : triples) {
    if (triple_index_.insert(key(tr.head, tr.rel, tr.tail)).second)
      kept.push_back(tr);
  }
  triples = std::move(kept);

  out.assign(n, {});
  in.assign(n, {});
  for (const Triple& tr : triples) {
    out[tr.head].push_back({tr.rel, tr.tail});
    in[tr.tail].push_back({tr.rel, tr.head});
  }
  auto by_other_then_rel = [](const Edge& a, const Edge& b) {
    return a.other != b.other ? a.other < b.other : a.rel < b.rel;
  };
  for (auto& v : out) std::sort(v.begin(), v.end(), by_other_then_rel);
  for (auto& v : in) std::sort(v.begin(), v.end(), by_other_then_rel);
}

bool KnowledgeGraph::has_triple(EntityId h, RelationId r, EntityId t) const {
  return triple_index_.count(key(h, r, t)) > 0;
}

std::vector<RelationId> KnowledgeGraph::available_relations(EntityId e) const {
  std::vector<RelationId> rels;
  for (const Edge& ed : out[e]) rels.push_back(ed.rel);
  std::sort(rels.begin(), rels.end());
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  return rels;
}

std::vector<EntityId> KnowledgeGraph::tails(EntityId e, RelationId r) const {
  std::vector<EntityId> ts;
  for (const Edge& ed : out[e])
    if (ed.rel == r) ts.push_back(ed.other);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// --- loaders -----------------------------------------------------------------

KnowledgeGraph load_triples(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open triples file: " + path);
  KnowledgeGraph kg;
  std::unordered_map<std::string, EntityId> ent;
  std::unordered_map<std::string, RelationId> rel;
  std::string line;
  int line_no = 0;
  auto intern_entity = [&](const std::string& s) {
    auto it = ent.find(s);
    if (it != ent.end()) return it->second;
    EntityId id = kg.add_entity(s);
    ent.emplace(s, id);
    return id;
  };
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t p1 = line.find('\t');
    size_t p2 = p1 == std::string::npos ? p1 : line.find('\t', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos ||
        line.find('\t', p2 + 1) != std::string::npos)
      throw DataError("triples file " + path + ": line " +
                      std::to_string(line_no) + " does not have 3 fields");
    std::string hs = line.substr(0, p1);
    std::string rs = line.substr(p1 + 1, p2 - p1 - 1);
    std::string ts = line.substr(p2 + 1);
    if (hs.empty() || rs.empty() || ts.empty())
      throw DataError("triples file " + path + ": line " +
                      std::to_string(line_no) + " has an empty field");
    EntityId h = intern_entity(hs);
    EntityId t = intern_entity(ts);
    RelationId r;
    auto it = rel.find(rs);
    if (it != rel.end()) {
      r = it->second;
    } else {
      r = kg.add_relation(rs);
      rel.emplace(rs, r);
    }
    kg.add_triple(h, r, t);
  }
  if (kg.triples.empty())
    throw DataError("triples file " + path + " contains no triples");
  kg.finalize();
  return kg;
}

PlanetoidLoad load_planetoid(const std::string& content_path,
                             const std::string& cites_path) {
  std::ifstream fc(content_path);
  if (!fc) throw DataError("cannot open content file: " + content_path);
  PlanetoidLoad res;
  KnowledgeGraph& kg = res.kg;
  std::unordered_map<std::string, EntityId> ids;
  std::unordered_map<std::string, int> subjects;
  std::string line;
  int line_no = 0;
  int width = -1;
  while (std::getline(fc, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.size() < 3)
      throw DataError("content file " + content_path + ": line " +
                      std::to_string(line_no) + " too short");
    int fdim = static_cast<int>(tok.size()) - 2;
    if (width < 0) width = fdim;
    if (fdim != width)
      throw DataError("content file " + content_path + ": line " +
                      std::to_string(line_no) +
                      " has inconsistent feature width");
    if (ids.count(tok[0]))
      throw DataError("content file " + content_path + ": duplicate id " +
                      tok[0]);
    EntityId e = kg.add_entity(tok[0]);
    ids.emplace(tok[0], e);
    std::vector<float> feat(width);
    for (int i = 0; i < width; ++i) feat[i] = std::stof(tok[1 + i]);
    kg.features.push_back(std::move(feat));
    const std::string& lab = tok.back();
    auto it = subjects.find(lab);
    int s;
    if (it != subjects.end()) {
      s = it->second;
    } else {
      s = static_cast<int>(kg.subject_names.size());
      kg.subject_names.push_back(lab);
      subjects.emplace(lab, s);
    }
    kg.labels.push_back(s);
  }
  if (kg.n_entities() == 0)
    throw DataError("content file " + content_path + " is empty");

  std::ifstream fe(cites_path);
  if (!fe) throw DataError("cannot open cites file: " + cites_path);
  RelationId cites = kg.add_relation("cites");
  line_no = 0;
  while (std::getline(fe, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cited, citing, extra;
    if (!(ss >> cited >> citing) || (ss >> extra))
      throw DataError("cites file " + cites_path + ": line " +
                      std::to_string(line_no) + " does not have 2 fields");
    auto a = ids.find(cited);
    auto b = ids.find(citing);
    if (a == ids.end() || b == ids.end()) {
      ++res.skipped_citations;
      continue;
    }
    kg.add_triple(b->second, cites, a->second);  // citing -> cited
  }
  kg.finalize();
  return res;
}

// --- layering ------------------------------------------------------------------

std::vector<int> LayerAssignment::counts() const {
  std::vector<int> c(n_layers, 0);
  for (int l : layer) ++c[l - 1];
  return c;
}

std::vector<double> LayerAssignment::fractions() const {
  std::vector<double> f(n_layers, 0.0);
  if (layer.empty()) return f;
  for (int l : layer) f[l - 1] += 1.0;
  for (double& v : f) v /= layer.size();
  return f;
}

LayerAssignment layer_by_degree(const KnowledgeGraph& kg,
                                const std::vector<int>& thresholds) {
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0)
      throw ConfigError("layer thresholds must be positive");
    if (i && thresholds[i] >= thresholds[i - 1])
      throw ConfigError("layer thresholds must be strictly descending");
  }
  LayerAssignment la;
  la.n_layers = static_cast<int>(thresholds.size()) + 1;
  la.layer.resize(kg.n_entities());
  for (EntityId e = 0; e < kg.n_entities(); ++e) {
    int d = kg.degree(e);
    int l = la.n_layers;  // lowest layer unless a threshold is met
    if (!thresholds.empty()) {
      if (d > thresholds[0]) {
        l = 1;
      } else {
        for (int i = 2; i < la.n_layers; ++i) {
          if (d >= thresholds[i - 1]) {
            l = i;
            break;
          }
        }
      }
    } else {
      l = 1;
    }
    la.layer[e] = l;
  }
  return la;
}

// --- shortest paths ---------------------------------------------------------------

std::optional<ReasoningPath> shortest_path(const KnowledgeGraph& kg,
                                           EntityId from, EntityId to,
                                           int max_len,
                                           const LayerAssignment* lm) {
  if (from == to) return std::nullopt;
  // Backward side: BFS distance-to-target over incoming edges, capped at
  // max_len.  An edge u->v is traversable when it does not climb to a smaller
  // layer index.
  auto edge_ok = [&](EntityId u, EntityId v) {
    return !lm || lm->layer[v] >= lm->layer[u];
  };
  std::vector<int> dist(kg.n_entities(), -1);
  dist[to] = 0;
  std::deque<EntityId> q{to};
  while (!q.empty()) {
    EntityId v = q.front();
    q.pop_front();
    if (dist[v] >= max_len) continue;
    for (const Edge& ed : kg.in[v]) {
      if (!edge_ok(ed.other, v)) continue;
      if (dist[ed.other] < 0) {
        dist[ed.other] = dist[v] + 1;
        q.push_back(ed.other);
      }
    }
  }
  if (dist[from] < 0 || dist[from] > max_len) return std::nullopt;
  // Forward side: greedy walk down the distance field; adjacency is sorted by
  // (entity, relation) so the first admissible edge realizes the smallest
  // next entity id, then the smallest relation id.
  ReasoningPath path;
  path.origin = from;
  EntityId cur = from;
  while (cur != to) {
    bool advanced = false;
    for (const Edge& ed : kg.out[cur]) {
      if (!edge_ok(cur, ed.other)) continue;
      if (dist[ed.other] == dist[cur] - 1) {
        path.steps.push_back({ed.rel, ed.other});
        cur = ed.other;
        advanced = true;
        break;
      }
    }
    if (!advanced) return std::nullopt;  // cannot happen on a consistent field
  }
  return path;
}

std::vector<ReasoningPath> sample_expert_paths(const KnowledgeGraph& kg,
                                               const PathSampleOptions& opt) {
  const int n = kg.n_entities();
  if (n < 2) throw DataError("path sampling needs at least two entities");
  if (opt.n_paths <= 0 || opt.max_len <= 0)
    throw ConfigError("n_paths and max_len must be positive");
  Rng rng(opt.seed);
  std::vector<ReasoningPath> paths;
  paths.reserve(opt.n_paths);
  long budget = static_cast<long>(opt.retry_factor) * opt.n_paths;
  std::uniform_int_distribution<int> du(0, n - 1);
  std::uniform_int_distribution<int> dv(0, n - 2);
  while (static_cast<int>(paths.size()) < opt.n_paths) {
    if (budget-- <= 0)
      throw DataError("expert path sampling exhausted its retry budget");
    EntityId u = du(rng);
    int vi = dv(rng);
    EntityId v = vi >= u ? vi + 1 : vi;
    auto p = shortest_path(kg, u, v, opt.max_len, opt.layer_monotone);
    if (p) paths.push_back(std::move(*p));
  }
  return paths;
}

// --- partitioning --------------------------------------------------------------

namespace {

KnowledgeGraph induced_local(const KnowledgeGraph& kg,
                             const std::vector<EntityId>& members) {
  KnowledgeGraph local;
  std::unordered_map<EntityId, EntityId> to_local;
  to_local.reserve(members.size() * 2);
  for (EntityId g : members) {
    EntityId l = local.add_entity(kg.entity_names[g]);
    to_local.emplace(g, l);
    if (!kg.labels.empty()) local.labels.push_back(kg.labels[g]);
    if (!kg.features.empty()) local.features.push_back(kg.features[g]);
  }
  local.relation_names = kg.relation_names;
  local.subject_names = kg.subject_names;
  for (const Triple& tr : kg.triples) {
    auto h = to_local.find(tr.head);
    auto t = to_local.find(tr.tail);
    if (h != to_local.end() && t != to_local.end())
      local.add_triple(h->second, tr.rel, t->second);
  }
  local.finalize();
  return local;
}

void finish_partition(const KnowledgeGraph& kg, Partition& part, int k) {
  part.local_to_global.assign(k, {});
  for (EntityId e = 0; e < kg.n_entities(); ++e)
    if (part.owner[e] >= 0) part.local_to_global[part.owner[e]].push_back(e);
  part.locals.clear();
  for (int s = 0; s < k; ++s)
    part.locals.push_back(induced_local(kg, part.local_to_global[s]));
  part.dropped = dropped_edges(kg, part.owner);
  part.unused_triples = 0;
  for (const Triple& tr : kg.triples)
    if (part.owner[tr.head] < 0 || part.owner[tr.tail] < 0)
      ++part.unused_triples;
}

// Entities of each subject, ascending id; unlabeled entities under key -1.
std::unordered_map<int, std::vector<EntityId>> subject_pools(
    const KnowledgeGraph& kg) {
  std::unordered_map<int, std::vector<EntityId>> pools;
  for (EntityId e = 0; e < kg.n_entities(); ++e) {
    int s = kg.labels.empty() ? -1 : kg.labels[e];
    pools[s].push_back(e);
  }
  return pools;
}

}  // namespace

Partition partition(const KnowledgeGraph& kg, const PartitionSpec& spec) {
  const int n = kg.n_entities();
  const int k = spec.k_servers;
  if (k < 1 || k > n) throw ConfigError("server count must be in [1, entities]");
  if (spec.noniid_p < 0.0 || spec.noniid_p > 1.0)
    throw ConfigError("noniid_p must be in [0, 1]");
  if (spec.noniid_p < 1.0 && kg.labels.empty())
    throw DataError("subject labels required for non-iid partitioning");

  Partition part;
  part.owner.assign(n, -1);
  Rng rng(spec.seed);

  std::vector<EntityId> shared;
  if (spec.noniid_p < 1.0) {
    auto pools = subject_pools(kg);
    const int n_subj = static_cast<int>(kg.subject_names.size());
    // subject j belongs to server j % k; each server keeps (1-p) of every
    // pool it owns, the rest is dealt evenly below
    for (int j = 0; j < n_subj; ++j) {
      auto it = pools.find(j);
      if (it == pools.end()) continue;
      std::vector<EntityId>& pool = it->second;
      std::shuffle(pool.begin(), pool.end(), rng);
      int server = j % k;
      long keep = std::lround((1.0 - spec.noniid_p) * pool.size());
      for (size_t i = 0; i < pool.size(); ++i) {
        if (static_cast<long>(i) < keep)
          part.owner[pool[i]] = server;
        else
          shared.push_back(pool[i]);
      }
    }
    auto un = pools.find(-1);
    if (un != pools.end())
      shared.insert(shared.end(), un->second.begin(), un->second.end());
  } else {
    shared.resize(n);
    for (EntityId e = 0; e < n; ++e) shared[e] = e;
  }

  std::sort(shared.begin(), shared.end());
  std::shuffle(shared.begin(), shared.end(), rng);
  // deal leftovers to the currently smallest server so sizes stay balanced
  std::vector<long> size_of(k, 0);
  for (int o : part.owner)
    if (o >= 0) ++size_of[o];
  for (EntityId e : shared) {
    int smallest = 0;
    for (int s = 1; s < k; ++s)
      if (size_of[s] < size_of[smallest]) smallest = s;
    part.owner[e] = smallest;
    ++size_of[smallest];
  }
  finish_partition(kg, part, k);
  return part;
}

Partition partition_budgeted(const KnowledgeGraph& kg,
                             const PartitionSpec& spec) {
  const int n = kg.n_entities();
  const int k = spec.k_servers;
  if (k < 1 || k > n) throw ConfigError("server count must be in [1, entities]");
  if (spec.noniid_p < 0.0 || spec.noniid_p > 1.0)
    throw ConfigError("noniid_p must be in [0, 1]");
  if (kg.labels.empty())
    throw DataError("subject labels required for budgeted partitioning");
  const int n_subj = static_cast<int>(kg.subject_names.size());
  if (n_subj < 1) throw DataError("budgeted partitioning needs subjects");

  Partition part;
  part.owner.assign(n, -1);
  Rng rng(spec.seed);
  auto pools = subject_pools(kg);
  for (auto& [s, pool] : pools) std::shuffle(pool.begin(), pool.end(), rng);

  const long budget = n / n_subj;
  const long excl = std::lround((1.0 - spec.noniid_p) * budget);
  std::unordered_map<int, size_t> cursor;  // per-subject consumption cursor
  // exclusive part: server s draws from subject s % n_subj only
  for (int s = 0; s < k; ++s) {
    auto& pool = pools[s % n_subj];
    size_t& cur = cursor[s % n_subj];
    for (long i = 0; i < excl && cur < pool.size(); ++i, ++cur)
      part.owner[pool[cur]] = s;
  }
  // mixed part: uniform over everything still unassigned
  std::vector<EntityId> rest;
  for (EntityId e = 0; e < n; ++e)
    if (part.owner[e] < 0) rest.push_back(e);
  std::shuffle(rest.begin(), rest.end(), rng);
  size_t pos = 0;
  for (int s = 0; s < k; ++s) {
    long have = 0;
    for (int o : part.owner)
      if (o == s) ++have;  // n is desk-scale; the rescan keeps this simple
    for (long i = have; i < budget && pos < rest.size(); ++i, ++pos)
      part.owner[rest[pos]] = s;
  }
  finish_partition(kg, part, k);
  return part;
}

std::vector<Triple> dropped_edges(const KnowledgeGraph& kg,
                                  const std::vector<int>& owner) {
  if (owner.size() != static_cast<size_t>(kg.n_entities()))
    throw ComputeError("ownership map size mismatch");
  std::vector<Triple> dropped;
  for (const Triple& tr : kg.triples) {
    int oh = owner[tr.head], ot = owner[tr.tail];
    if (oh >= 0 && ot >= 0 && oh != ot) dropped.push_back(tr);
  }
  return dropped;
}

KnowledgeGraph induced_subgraph(const KnowledgeGraph& kg, int max_entities,
                                uint64_t seed) {
  if (max_entities < 1) throw ConfigError("subgraph size must be positive");
  const int n = kg.n_entities();
  if (max_entities >= n) {
    std::vector<EntityId> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return induced_local(kg, all);
  }
  Rng rng(seed);
  std::vector<char> visited(n, 0);
  std::vector<EntityId> kept;
  std::uniform_int_distribution<int> de(0, n - 1);
  while (static_cast<int>(kept.size()) < max_entities) {
    EntityId start = de(rng);
    while (visited[start]) start = de(rng);
    std::deque<EntityId> q{start};
    visited[start] = 1;
    while (!q.empty() && static_cast<int>(kept.size()) < max_entities) {
      EntityId v = q.front();
      q.pop_front();
      kept.push_back(v);
      std::vector<EntityId> nbrs;
      for (const Edge& ed : kg.out[v]) nbrs.push_back(ed.other);
      for (const Edge& ed : kg.in[v]) nbrs.push_back(ed.other);
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      for (EntityId u : nbrs) {
        if (!visited[u]) {
          visited[u] = 1;
          q.push_back(u);
        }
      }
    }
  }
  std::sort(kept.begin(), kept.end());
  return induced_local(kg, kept);
}

}  // namespace irml
