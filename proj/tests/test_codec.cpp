#include <cmath>
#include <random>

#include "doctest.h"
#include "irml/codec.hpp"
#include "irml/synth.hpp"
#include "test_util.hpp"

using namespace irml;

namespace {

// 20 entities, 3 relations, 15 triples: five 4-node paths whose edge k uses
// relation k.  Acyclic with no relation repeated along a path, so an exact
// zero-loss embedding exists even with entities pinned to the unit sphere
// (cyclic structure would force relation vectors toward zero instead).
KnowledgeGraph toy_codec_kg() {
  KnowledgeGraph kg;
  for (int i = 0; i < 20; ++i) kg.add_entity("e" + std::to_string(i));
  for (int r = 0; r < 3; ++r) kg.add_relation("r" + std::to_string(r));
  for (int c = 0; c < 5; ++c)
    for (int k = 0; k < 3; ++k) kg.add_triple(4 * c + k, k, 4 * c + k + 1);
  kg.finalize();
  return kg;
}

EmbeddingTable hand_table(int n_entities, int n_relations,
                          const std::vector<std::vector<double>>& ev,
                          const std::vector<std::vector<double>>& rv) {
  EmbeddingTable t;
  t.dim = int(ev.at(0).size());
  t.entity = ev;
  t.relation = rv;
  (void)n_entities;
  (void)n_relations;
  return t;
}

double fd_loss(std::vector<TriplePair>& pairs, EmbeddingTable& table,
               double margin, char kind, int id, int coord, double h) {
  std::vector<double>& v =
      kind == 'e' ? table.entity[id] : table.relation[id];
  double keep = v[coord];
  v[coord] = keep + h;
  double up = margin_loss(pairs, table, margin);
  v[coord] = keep - h;
  double down = margin_loss(pairs, table, margin);
  v[coord] = keep;
  return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("margin_loss: hand arithmetic on 2-D vectors") {
  // e0=(0,0), r=(1,0), e1=(1,0); negative corrupts the tail
  EmbeddingTable t =
      hand_table(3, 1, {{0, 0}, {1, 0}, {0.5, 0.5}}, {{1, 0}});
  Triple pos{0, 0, 1};

  // negative tail = e0: ||e0+r-e0||^2 = 1 -> loss = max{0, 1 + 0 - 1} = 0
  CHECK(margin_loss({{pos, Triple{0, 0, 0}}}, t, 1.0) == doctest::Approx(0.0));
  // negative tail = e1 itself: negative distance 0 -> loss = 1
  CHECK(margin_loss({{pos, Triple{0, 0, 1}}}, t, 1.0) == doctest::Approx(1.0));
  CHECK(margin_loss({{pos, Triple{0, 0, 0}}}, t, 1.0) >= 0.0);
}

TEST_CASE("margin_loss: inactive hinge gives zero loss and zero gradient") {
  // pos residual 0, neg residual 4, margin 1 -> hinge inactive
  EmbeddingTable t = hand_table(3, 1, {{0, 0}, {1, 0}, {3, 0}}, {{1, 0}});
  std::vector<TriplePair> pairs = {{Triple{0, 0, 1}, Triple{0, 0, 2}}};
  CHECK(margin_loss(pairs, t, 1.0) == doctest::Approx(0.0));
  GradMap g = loss_gradient(pairs, t, 1.0);
  for (const auto& [key, vec] : g)
    for (double x : vec) CHECK(x == doctest::Approx(0.0));
}

TEST_CASE("loss_gradient: active single pair hand formula for the head") {
  // head shared by positive and negative term (tail corruption)
  std::vector<std::vector<double>> ev = {{0.2, -0.1}, {0.9, 0.4}, {0.5, 0.8}};
  std::vector<std::vector<double>> rv = {{0.5, 0.1}};
  EmbeddingTable t = hand_table(3, 1, ev, rv);
  std::vector<TriplePair> pairs = {{Triple{0, 0, 1}, Triple{0, 0, 2}}};
  REQUIRE(margin_loss(pairs, t, 1.0) > 0.0);  // hinge active
  GradMap g = loss_gradient(pairs, t, 1.0);
  std::vector<double> want(2);
  for (int c = 0; c < 2; ++c) {
    double pos_d = ev[0][c] + rv[0][c] - ev[1][c];
    double neg_d = ev[0][c] + rv[0][c] - ev[2][c];
    want[c] = 2 * pos_d - 2 * neg_d;
  }
  REQUIRE(g.count({'e', 0}) == 1);
  CHECK(g[{'e', 0}][0] == doctest::Approx(want[0]).epsilon(1e-12));
  CHECK(g[{'e', 0}][1] == doctest::Approx(want[1]).epsilon(1e-12));
}

TEST_CASE("loss_gradient: matches central finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> du(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int ne = 6, nr = 2, d = 4;
    EmbeddingTable t;
    t.dim = d;
    for (int i = 0; i < ne; ++i) {
      std::vector<double> v(d);
      for (double& x : v) x = du(rng);
      t.entity.push_back(v);
    }
    for (int i = 0; i < nr; ++i) {
      std::vector<double> v(d);
      for (double& x : v) x = du(rng);
      t.relation.push_back(v);
    }
    std::vector<TriplePair> pairs;
    std::uniform_int_distribution<int> de(0, ne - 1), dr(0, nr - 1);
    for (int i = 0; i < 8; ++i)
      pairs.push_back({Triple{de(rng), dr(rng), de(rng)},
                       Triple{de(rng), dr(rng), de(rng)}});
    // skip draws with a hinge term sitting on the kink
    bool near_kink = false;
    for (const TriplePair& pr : pairs) {
      double pos = translation_residual(t.entity[pr.pos.head],
                                        t.relation[pr.pos.rel],
                                        t.entity[pr.pos.tail]);
      double neg = translation_residual(t.entity[pr.neg.head],
                                        t.relation[pr.neg.rel],
                                        t.entity[pr.neg.tail]);
      if (std::abs(1.0 + pos - neg) < 1e-4) near_kink = true;
    }
    if (near_kink) continue;
    ++checked;

    GradMap g = loss_gradient(pairs, t, 1.0);
    const double h = 1e-6;
    for (const auto& [key, vec] : g) {
      for (int c = 0; c < d; ++c) {
        double fd = fd_loss(pairs, t, 1.0, key.first, key.second, c, h);
        // unit floor: a self-loop triple cancels its entity gradient exactly,
        // leaving only FD roundoff noise in the numerator
        double denom = std::max({std::abs(fd), std::abs(vec[c]), 1.0});
        CHECK(std::abs(fd - vec[c]) / denom < 1e-4);
      }
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("train_encoder: loss collapse and exhaustive top-1 retrieval") {
  KnowledgeGraph kg = toy_codec_kg();
  double retrieval_sum = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CodecConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 200;
    cfg.lr = 0.02;
    cfg.batch_size = 16;
    cfg.seed = seed;
    TrainResult res = train_encoder(kg, cfg);
    REQUIRE(res.epoch_mean_loss.size() == 200);
    CHECK(res.epoch_mean_loss.back() <
          0.1 * res.epoch_mean_loss.front());

    int hits = 0;
    for (const Triple& tr : kg.triples) {
      // brute-force argmin over all entities of ||h + r - e||^2
      int best = -1;
      double best_d = 0;
      for (EntityId e = 0; e < kg.n_entities(); ++e) {
        double d = translation_residual(res.table.entity[tr.head],
                                        res.table.relation[tr.rel],
                                        res.table.entity[e]);
        if (best < 0 || d < best_d) {
          best = e;
          best_d = d;
        }
      }
      hits += best == tr.tail;
    }
    retrieval_sum += double(hits) / kg.n_triples();
  }
  CHECK(retrieval_sum / 5.0 >= 0.9);
}

TEST_CASE("train_encoder: zero epochs returns the seeded initialization") {
  KnowledgeGraph kg = toy_codec_kg();
  CodecConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 0;
  cfg.seed = 42;
  TrainResult res = train_encoder(kg, cfg);
  EmbeddingTable init =
      init_table(kg.n_entities(), kg.n_relations(), 6, 42);
  CHECK(res.table.entity == init.entity);
  CHECK(res.table.relation == init.relation);
  double bound = 6.0 / std::sqrt(6.0);
  for (const auto& v : res.table.entity)
    for (double x : v) CHECK(std::abs(x) <= bound);
}

TEST_CASE("train_encoder: empty graph errors; translation strengthens") {
  KnowledgeGraph empty;
  empty.add_entity("x");
  empty.add_relation("r");
  empty.finalize();
  CodecConfig cfg;
  CHECK_THROWS_AS(train_encoder(empty, cfg), DataError);

  KnowledgeGraph kg = toy_codec_kg();
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CodecConfig c2;
    c2.dim = 8;
    c2.epochs = 60;
    c2.seed = seed;
    EmbeddingTable before =
        init_table(kg.n_entities(), kg.n_relations(), 8, seed);
    EmbeddingTable after = train_encoder(kg, c2).table;
    auto mean_residual = [&](const EmbeddingTable& t) {
      double s = 0;
      for (const Triple& tr : kg.triples)
        s += translation_residual(t.entity[tr.head], t.relation[tr.rel],
                                  t.entity[tr.tail]);
      return s / kg.n_triples();
    };
    CHECK(mean_residual(after) < mean_residual(before));
  }
}

TEST_CASE("train_encoder: entity vectors stay unit-norm and injective") {
  KnowledgeGraph kg = toy_codec_kg();
  CodecConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 150;
  cfg.seed = 7;
  EmbeddingTable t = train_encoder(kg, cfg).table;
  for (const auto& v : t.entity) {
    double n = 0;
    for (double x : v) n += x * x;
    CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-9);
  }
  for (EntityId a = 0; a < kg.n_entities(); ++a)
    for (EntityId b = a + 1; b < kg.n_entities(); ++b)
      CHECK(std::sqrt(sq_dist(t.entity[a], t.entity[b])) > 1e-6);
}

TEST_CASE("encode: lookup and concatenation orders") {
  EmbeddingTable t =
      hand_table(3, 2, {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}},
                 {{1, 2}, {3, 4}});
  EncodedSignal one = encode_entities({1}, t);
  REQUIRE(one.samples.size() == 2);
  CHECK(one.samples[0] == 0.3);
  CHECK(one.samples[1] == 0.4);
  REQUIRE(one.spans.size() == 1);
  CHECK(one.spans[0].kind == 'e');

  ReasoningPath p;
  p.origin = 0;
  p.steps.push_back({1, 2});
  EncodedSignal sig = encode_path(p, t, true);
  REQUIRE(sig.samples.size() == 6);
  // order e0, r1, e2
  CHECK(sig.samples[0] == 0.1);
  CHECK(sig.samples[2] == 3.0);
  CHECK(sig.samples[4] == 0.5);
  REQUIRE(sig.spans.size() == 3);
  CHECK(sig.spans[1].kind == 'r');
  int tiled = 0;
  for (const SymbolSpan& sp : sig.spans) {
    CHECK(sp.offset == tiled);
    tiled += sp.len;
  }
  CHECK(tiled == int(sig.samples.size()));

  CHECK_THROWS_AS(encode_entities({9}, t), ComputeError);
}

TEST_CASE("encode_path without relations rides entities only") {
  EmbeddingTable t = hand_table(2, 1, {{1, 1}, {2, 2}}, {{5, 5}});
  ReasoningPath p;
  p.origin = 0;
  p.steps.push_back({0, 1});
  EncodedSignal sig = encode_path(p, t, false);
  REQUIRE(sig.samples.size() == 4);
  CHECK(sig.samples[2] == 2);
  for (const SymbolSpan& sp : sig.spans) CHECK(sp.kind == 'e');
}

TEST_CASE("table CSV round-trips to identical doubles") {
  KnowledgeGraph kg = toy_codec_kg();
  CodecConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 7;
  cfg.seed = 13;
  EmbeddingTable t = train_encoder(kg, cfg).table;
  std::string path = write_temp_file("table.csv", "");
  save_table_csv(t, path);
  EmbeddingTable back = load_table_csv(path);
  CHECK(back.dim == t.dim);
  CHECK(back.entity == t.entity);
  CHECK(back.relation == t.relation);
}

TEST_CASE("signal power is the mean square sample") {
  EmbeddingTable t = hand_table(1, 0, {{3, 4}}, {});
  EncodedSignal sig = encode_entities({0}, t);
  CHECK(sig.power() == doctest::Approx(12.5));
  EncodedSignal empty;
  CHECK_THROWS_AS(empty.power(), ComputeError);
}
