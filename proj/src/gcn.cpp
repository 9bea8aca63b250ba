#include "irml/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "irml/errors.hpp"
#include "irml/rng.hpp"

namespace irml {

GcnGraph build_gcn_graph(const KnowledgeGraph& kg) {
  GcnGraph g;
  g.n = kg.n_entities();
  if (g.n == 0) throw DataError("empty graph");
  if (kg.features.empty() ||
      static_cast<int>(kg.features.size()) != g.n)
    throw DataError("node features required for classification");
  g.x.resize(g.n);
  for (int i = 0; i < g.n; ++i)
    g.x[i].assign(kg.features[i].begin(), kg.features[i].end());
  g.in_dim = static_cast<int>(g.x[0].size());

  // undirected edge set with self-loops
  std::vector<std::set<int>> adj(g.n);
  for (int i = 0; i < g.n; ++i) adj[i].insert(i);
  for (const Triple& t : kg.triples) {
    adj[t.head].insert(t.tail);
    adj[t.tail].insert(t.head);
  }
  std::vector<double> deg(g.n);
  for (int i = 0; i < g.n; ++i) deg[i] = static_cast<double>(adj[i].size());

  g.row_ptr.resize(g.n + 1, 0);
  for (int i = 0; i < g.n; ++i)
    g.row_ptr[i + 1] = g.row_ptr[i] + static_cast<int>(adj[i].size());
  g.col.reserve(g.row_ptr[g.n]);
  g.val.reserve(g.row_ptr[g.n]);
  for (int i = 0; i < g.n; ++i)
    for (int j : adj[i]) {
      g.col.push_back(j);
      g.val.push_back(1.0 / std::sqrt(deg[i] * deg[j]));
    }
  return g;
}

namespace {

// Y = A_hat * X for row-major X (n x d); writes into out (n x d).
void spmm(const GcnGraph& g, const std::vector<double>& x, int d,
          std::vector<double>& out) {
  out.assign(static_cast<size_t>(g.n) * d, 0.0);
  for (int i = 0; i < g.n; ++i) {
    double* row = &out[static_cast<size_t>(i) * d];
    for (int p = g.row_ptr[i]; p < g.row_ptr[i + 1]; ++p) {
      const double w = g.val[p];
      const double* src = &x[static_cast<size_t>(g.col[p]) * d];
      for (int k = 0; k < d; ++k) row[k] += w * src[k];
    }
  }
}

// C += A^T * B with A (n x p), B (n x q), C (p x q), all row-major.
void atb(const std::vector<double>& a, const std::vector<double>& b, int n,
         int p, int q, std::vector<double>& c) {
  for (int i = 0; i < n; ++i) {
    const double* ra = &a[static_cast<size_t>(i) * p];
    const double* rb = &b[static_cast<size_t>(i) * q];
    for (int j = 0; j < p; ++j) {
      if (ra[j] == 0.0) continue;
      double* rc = &c[static_cast<size_t>(j) * q];
      for (int k = 0; k < q; ++k) rc[k] += ra[j] * rb[k];
    }
  }
}

// C = A * W with A (n x p), W (p x q); C (n x q).
void ab(const std::vector<double>& a, const std::vector<double>& w, int n,
        int p, int q, std::vector<double>& c) {
  c.assign(static_cast<size_t>(n) * q, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* ra = &a[static_cast<size_t>(i) * p];
    double* rc = &c[static_cast<size_t>(i) * q];
    for (int j = 0; j < p; ++j) {
      if (ra[j] == 0.0) continue;
      const double* rw = &w[static_cast<size_t>(j) * q];
      for (int k = 0; k < q; ++k) rc[k] += ra[j] * rw[k];
    }
  }
}

struct Forward {
  std::vector<double> ax;   // n x in_dim (cacheable but cheap enough)
  std::vector<double> h;    // relu(AX W1), n x hidden
  std::vector<double> ah;   // A h
  std::vector<double> z;    // logits, n x classes
};

Forward forward_pass(const GcnModel& m, const GcnGraph& g,
                     const std::vector<double>& xflat) {
  Forward f;
  spmm(g, xflat, g.in_dim, f.ax);
  ab(f.ax, m.w1, g.n, m.in_dim, m.hidden, f.h);
  for (double& v : f.h) v = v > 0 ? v : 0.0;
  spmm(g, f.h, m.hidden, f.ah);
  ab(f.ah, m.w2, g.n, m.hidden, m.n_classes, f.z);
  return f;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& x) {
  if (x.empty()) return {};
  std::vector<double> out;
  out.reserve(x.size() * x[0].size());
  for (const auto& row : x) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

GcnModel init_gcn(int in_dim, int hidden, int n_classes, uint64_t seed) {
  GcnModel m;
  m.in_dim = in_dim;
  m.hidden = hidden;
  m.n_classes = n_classes;
  m.w1.resize(static_cast<size_t>(in_dim) * hidden);
  m.w2.resize(static_cast<size_t>(hidden) * n_classes);
  Rng rng(seed);
  double s1 = std::sqrt(6.0 / (in_dim + hidden));
  double s2 = std::sqrt(6.0 / (hidden + n_classes));
  std::uniform_real_distribution<double> u1(-s1, s1), u2(-s2, s2);
  for (double& v : m.w1) v = u1(rng);
  for (double& v : m.w2) v = u2(rng);
  return m;
}

double gcn_step(GcnModel& m, const GcnGraph& g,
                const std::vector<int>& train_idx,
                const std::vector<int>& labels, double lr) {
  if (train_idx.empty()) throw DataError("no training nodes");
  std::vector<double> xflat = flatten(g.x);
  Forward f = forward_pass(m, g, xflat);

  // softmax cross-entropy on the training rows; dZ zero elsewhere
  std::vector<double> dz(static_cast<size_t>(g.n) * m.n_classes, 0.0);
  double loss = 0;
  const double inv = 1.0 / train_idx.size();
  for (int i : train_idx) {
    if (i < 0 || i >= g.n) throw DataError("train index out of range");
    int y = labels[i];
    if (y < 0 || y >= m.n_classes) throw DataError("label out of range");
    const double* zr = &f.z[static_cast<size_t>(i) * m.n_classes];
    double zmax = *std::max_element(zr, zr + m.n_classes);
    double s = 0;
    for (int c = 0; c < m.n_classes; ++c) s += std::exp(zr[c] - zmax);
    loss += -(zr[y] - zmax - std::log(s)) * inv;
    double* dzr = &dz[static_cast<size_t>(i) * m.n_classes];
    for (int c = 0; c < m.n_classes; ++c)
      dzr[c] = (std::exp(zr[c] - zmax) / s - (c == y ? 1.0 : 0.0)) * inv;
  }

  // dW2 = (A h)^T dZ ; dH = A^T dZ W2^T (A symmetric) gated by relu
  std::vector<double> gw2(m.w2.size(), 0.0);
  atb(f.ah, dz, g.n, m.hidden, m.n_classes, gw2);
  std::vector<double> adz;
  spmm(g, dz, m.n_classes, adz);
  std::vector<double> dh(static_cast<size_t>(g.n) * m.hidden, 0.0);
  for (int i = 0; i < g.n; ++i) {
    const double* r = &adz[static_cast<size_t>(i) * m.n_classes];
    double* dr = &dh[static_cast<size_t>(i) * m.hidden];
    const double* hr = &f.h[static_cast<size_t>(i) * m.hidden];
    for (int hcol = 0; hcol < m.hidden; ++hcol) {
      if (hr[hcol] <= 0) continue;
      const double* w2r = &m.w2[static_cast<size_t>(hcol) * m.n_classes];
      double s = 0;
      for (int c = 0; c < m.n_classes; ++c) s += r[c] * w2r[c];
      dr[hcol] = s;
    }
  }
  std::vector<double> gw1(m.w1.size(), 0.0);
  atb(f.ax, dh, g.n, m.in_dim, m.hidden, gw1);

  for (size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= lr * gw1[i];
  for (size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= lr * gw2[i];
  return loss;
}

std::vector<int> gcn_predict(const GcnModel& m, const GcnGraph& g) {
  std::vector<double> xflat = flatten(g.x);
  Forward f = forward_pass(m, g, xflat);
  std::vector<int> pred(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double* zr = &f.z[static_cast<size_t>(i) * m.n_classes];
    pred[i] = static_cast<int>(std::max_element(zr, zr + m.n_classes) - zr);
  }
  return pred;
}

double gcn_accuracy(const GcnModel& m, const GcnGraph& g,
                    const std::vector<int>& idx,
                    const std::vector<int>& labels) {
  if (idx.empty()) throw DataError("no evaluation nodes");
  std::vector<int> pred = gcn_predict(m, g);
  double hit = 0;
  for (int i : idx) hit += pred[i] == labels[i];
  return hit / idx.size();
}

}  // namespace irml
