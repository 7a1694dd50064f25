#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance binary. Each is deliberately naive.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "netevo/dataset.hpp"
#include "netevo/eval.hpp"
#include "netevo/graph.hpp"

namespace oracle {

/// Singular values from the eigenvalues of the smaller Gram matrix.
inline Eigen::VectorXd gram_singular_values(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd g = a.rows() >= a.cols() ? Eigen::MatrixXd(a.transpose() * a)
                                                 : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return ev;
}

/// score_i = sum_j V(i, j)^2 W(j), by explicit loops.
inline Eigen::VectorXd dense_rank_scores(const Eigen::MatrixXd& v, const Eigen::VectorXd& w) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out(i) += v(i, j) * v(i, j) * w(j);
  }
  return out;
}

/// Central differences of f at x with step h.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += h;
    lo(i) -= h;
    g(i) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

/// Mean log-loss plus (lambda/2)|w|^2 written out term by term.
inline double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& wb, double lambda) {
  const Eigen::Index m = x.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double z = wb(m);
    for (Eigen::Index j = 0; j < m; ++j) z += x(i, j) * wb(j);
    const double p = 1.0 / (1.0 + std::exp(-z));
    total -= y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p);
  }
  double reg = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) reg += wb(j) * wb(j);
  return total / static_cast<double>(x.rows()) + 0.5 * lambda * reg;
}

/// Majority of the k nearest training rows (squared Euclidean, ties broken by
/// row index); returns the positive fraction among them.
inline double knn_score(const Eigen::MatrixXd& x, const std::vector<netevo::Label>& y,
                        const Eigen::RowVectorXd& q, int k) {
  std::vector<std::pair<double, Eigen::Index>> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) s += (x(i, j) - q(j)) * (x(i, j) - q(j));
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
  int pos = 0;
  for (std::size_t i = 0; i < kk; ++i) {
    pos += y[static_cast<std::size_t>(d[i].second)] == netevo::Label::Positive;
  }
  return static_cast<double>(pos) / static_cast<double>(kk);
}

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max() / 4;

inline std::vector<std::vector<std::size_t>> all_pairs_hops(const netevo::Snapshot& s) {
  const auto n = s.node_count();
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, kUnreachable));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [e, w] : s.edges()) {
    d[s.index_of(e.lo)][s.index_of(e.hi)] = 1;
    d[s.index_of(e.hi)][s.index_of(e.lo)] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Negatives of the formation task: pairs of nodes present in both
/// snapshots, unlinked in both, within max_hops in t.
inline std::set<netevo::EdgePair> formation_negatives(const netevo::Snapshot& t,
                                                      const netevo::Snapshot& t1,
                                                      std::size_t max_hops) {
  const auto d = all_pairs_hops(t);
  std::set<netevo::EdgePair> out;
  for (auto u : t.nodes()) {
    for (auto v : t.nodes()) {
      if (!(u < v) || !t1.has_node(u) || !t1.has_node(v)) continue;
      if (t.has_edge(u, v) || t1.has_edge(u, v)) continue;
      if (d[t.index_of(u)][t.index_of(v)] <= max_hops) out.insert(netevo::make_pair_canonical(u, v));
    }
  }
  return out;
}

inline std::size_t common_neighbors(const netevo::Snapshot& s, netevo::NodeId u,
                                    netevo::NodeId v) {
  std::size_t c = 0;
  for (auto w : s.nodes()) {
    if (w != u && w != v && s.has_edge(u, w) && s.has_edge(v, w)) ++c;
  }
  return c;
}

inline netevo::ConfusionCounts confusion(const std::vector<netevo::Label>& pred,
                                         const std::vector<netevo::Label>& truth) {
  netevo::ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == netevo::Label::Positive;
    const bool t = truth[i] == netevo::Label::Positive;
    if (p && t) ++c.tp;
    if (p && !t) ++c.fp;
    if (!p && !t) ++c.tn;
    if (!p && t) ++c.fn;
  }
  return c;
}

}  // namespace oracle
