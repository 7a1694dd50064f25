#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netevo/core.hpp"

namespace netevo::spectral {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A = U diag(S) V^T with r = min(rows, cols) components.
template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> U;  // rows x r, orthonormal columns
  Vector<Scalar> S;  // r, non-increasing, non-negative
  Matrix<Scalar> V;  // cols x r, orthonormal columns

  Eigen::Index rank_dim() const { return S.size(); }
};

struct JacobiOptions {
  int max_sweeps = 80;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) throw Error("matrix is empty");
  if (!a.allFinite()) throw Error("matrix contains non-finite entries");
}

/// Replaces columns of `q` listed in `fill` with unit vectors orthogonal to
/// every other column (modified Gram-Schmidt over the canonical basis).
template <typename Scalar>
void complete_orthonormal(Matrix<Scalar>& q, const std::vector<Eigen::Index>& fill) {
  if (fill.empty()) return;
  std::vector<bool> is_fill(static_cast<std::size_t>(q.cols()), false);
  for (const auto j : fill) is_fill[static_cast<std::size_t>(j)] = true;
  std::vector<Eigen::Index> done;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (!is_fill[static_cast<std::size_t>(j)]) done.push_back(j);
  }
  Eigen::Index basis = 0;
  for (const auto j : fill) {
    while (true) {
      if (basis >= q.rows()) throw Error("cannot complete orthonormal basis");
      Vector<Scalar> v = Vector<Scalar>::Unit(q.rows(), basis++);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto k : done) v -= q.col(k).dot(v) * q.col(k);
      }
      const Scalar n = v.norm();
      if (n > Scalar(0.5)) {
        q.col(j) = v / n;
        done.push_back(j);
        break;
      }
    }
  }
}

/// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
template <typename Scalar>
SvdFactors<Scalar> jacobi_tall(Matrix<Scalar> w, const JacobiOptions& opts) {
  const Eigen::Index n = w.cols();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);

  bool converged = n < 2;
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar alpha = w.col(p).squaredNorm();
        const Scalar beta = w.col(q).squaredNorm();
        const Scalar gamma = w.col(p).dot(w.col(q));
        if (alpha == Scalar(0) || beta == Scalar(0)) continue;
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
        const Scalar t = (zeta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = c * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const Scalar wp = w(i, p);
          const Scalar wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const Scalar vp = v(i, p);
          const Scalar vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw Error("Jacobi SVD did not converge");

  Vector<Scalar> sigma = w.colwise().norm().transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sigma(a) > sigma(b); });

  SvdFactors<Scalar> f;
  f.U.resize(w.rows(), n);
  f.S.resize(n);
  f.V.resize(n, n);
  const Scalar smax = n > 0 ? sigma(order.front()) : Scalar(0);
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    f.S(j) = sigma(src);
    f.V.col(j) = v.col(src);
    if (f.S(j) <= smax * eps || f.S(j) == Scalar(0)) {
      f.U.col(j).setZero();
      null_cols.push_back(j);
    } else {
      f.U.col(j) = w.col(src) / f.S(j);
    }
  }
  complete_orthonormal(f.U, null_cols);
  return f;
}

}  // namespace detail

/// Makes the largest-magnitude entry of every V column non-negative,
/// flipping the matching U column.
template <typename Scalar>
void canonicalize_signs(SvdFactors<Scalar>& f) {
  for (Eigen::Index j = 0; j < f.V.cols(); ++j) {
    Eigen::Index arg = 0;
    f.V.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.V(arg, j) < Scalar(0)) {
      f.V.col(j) *= Scalar(-1);
      f.U.col(j) *= Scalar(-1);
    }
  }
}

/// Thin SVD by one-sided Jacobi rotations.
template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a,
                                         const JacobiOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(a);
  SvdFactors<Scalar> f;
  if (a.rows() >= a.cols()) {
    f = detail::jacobi_tall<Scalar>(Matrix<Scalar>(a), opts);
  } else {
    auto t = detail::jacobi_tall<Scalar>(Matrix<Scalar>(a.transpose()), opts);
    f.U = std::move(t.V);
    f.S = std::move(t.S);
    f.V = std::move(t.U);
  }
  canonicalize_signs(f);
  return f;
}

/// Rows of A expressed in the top-k right singular directions: A V_k.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Matrix<Scalar> project(const Eigen::MatrixBase<Derived>& a, const SvdFactors<Scalar>& f,
                       Eigen::Index k) {
  if (k < 1 || k > f.rank_dim()) {
    throw Error("projection dimension " + std::to_string(k) + " outside [1, " +
                std::to_string(f.rank_dim()) + "]");
  }
  if (a.cols() != f.V.rows()) throw Error("matrix width does not match the factorization");
  return a * f.V.leftCols(k);
}

/// Fraction of squared singular mass in the first k components.
template <typename Scalar>
Scalar captured_energy(const SvdFactors<Scalar>& f, Eigen::Index k) {
  const Scalar total = f.S.squaredNorm();
  if (total == Scalar(0)) return Scalar(0);
  return f.S.head(k).squaredNorm() / total;
}

/// Z-score record fitted on training rows and re-applied to held-out rows.
template <typename Scalar>
struct Standardizer {
  static constexpr double kStdFloor = 1e-9;

  Vector<Scalar> mean;
  Vector<Scalar> scale;

  template <typename Derived>
  static Standardizer fit(const Eigen::MatrixBase<Derived>& x) {
    detail::require_finite(x);
    Standardizer s;
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    const auto n = x.rows();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Scalar ss = (x.col(j).array() - s.mean(j)).square().sum();
      const Scalar sd = n > 1 ? std::sqrt(ss / Scalar(n - 1)) : Scalar(0);
      s.scale(j) = std::max(sd, Scalar(kStdFloor));
    }
    return s;
  }

  template <typename Derived>
  Matrix<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.cols() != mean.size()) throw Error("standardizer width mismatch");
    return ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array())
        .matrix();
  }
};

/// Standardize, then project on the top-k right singular vectors.
template <typename Scalar>
struct EigenfeatureMap {
  Standardizer<Scalar> standardizer;
  Matrix<Scalar> basis;  // m x k

  template <typename Derived>
  static EigenfeatureMap fit(const Eigen::MatrixBase<Derived>& train, Eigen::Index k,
                             SvdFactors<Scalar>* factors_out = nullptr) {
    EigenfeatureMap m;
    m.standardizer = Standardizer<Scalar>::fit(train);
    auto f = svd(m.standardizer.apply(train));
    if (k < 1 || k > f.rank_dim()) {
      throw Error("eigenfeature count " + std::to_string(k) + " outside [1, " +
                  std::to_string(f.rank_dim()) + "]");
    }
    m.basis = f.V.leftCols(k);
    if (factors_out) *factors_out = std::move(f);
    return m;
  }

  Eigen::Index dim() const { return basis.cols(); }

  template <typename Derived>
  Matrix<Scalar> transform(const Eigen::MatrixBase<Derived>& x) const {
    return standardizer.apply(x) * basis;
  }
};

/// Per-original-feature importance from squared right singular vectors.
struct FeatureRanking {
  Eigen::VectorXd scores;             // (V_k ∘ V_k) W, signed
  std::vector<Eigen::Index> order;    // descending score, ties by index
  std::vector<Eigen::Index> abs_order;  // descending |score|, ties by index

  /// 1-based rank of feature j in `order`.
  Eigen::Index rank_of(Eigen::Index j) const;
};

std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& scores);

template <typename DerivedV, typename DerivedW>
FeatureRanking rank_with_basis(const Eigen::MatrixBase<DerivedV>& vk,
                               const Eigen::MatrixBase<DerivedW>& w) {
  if (vk.cols() != w.size()) throw Error("weight vector length does not match basis width");
  FeatureRanking r;
  r.scores = (vk.array().square().matrix() * w).template cast<double>();
  r.order = descending_order(r.scores);
  r.abs_order = descending_order(r.scores.cwiseAbs());
  return r;
}

template <typename Scalar, typename DerivedW>
FeatureRanking rank_features(const SvdFactors<Scalar>& f, const Eigen::MatrixBase<DerivedW>& w,
                             Eigen::Index k) {
  if (k < 1 || k > f.rank_dim()) throw Error("ranking dimension out of range");
  if (w.size() != k) {
    throw Error("weight vector has length " + std::to_string(w.size()) + ", expected " +
                std::to_string(k));
  }
  return rank_with_basis(f.V.leftCols(k), w);
}

/// Spearman rank correlation between two score vectors over the same items
/// (ties receive their average rank).
double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

void write_factors(const std::filesystem::path& path, const SvdFactors<double>& f,
                   const std::vector<std::string>& feature_names);
void write_ranking(const std::filesystem::path& path, const FeatureRanking& r,
                   const std::vector<std::string>& feature_names);

}  // namespace netevo::spectral
