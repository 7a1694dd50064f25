#include "netevo/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace netevo::models {

using nlohmann::json;

std::string to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LogisticRegression: return "logreg";
    case ClassifierKind::LinearSvm: return "svm";
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::NaiveBayes: return "naive_bayes";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::RbfSvm: return "svm_rbf";
    case ClassifierKind::Ensemble: return "ensemble";
  }
  return "?";
}

ClassifierKind parse_classifier(const std::string& name) {
  for (const auto k : {ClassifierKind::LogisticRegression, ClassifierKind::LinearSvm,
                       ClassifierKind::Knn, ClassifierKind::NaiveBayes,
                       ClassifierKind::RandomForest, ClassifierKind::RbfSvm,
                       ClassifierKind::Ensemble}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown classifier '" + name + "'");
}

std::string display_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LogisticRegression: return "Logistic regression";
    case ClassifierKind::LinearSvm: return "SVM";
    case ClassifierKind::Knn: return "k-NN";
    case ClassifierKind::NaiveBayes: return "Naive-Bayes";
    case ClassifierKind::RandomForest: return "Random forests";
    case ClassifierKind::RbfSvm: return "SVM-RBF Kernel";
    case ClassifierKind::Ensemble: return "Ensemble of Classifiers";
  }
  return "?";
}

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* field) {
    if (!ok) throw InputError(fmt::format("train config: '{}' is out of range", field));
  };
  require(learning_rate > 0 && std::isfinite(learning_rate), "learning_rate");
  require(epochs > 0, "epochs");
  require(regularization > 0 && std::isfinite(regularization), "regularization");
  require(gradient_tolerance >= 0, "gradient_tolerance");
  require(k_neighbors > 0, "k_neighbors");
  require(tree_count > 0, "tree_count");
  require(max_depth >= 0, "max_depth");
  require(max_features >= 0, "max_features");
  require(min_samples_split >= 2, "min_samples_split");
  require(rbf_gamma >= 0 && std::isfinite(rbf_gamma), "rbf_gamma");
  require(rbf_epochs > 0, "rbf_epochs");
}

Eigen::VectorXd to_01(const std::vector<Label>& y) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_int(y[i]);
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::VectorXd to_pm1(const std::vector<Label>& y) {
  return (2.0 * to_01(y).array() - 1.0).matrix();
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd mat_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = vec_from(j[i]);
    if (row.size() != cols) throw InputError("model file: ragged matrix");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json labels_json(const std::vector<Label>& y) {
  std::vector<int> v;
  for (const auto l : y) v.push_back(to_int(l));
  return v;
}

std::vector<Label> labels_from(const json& j) {
  std::vector<Label> out;
  for (const int v : j.get<std::vector<int>>()) out.push_back(label_from_bool(v != 0));
  return out;
}

void check_training_data(ClassifierKind kind, const Eigen::MatrixXd& x,
                         const std::vector<Label>& y) {
  if (x.rows() == 0 || x.cols() == 0) throw InputError("training matrix has no rows or columns");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw InputError(fmt::format("training matrix has {} rows but {} labels", x.rows(), y.size()));
  }
  if (!x.allFinite()) throw InputError("training matrix contains non-finite values");
  const auto pos = std::count(y.begin(), y.end(), Label::Positive);
  const bool both = pos > 0 && static_cast<std::size_t>(pos) < y.size();
  if (kind != ClassifierKind::Knn) {
    if (x.rows() < 2) throw InputError("need at least 2 training rows");
    if (!both) throw InputError(to_string(kind) + " needs both classes in the training labels");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Model implementations
// ---------------------------------------------------------------------------

namespace detail {

class ModelImpl {
 public:
  virtual ~ModelImpl() = default;
  virtual ClassifierKind kind() const = 0;
  virtual Eigen::Index dimension() const = 0;
  virtual bool probabilistic() const = 0;
  virtual double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const = 0;
  virtual std::optional<LinearWeights> linear_weights() const { return std::nullopt; }
  virtual json to_json() const = 0;

  Label label_for(double s) const {
    return label_from_bool(probabilistic() ? s > 0.5 : s > 0.0);
  }
};

}  // namespace detail

namespace {

using detail::ModelImpl;

class LinearModel final : public ModelImpl {
 public:
  LinearModel(ClassifierKind kind, LinearWeights lw) : kind_(kind), lw_(std::move(lw)) {}

  ClassifierKind kind() const override { return kind_; }
  Eigen::Index dimension() const override { return lw_.weights.size(); }
  bool probabilistic() const override { return kind_ == ClassifierKind::LogisticRegression; }
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    const double z = row.dot(lw_.weights.transpose()) + lw_.intercept;
    return probabilistic() ? sigmoid(z) : z;
  }
  std::optional<LinearWeights> linear_weights() const override { return lw_; }
  json to_json() const override {
    return {{"weights", vec_json(lw_.weights)}, {"intercept", lw_.intercept}};
  }

 private:
  ClassifierKind kind_;
  LinearWeights lw_;
};

LinearWeights fit_logistic(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                           const TrainConfig& cfg) {
  const Eigen::VectorXd y01 = to_01(y);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double b = 0.0;
  for (int t = 1; t <= cfg.epochs; ++t) {
    const Eigen::VectorXd g = logistic_gradient(x, y01, w, b, cfg.regularization);
    if (g.norm() <= cfg.gradient_tolerance) break;
    const double step = cfg.learning_rate / std::sqrt(static_cast<double>(t));
    w -= step * g.head(w.size());
    b -= step * g(w.size());
  }
  return {w, b};
}

LinearWeights fit_linear_svm(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                             const TrainConfig& cfg) {
  const Eigen::VectorXd ys = to_pm1(y);
  const double n = static_cast<double>(x.rows());
  LinearWeights cur{Eigen::VectorXd::Zero(x.cols()), 0.0};
  LinearWeights best = cur;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.epochs; ++t) {
    const Eigen::VectorXd margin =
        ys.array() * ((x * cur.weights).array() + cur.intercept);
    const double obj = 0.5 * cfg.regularization * cur.weights.squaredNorm() +
                       (1.0 - margin.array()).max(0.0).sum() / n;
    if (obj < best_obj) {
      best_obj = obj;
      best = cur;
    }
    // subgradient of the active hinge terms
    const Eigen::VectorXd active = (margin.array() < 1.0).cast<double>() * ys.array();
    const Eigen::VectorXd gw = cfg.regularization * cur.weights - x.transpose() * active / n;
    const double gb = -active.sum() / n;
    const double step = cfg.learning_rate / std::sqrt(static_cast<double>(t));
    cur.weights -= step * gw;
    cur.intercept -= step * gb;
  }
  {
    const Eigen::VectorXd margin =
        ys.array() * ((x * cur.weights).array() + cur.intercept);
    const double obj = 0.5 * cfg.regularization * cur.weights.squaredNorm() +
                       (1.0 - margin.array()).max(0.0).sum() / n;
    if (obj < best_obj) best = cur;
  }
  return best;
}

class KnnModel final : public ModelImpl {
 public:
  KnnModel(Eigen::MatrixXd x, std::vector<Label> y, int k)
      : x_(std::move(x)), y_(std::move(y)), k_(k) {}

  ClassifierKind kind() const override { return ClassifierKind::Knn; }
  Eigen::Index dimension() const override { return x_.cols(); }
  bool probabilistic() const override { return true; }
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    const Eigen::VectorXd d2 = (x_.rowwise() - row).rowwise().squaredNorm();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(x_.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return d2(a) < d2(b) || (d2(a) == d2(b) && a < b);
                      });
    std::size_t pos = 0;
    for (std::size_t i = 0; i < k; ++i) pos += y_[static_cast<std::size_t>(idx[i])] == Label::Positive;
    return static_cast<double>(pos) / static_cast<double>(k);
  }
  json to_json() const override {
    return {{"k", k_}, {"x", mat_json(x_)}, {"y", labels_json(y_)}};
  }

 private:
  Eigen::MatrixXd x_;
  std::vector<Label> y_;
  int k_;
};

class NaiveBayesModel final : public ModelImpl {
 public:
  static constexpr double kVarFloor = 1e-9;

  NaiveBayesModel(Eigen::MatrixXd mean, Eigen::MatrixXd var, Eigen::Vector2d log_prior)
      : mean_(std::move(mean)), var_(std::move(var)), log_prior_(log_prior) {}

  static std::shared_ptr<NaiveBayesModel> fit(const Eigen::MatrixXd& x,
                                              const std::vector<Label>& y) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2, x.cols());
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(2, x.cols());
    Eigen::Vector2d count = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = to_int(y[static_cast<std::size_t>(i)]);
      mean.row(c) += x.row(i);
      count(c) += 1;
    }
    for (int c = 0; c < 2; ++c) mean.row(c) /= count(c);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = to_int(y[static_cast<std::size_t>(i)]);
      var.row(c) += (x.row(i) - mean.row(c)).array().square().matrix();
    }
    for (int c = 0; c < 2; ++c) {
      var.row(c) = (var.row(c) / count(c)).array().max(kVarFloor).matrix();
    }
    const Eigen::Vector2d log_prior = (count / count.sum()).array().log().matrix();
    return std::make_shared<NaiveBayesModel>(mean, var, log_prior);
  }

  ClassifierKind kind() const override { return ClassifierKind::NaiveBayes; }
  Eigen::Index dimension() const override { return mean_.cols(); }
  bool probabilistic() const override { return true; }
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    Eigen::Vector2d ll;
    for (int c = 0; c < 2; ++c) {
      const auto diff2 = (row - mean_.row(c)).array().square();
      ll(c) = log_prior_(c) -
              0.5 * (diff2 / var_.row(c).array() + (2.0 * M_PI * var_.row(c).array()).log()).sum();
    }
    return sigmoid(ll(1) - ll(0));
  }
  json to_json() const override {
    return {{"mean", mat_json(mean_)}, {"var", mat_json(var_)}, {"log_prior", vec_json(log_prior_)}};
  }

 private:
  Eigen::MatrixXd mean_;
  Eigen::MatrixXd var_;
  Eigen::Vector2d log_prior_;
};

class ForestModel final : public ModelImpl {
 public:
  ForestModel(std::vector<DecisionTree> trees, Eigen::Index dim)
      : trees_(std::move(trees)), dim_(dim) {}

  ClassifierKind kind() const override { return ClassifierKind::RandomForest; }
  Eigen::Index dimension() const override { return dim_; }
  bool probabilistic() const override { return true; }
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict_score(row);
    return s / static_cast<double>(trees_.size());
  }
  json to_json() const override {
    json trees = json::array();
    for (const auto& t : trees_) {
      json nodes = json::array();
      for (const auto& n : t.nodes()) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
      }
      trees.push_back(std::move(nodes));
    }
    return {{"trees", std::move(trees)}};
  }

 private:
  std::vector<DecisionTree> trees_;
  Eigen::Index dim_;
};

double rbf(const Eigen::Ref<const Eigen::RowVectorXd>& a,
           const Eigen::Ref<const Eigen::RowVectorXd>& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

class RbfSvmModel final : public ModelImpl {
 public:
  RbfSvmModel(Eigen::MatrixXd sv, Eigen::VectorXd coef, double gamma)
      : sv_(std::move(sv)), coef_(std::move(coef)), gamma_(gamma) {}

  /// Kernelized Pegasos: iterations pick a random row; a margin violation
  /// increments that row's dual count.
  static std::shared_ptr<RbfSvmModel> fit(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                                          const TrainConfig& cfg) {
    const auto n = x.rows();
    const double gamma = cfg.rbf_gamma > 0 ? cfg.rbf_gamma : 1.0 / static_cast<double>(x.cols());
    const Eigen::VectorXd ys = to_pm1(y);
    const double lambda = cfg.regularization;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);  // sum_j alpha_j y_j K(j, i)
    Rng rng(cfg.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    const long long iterations = static_cast<long long>(cfg.rbf_epochs) * n;
    for (long long t = 1; t <= iterations; ++t) {
      const auto i = pick(rng);
      if (ys(i) * g(i) / (lambda * static_cast<double>(t)) < 1.0) {
        alpha(i) += 1.0;
        for (Eigen::Index j = 0; j < n; ++j) g(j) += ys(i) * rbf(x.row(i), x.row(j), gamma);
      }
    }
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (alpha(i) > 0) support.push_back(i);
    }
    Eigen::MatrixXd sv(static_cast<Eigen::Index>(support.size()), x.cols());
    Eigen::VectorXd coef(static_cast<Eigen::Index>(support.size()));
    const double scale = 1.0 / (lambda * static_cast<double>(iterations));
    for (std::size_t s = 0; s < support.size(); ++s) {
      const auto i = support[s];
      sv.row(static_cast<Eigen::Index>(s)) = x.row(i);
      coef(static_cast<Eigen::Index>(s)) = alpha(i) * ys(i) * scale;
    }
    return std::make_shared<RbfSvmModel>(std::move(sv), std::move(coef), gamma);
  }

  ClassifierKind kind() const override { return ClassifierKind::RbfSvm; }
  Eigen::Index dimension() const override { return dim_ > 0 ? dim_ : sv_.cols(); }
  bool probabilistic() const override { return false; }
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    double s = 0.0;
    for (Eigen::Index i = 0; i < sv_.rows(); ++i) s += coef_(i) * rbf(sv_.row(i), row, gamma_);
    return s;
  }
  json to_json() const override {
    return {{"gamma", gamma_}, {"coef", vec_json(coef_)}, {"support", mat_json(sv_)}};
  }
  void set_dimension(Eigen::Index d) { dim_ = d; }

 private:
  Eigen::MatrixXd sv_;
  Eigen::VectorXd coef_;
  double gamma_;
  Eigen::Index dim_ = 0;
};

class EnsembleModel final : public ModelImpl {
 public:
  explicit EnsembleModel(std::vector<TrainedModel> members) : members_(std::move(members)) {}

  ClassifierKind kind() const override { return ClassifierKind::Ensemble; }
  Eigen::Index dimension() const override { return members_.front().dimension(); }
  bool probabilistic() const override { return true; }
  /// Fraction of members voting Positive; a tie is not a majority.
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    std::size_t pos = 0;
    for (const auto& m : members_) {
      const auto& impl = m.impl();
      pos += impl.label_for(impl.score(row)) == Label::Positive;
    }
    return static_cast<double>(pos) / static_cast<double>(members_.size());
  }
  json to_json() const override {
    json members = json::array();
    for (const auto& m : members_) {
      std::ostringstream ss;
      m.save(ss);
      members.push_back(json::parse(ss.str()));
    }
    return {{"members", std::move(members)}};
  }

 private:
  std::vector<TrainedModel> members_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

DecisionTree DecisionTree::fit(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                               const TreeOptions& opts) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return fit(x, y, rows, opts);
}

DecisionTree DecisionTree::fit(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                               const std::vector<Eigen::Index>& rows, const TreeOptions& opts) {
  if (rows.empty()) throw Error("decision tree needs at least one row");
  const auto m = static_cast<int>(x.cols());
  const int mtry = opts.max_features > 0 ? std::min(opts.max_features, m) : m;
  Rng rng(opts.seed);

  DecisionTree tree;
  struct Work {
    int node;
    int depth;
    std::vector<Eigen::Index> rows;
  };
  std::vector<Work> stack;
  tree.nodes_.push_back({});
  stack.push_back({0, 0, rows});

  std::vector<int> features(static_cast<std::size_t>(m));
  std::iota(features.begin(), features.end(), 0);
  std::vector<std::pair<double, int>> sorted;

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const auto n = w.rows.size();
    std::size_t pos = 0;
    for (const auto r : w.rows) pos += y[static_cast<std::size_t>(r)] == Label::Positive;
    tree.nodes_[static_cast<std::size_t>(w.node)].value =
        static_cast<double>(pos) / static_cast<double>(n);

    const bool pure = pos == 0 || pos == n;
    if (pure || n < static_cast<std::size_t>(opts.min_samples_split) ||
        (opts.max_depth > 0 && w.depth >= opts.max_depth)) {
      continue;
    }

    // candidate features: partial Fisher-Yates, then ascending for tie-breaks
    for (int i = 0; i < mtry; ++i) {
      std::uniform_int_distribution<int> pick(i, m - 1);
      std::swap(features[static_cast<std::size_t>(i)],
                features[static_cast<std::size_t>(mtry < m ? pick(rng) : i)]);
    }
    std::vector<int> candidates(features.begin(), features.begin() + mtry);
    std::sort(candidates.begin(), candidates.end());

    double best_impurity = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    const double total_pos = static_cast<double>(pos);
    const double total = static_cast<double>(n);
    for (const int f : candidates) {
      sorted.clear();
      for (const auto r : w.rows) {
        sorted.emplace_back(x(r, f), to_int(y[static_cast<std::size_t>(r)]));
      }
      std::sort(sorted.begin(), sorted.end());
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += sorted[i].second;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = total - nl;
        const double pl = left_pos / nl;
        const double pr = (total_pos - left_pos) / nr;
        const double impurity = nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = f;
          best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;  // every candidate feature is constant here

    std::vector<Eigen::Index> left, right;
    for (const auto r : w.rows) (x(r, best_feature) <= best_threshold ? left : right).push_back(r);
    const int li = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    tree.nodes_.push_back({});
    auto& node = tree.nodes_[static_cast<std::size_t>(w.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = li;
    node.right = li + 1;
    stack.push_back({li + 1, w.depth + 1, std::move(right)});
    stack.push_back({li, w.depth + 1, std::move(left)});
  }
  return tree;
}

double DecisionTree::predict_score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(row(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

DecisionTree DecisionTree::from_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) throw InputError("decision tree has no nodes");
  for (const auto& n : nodes) {
    if (n.feature >= 0 && (n.left < 0 || n.right < 0 ||
                           static_cast<std::size_t>(std::max(n.left, n.right)) >= nodes.size())) {
      throw InputError("decision tree has a dangling child index");
    }
  }
  DecisionTree t;
  t.nodes_ = std::move(nodes);
  return t;
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                     const Eigen::VectorXd& w, double b, double lambda) {
  const Eigen::VectorXd z = (x * w).array() + b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    loss += softplus(z(i)) - y01(i) * z(i);
  }
  return loss / static_cast<double>(z.size()) + 0.5 * lambda * w.squaredNorm();
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                                  const Eigen::VectorXd& w, double b, double lambda) {
  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r(i) = sigmoid(z(i)) - y01(i);
  const double n = static_cast<double>(z.size());
  Eigen::VectorXd g(w.size() + 1);
  g.head(w.size()) = x.transpose() * r / n + lambda * w;
  g(w.size()) = r.sum() / n;
  return g;
}

double hinge_loss(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                  const LinearWeights& lw) {
  const Eigen::VectorXd margin = to_pm1(y).array() * ((x * lw.weights).array() + lw.intercept);
  return (1.0 - margin.array()).max(0.0).mean();
}

// ---------------------------------------------------------------------------
// TrainedModel
// ---------------------------------------------------------------------------

TrainedModel::TrainedModel(std::shared_ptr<const detail::ModelImpl> impl)
    : impl_(std::move(impl)) {}

ClassifierKind TrainedModel::kind() const { return impl_->kind(); }
Eigen::Index TrainedModel::dimension() const { return impl_->dimension(); }
std::optional<LinearWeights> TrainedModel::linear_weights() const {
  return impl_->linear_weights();
}
bool TrainedModel::probabilistic() const { return impl_->probabilistic(); }

std::vector<Prediction> TrainedModel::predict(const Eigen::MatrixXd& x) const {
  if (!impl_) throw Error("model is not fitted");
  if (x.cols() != dimension()) {
    throw Error(fmt::format("model expects {} features, got {}", dimension(), x.cols()));
  }
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double s = impl_->score(x.row(i));
    out.push_back({impl_->label_for(s), s});
  }
  return out;
}

std::vector<Label> TrainedModel::predict_labels(const Eigen::MatrixXd& x) const {
  std::vector<Label> out;
  for (const auto& p : predict(x)) out.push_back(p.label);
  return out;
}

void TrainedModel::save(std::ostream& out) const {
  json doc;
  doc["format"] = "netevo-model";
  doc["version"] = 1;
  doc["kind"] = to_string(kind());
  doc["dimension"] = dimension();
  doc["parameters"] = impl_->to_json();
  out << doc.dump() << '\n';
}

namespace {

TrainedModel model_from_json(const json& doc) {
  if (doc.value("format", "") != "netevo-model") throw InputError("not a netevo model file");
  if (doc.value("version", 0) != 1) throw InputError("unsupported model file version");
  const auto kind = parse_classifier(doc.at("kind").get<std::string>());
  const auto dim = doc.at("dimension").get<Eigen::Index>();
  const auto& p = doc.at("parameters");
  switch (kind) {
    case ClassifierKind::LogisticRegression:
    case ClassifierKind::LinearSvm: {
      LinearWeights lw{vec_from(p.at("weights")), p.at("intercept").get<double>()};
      if (lw.weights.size() != dim) throw InputError("model file: weight length mismatch");
      return TrainedModel(std::make_shared<LinearModel>(kind, std::move(lw)));
    }
    case ClassifierKind::Knn:
      return TrainedModel(std::make_shared<KnnModel>(mat_from(p.at("x"), dim),
                                                     labels_from(p.at("y")), p.at("k").get<int>()));
    case ClassifierKind::NaiveBayes: {
      const Eigen::VectorXd lp = vec_from(p.at("log_prior"));
      return TrainedModel(std::make_shared<NaiveBayesModel>(
          mat_from(p.at("mean"), dim), mat_from(p.at("var"), dim), Eigen::Vector2d(lp(0), lp(1))));
    }
    case ClassifierKind::RandomForest: {
      std::vector<DecisionTree> trees;
      for (const auto& t : p.at("trees")) {
        std::vector<DecisionTree::Node> nodes;
        for (const auto& n : t) {
          nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                           n.at(3).get<int>(), n.at(4).get<double>()});
        }
        trees.push_back(DecisionTree::from_nodes(std::move(nodes)));
      }
      return TrainedModel(std::make_shared<ForestModel>(std::move(trees), dim));
    }
    case ClassifierKind::RbfSvm: {
      auto m = std::make_shared<RbfSvmModel>(mat_from(p.at("support"), dim),
                                             vec_from(p.at("coef")), p.at("gamma").get<double>());
      m->set_dimension(dim);
      return TrainedModel(std::move(m));
    }
    case ClassifierKind::Ensemble: {
      std::vector<TrainedModel> members;
      for (const auto& m : p.at("members")) members.push_back(model_from_json(m));
      if (members.empty()) throw InputError("model file: empty ensemble");
      return TrainedModel(std::make_shared<EnsembleModel>(std::move(members)));
    }
  }
  throw InputError("model file: unknown kind");
}

}  // namespace

TrainedModel TrainedModel::load(std::istream& in) {
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

TrainedModel fit(ClassifierKind kind, const Eigen::MatrixXd& x, const std::vector<Label>& y,
                 const TrainConfig& cfg) {
  cfg.validate();
  check_training_data(kind, x, y);
  switch (kind) {
    case ClassifierKind::LogisticRegression:
      return TrainedModel(std::make_shared<LinearModel>(kind, fit_logistic(x, y, cfg)));
    case ClassifierKind::LinearSvm:
      return TrainedModel(std::make_shared<LinearModel>(kind, fit_linear_svm(x, y, cfg)));
    case ClassifierKind::Knn:
      return TrainedModel(std::make_shared<KnnModel>(x, y, cfg.k_neighbors));
    case ClassifierKind::NaiveBayes:
      return TrainedModel(NaiveBayesModel::fit(x, y));
    case ClassifierKind::RandomForest: {
      const int m = static_cast<int>(x.cols());
      TreeOptions topts;
      topts.max_depth = cfg.max_depth;
      topts.max_features =
          cfg.max_features > 0 ? cfg.max_features
                               : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));
      topts.min_samples_split = cfg.min_samples_split;
      Rng rng(cfg.seed);
      std::uniform_int_distribution<Eigen::Index> pick(0, x.rows() - 1);
      std::vector<DecisionTree> trees;
      for (int t = 0; t < cfg.tree_count; ++t) {
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
        if (cfg.bootstrap) {
          for (auto& r : rows) r = pick(rng);
        } else {
          std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        }
        topts.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        trees.push_back(DecisionTree::fit(x, y, rows, topts));
      }
      return TrainedModel(std::make_shared<ForestModel>(std::move(trees), x.cols()));
    }
    case ClassifierKind::RbfSvm: {
      auto m = RbfSvmModel::fit(x, y, cfg);
      m->set_dimension(x.cols());
      return TrainedModel(std::move(m));
    }
    case ClassifierKind::Ensemble: {
      std::vector<TrainedModel> members;
      for (const auto base : kBaseClassifiers) members.push_back(fit(base, x, y, cfg));
      return TrainedModel(std::make_shared<EnsembleModel>(std::move(members)));
    }
  }
  throw Error("unknown classifier kind");
}

}  // namespace netevo::models
