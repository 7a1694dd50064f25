#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netevo/core.hpp"

namespace netevo::models {

enum class ClassifierKind : std::uint8_t {
  LogisticRegression,
  LinearSvm,
  Knn,
  NaiveBayes,
  RandomForest,
  RbfSvm,
  Ensemble,
};

/// Short identifiers used on the command line and in reports:
/// logreg, svm, knn, naive_bayes, random_forest, svm_rbf, ensemble.
std::string to_string(ClassifierKind k);
ClassifierKind parse_classifier(const std::string& name);
/// Human-readable row names matching the result tables.
std::string display_name(ClassifierKind k);

/// The six base models in table order; the ensemble votes over these.
inline constexpr ClassifierKind kBaseClassifiers[] = {
    ClassifierKind::LinearSvm,    ClassifierKind::LogisticRegression, ClassifierKind::Knn,
    ClassifierKind::RandomForest, ClassifierKind::NaiveBayes,         ClassifierKind::RbfSvm,
};

struct TrainConfig {
  double learning_rate = 0.1;  // decays as lr / sqrt(t)
  int epochs = 500;
  double regularization = 1e-3;  // L2 strength (lambda)
  double gradient_tolerance = 1e-6;
  int k_neighbors = 5;
  int tree_count = 100;
  int max_depth = 10;            // 0 = unlimited
  int max_features = 0;          // per-split candidates; 0 = floor(sqrt(m))
  int min_samples_split = 2;
  bool bootstrap = true;
  double rbf_gamma = 0.0;        // 0 = 1/m
  int rbf_epochs = 10;           // Pegasos iterations = rbf_epochs * n
  std::uint64_t seed = 42;

  /// Throws InputError on non-positive rates or counts.
  void validate() const;
};

/// Fitted linear decision function w.x + b.
struct LinearWeights {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

struct Prediction {
  Label label = Label::Negative;
  double score = 0.0;  // probability for probabilistic models, margin otherwise
};

namespace detail {
class ModelImpl;
}

/// A fitted classifier. Copies share the immutable fitted state.
class TrainedModel {
 public:
  TrainedModel() = default;
  explicit TrainedModel(std::shared_ptr<const detail::ModelImpl> impl);

  ClassifierKind kind() const;
  Eigen::Index dimension() const;
  /// Present for logistic regression and linear SVM.
  std::optional<LinearWeights> linear_weights() const;
  /// True when `score` is a probability in [0, 1] (label = score > 0.5).
  bool probabilistic() const;

  std::vector<Prediction> predict(const Eigen::MatrixXd& x) const;
  std::vector<Label> predict_labels(const Eigen::MatrixXd& x) const;

  /// Versioned JSON document sufficient to reload and predict identically.
  void save(std::ostream& out) const;
  static TrainedModel load(std::istream& in);

  const detail::ModelImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const detail::ModelImpl> impl_;
};

/// Fits `kind` on rows of `x` with labels `y`. Both classes must be present
/// except for k-NN. Deterministic for a fixed cfg.seed.
TrainedModel fit(ClassifierKind kind, const Eigen::MatrixXd& x, const std::vector<Label>& y,
                 const TrainConfig& cfg = {});

// ---------------------------------------------------------------------------
// Exposed pieces used by tests and the ranking step.
// ---------------------------------------------------------------------------

/// Mean log-loss plus (lambda/2)|w|^2 (the intercept is not penalized).
double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                     const Eigen::VectorXd& w, double b, double lambda);

/// Analytic gradient of logistic_loss; returns [dw..., db].
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                                  const Eigen::VectorXd& w, double b, double lambda);

/// Mean hinge loss (labels mapped to -1/+1), without the regularizer.
double hinge_loss(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                  const LinearWeights& lw);

struct TreeOptions {
  int max_depth = 0;  // 0 = unlimited
  int max_features = 0;  // 0 = all features
  int min_samples_split = 2;
  std::uint64_t seed = 0;
};

/// CART classification tree (Gini impurity); leaf score = positive fraction.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  static DecisionTree fit(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                          const std::vector<Eigen::Index>& rows, const TreeOptions& opts);
  static DecisionTree fit(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                          const TreeOptions& opts);

  double predict_score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  static DecisionTree from_nodes(std::vector<Node> nodes);

 private:
  std::vector<Node> nodes_;
};

Eigen::VectorXd to_01(const std::vector<Label>& y);

}  // namespace netevo::models
