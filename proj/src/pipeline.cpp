#include "netevo/pipeline.hpp"

#include <map>

#include <fmt/format.h>

#include "netevo/spectral.hpp"

namespace netevo {

std::string to_string(Network n) { return n == Network::Activity ? "activity" : "friendship"; }

Network parse_network(const std::string& name) {
  if (name == "activity") return Network::Activity;
  if (name == "friendship") return Network::Friendship;
  throw InputError("unknown network '" + name + "' (expected activity or friendship)");
}

std::vector<models::ClassifierKind> all_classifiers() {
  std::vector<models::ClassifierKind> out(std::begin(models::kBaseClassifiers),
                                          std::end(models::kBaseClassifiers));
  out.push_back(models::ClassifierKind::Ensemble);
  return out;
}

std::string feature_setting(std::optional<Eigen::Index> k) {
  return k ? fmt::format("top_{}", *k) : "no_svd";
}

TaskResult run_task(const LabeledDataset& ds, const PipelineOptions& opts,
                    const std::vector<std::string>& labels) {
  const auto classifiers = opts.classifiers.empty() ? all_classifiers() : opts.classifiers;
  const auto sp = split(ds, opts.train_fraction, opts.seed);
  const Eigen::MatrixXd xtr = sp.train.matrix();
  const Eigen::MatrixXd xte = sp.test.matrix();
  const auto ytr = sp.train.labels();
  const auto yte = sp.test.labels();

  TaskResult out;
  out.positives = ds.count(Label::Positive);
  out.negatives = ds.count(Label::Negative);
  out.train_size = sp.train.size();
  out.test_size = sp.test.size();

  spectral::SvdFactors<double> factors;
  const auto max_k = opts.ks.empty() ? Eigen::Index{0}
                                     : *std::max_element(opts.ks.begin(), opts.ks.end());
  spectral::Standardizer<double> standardizer;
  if (max_k > 0) {
    const auto map = spectral::EigenfeatureMap<double>::fit(xtr, max_k, &factors);
    standardizer = map.standardizer;
  }
  auto projected = [&](Eigen::Index k, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    return standardizer.apply(x) * factors.V.leftCols(k);
  };

  std::vector<std::optional<Eigen::Index>> settings;
  if (opts.include_no_svd) settings.emplace_back(std::nullopt);
  for (const auto k : opts.ks) settings.emplace_back(k);

  std::map<std::pair<models::ClassifierKind, Eigen::Index>, models::TrainedModel> fitted;
  for (const auto kind : classifiers) {
    for (const auto& k : settings) {
      const auto xa = k ? projected(*k, xtr) : xtr;
      const auto xb = k ? projected(*k, xte) : xte;
      auto model = models::fit(kind, xa, ytr, opts.train);
      out.rows.push_back({models::display_name(kind), feature_setting(k),
                          metrics(model.predict(xb), yte)});
      if (k) fitted.emplace(std::make_pair(kind, *k), std::move(model));
    }
  }

  if (max_k > 0) {
    auto weights_at = [&](Eigen::Index k) {
      auto it = fitted.find({opts.ranking_classifier, k});
      if (it == fitted.end()) {
        it = fitted.emplace(std::make_pair(opts.ranking_classifier, k),
                            models::fit(opts.ranking_classifier, projected(k, xtr), ytr, opts.train))
                 .first;
      }
      const auto lw = it->second.linear_weights();
      if (!lw) {
        throw InputError("ranking classifier '" + models::to_string(opts.ranking_classifier) +
                         "' has no linear weights");
      }
      return lw->weights;
    };
    RankingReport r;
    r.feature_names = ds.feature_names;
    r.feature_labels = labels.empty() ? ds.feature_names : labels;
    r.k = max_k;
    r.classifier = models::display_name(opts.ranking_classifier);
    r.ranking = spectral::rank_features(factors, weights_at(max_k), max_k);
    for (const auto k : opts.ks) {
      if (k == max_k) continue;
      const auto other = spectral::rank_features(factors, weights_at(k), k);
      r.stability.emplace_back(k, spectral::spearman(r.ranking.scores, other.scores));
    }
    out.ranking = std::move(r);
  }
  return out;
}

TaskResult run_task(const std::vector<Snapshot>& snaps, const ProfileTable& profiles,
                    const AttributeSchema& schema, const PipelineOptions& opts) {
  const auto ds = pooled_examples(opts.task, snaps, profiles, schema,
                                  opts.task == Task::Formation ? opts.max_hops : std::nullopt,
                                  opts.agreement);
  return run_task(ds, opts, feature_labels(schema));
}

}  // namespace netevo
