#include "netevo/spectral.hpp"

#include <fmt/format.h>

#include "netevo/csv.hpp"

namespace netevo::spectral {

Eigen::Index FeatureRanking::rank_of(Eigen::Index j) const {
  const auto it = std::find(order.begin(), order.end(), j);
  if (it == order.end()) throw Error("feature index out of range");
  return static_cast<Eigen::Index>(it - order.begin()) + 1;
}

std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& scores) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return scores(a) > scores(b); });
  return order;
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& x) {
  const auto n = x.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(idx[static_cast<std::size_t>(j + 1)]) == x(idx[static_cast<std::size_t>(i)])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(idx[static_cast<std::size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("spearman needs two equal-length vectors");
  const Eigen::VectorXd ra = average_ranks(a).array() - average_ranks(a).mean();
  const Eigen::VectorXd rb = average_ranks(b).array() - average_ranks(b).mean();
  const double denom = std::sqrt(ra.squaredNorm() * rb.squaredNorm());
  return denom == 0.0 ? 0.0 : ra.dot(rb) / denom;
}

void write_factors(const std::filesystem::path& path, const SvdFactors<double>& f,
                   const std::vector<std::string>& feature_names) {
  auto out = csv::open_output(path);
  out << "# netevo svd factors v1\n";
  out << "component,singular_value";
  for (const auto& n : feature_names) out << ',' << n;
  out << '\n';
  for (Eigen::Index j = 0; j < f.rank_dim(); ++j) {
    out << j + 1 << ',' << csv::format_double(f.S(j));
    for (Eigen::Index i = 0; i < f.V.rows(); ++i) out << ',' << csv::format_double(f.V(i, j));
    out << '\n';
  }
}

void write_ranking(const std::filesystem::path& path, const FeatureRanking& r,
                   const std::vector<std::string>& feature_names) {
  if (static_cast<Eigen::Index>(feature_names.size()) != r.scores.size()) {
    throw Error("feature name count does not match ranking length");
  }
  auto out = csv::open_output(path);
  out << "# netevo feature ranking v1\n";
  out << "rank,feature,score,abs_score,abs_rank\n";
  std::vector<Eigen::Index> abs_rank(feature_names.size());
  for (std::size_t i = 0; i < r.abs_order.size(); ++i) {
    abs_rank[static_cast<std::size_t>(r.abs_order[i])] = static_cast<Eigen::Index>(i) + 1;
  }
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    const auto j = r.order[i];
    out << i + 1 << ',' << feature_names[static_cast<std::size_t>(j)] << ','
        << csv::format_double(r.scores(j)) << ',' << csv::format_double(std::abs(r.scores(j)))
        << ',' << abs_rank[static_cast<std::size_t>(j)] << '\n';
  }
}

}  // namespace netevo::spectral
