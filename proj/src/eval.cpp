#include "netevo/eval.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "netevo/csv.hpp"
#include "netevo/dataset.hpp"

namespace netevo {

Metrics metrics(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  if (predicted.empty()) throw InputError("metrics need at least one prediction");
  if (predicted.size() != truth.size()) {
    throw InputError(fmt::format("{} predictions but {} labels", predicted.size(), truth.size()));
  }
  Metrics m;
  auto& c = m.counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == Label::Positive;
    const bool t = truth[i] == Label::Positive;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.recall_undefined = c.tp + c.fn == 0;
  m.recall = m.recall_undefined ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return m;
}

Metrics metrics(const std::vector<models::Prediction>& predicted,
                const std::vector<Label>& truth) {
  std::vector<Label> labels;
  labels.reserve(predicted.size());
  for (const auto& p : predicted) labels.push_back(p.label);
  return metrics(labels, truth);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(s.n);
  s.mean = mean;
  if (s.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    s.se = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

const ClassCell& ClassStats::at(int semester, EdgeClass cls) const {
  for (const auto& c : cells) {
    if (c.semester == semester && c.cls == cls) return c;
  }
  throw Error(fmt::format("no statistics for semester {} class {}", semester, to_string(cls)));
}

ClassStats edge_class_stats(const std::vector<Snapshot>& snaps, const ProfileTable& profiles,
                            const AttributeSchema& schema, const AgreementOptions& opts) {
  if (snaps.size() < 2) throw InputError("edge class statistics need at least two snapshots");
  ClassStats out;
  out.total_mode = opts.total;
  for (const auto& a : schema.attributes()) out.attribute_names.push_back(a.name);
  const auto m = schema.size();

  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    const auto& t = snaps[i];
    const auto& t1 = snaps[i + 1];
    const int sem = t.semester().index;
    const auto shared = shared_nodes(t, t1);
    std::vector<Profile> prof;
    prof.reserve(shared.size());
    for (const auto u : shared) prof.push_back(profile_or_missing(profiles, schema, sem, u));

    struct Cell {
      std::vector<double> total, cn;
      std::vector<std::vector<double>> attr;
    };
    std::array<Cell, 3> cells;
    for (auto& c : cells) c.attr.resize(m);
    for (std::size_t a = 0; a < shared.size(); ++a) {
      for (std::size_t b = a + 1; b < shared.size(); ++b) {
        const auto cls = classify_edge(t, t1, shared[a], shared[b]);
        const auto f = edge_features(schema, prof[a], prof[b], t, opts);
        auto& c = cells[static_cast<std::size_t>(cls)];
        c.total.push_back(f.total_agreement);
        c.cn.push_back(f.common_neighbors);
        for (std::size_t j = 0; j < m; ++j) c.attr[j].push_back(f.agreements(static_cast<Eigen::Index>(j)));
      }
    }
    for (const auto cls : kEdgeClasses) {
      const auto& c = cells[static_cast<std::size_t>(cls)];
      ClassCell cc;
      cc.semester = sem;
      cc.cls = cls;
      cc.total_agreement = summarize(c.total);
      cc.common_neighbors = summarize(c.cn);
      for (std::size_t j = 0; j < m; ++j) cc.per_attribute.push_back(summarize(c.attr[j]));
      out.cells.push_back(std::move(cc));
    }
  }
  return out;
}

const CommCell& CommStats::at(const std::string& network, int semester,
                              PersistenceClass cls) const {
  for (const auto& c : cells) {
    if (c.network == network && c.semester == semester && c.cls == cls) return c;
  }
  throw Error(fmt::format("no communication statistics for {} semester {} class {}", network,
                          semester, to_string(cls)));
}

namespace {

void add_comm_cells(const std::string& network, const std::vector<Snapshot>& snaps,
                    std::vector<CommCell>& out) {
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    const auto& t = snaps[i];
    const auto& t1 = snaps[i + 1];
    std::array<std::array<std::vector<double>, 3>, 2> v;  // class -> calls, texts, cn
    for (const auto& [e, w] : t.edges()) {
      if (!t1.has_node(e.lo) || !t1.has_node(e.hi)) continue;
      const auto cls = static_cast<std::size_t>(classify_persistence(t, t1, e.lo, e.hi));
      v[cls][0].push_back(static_cast<double>(w.call_count));
      v[cls][1].push_back(static_cast<double>(w.text_count));
      v[cls][2].push_back(static_cast<double>(common_neighbors(t, e.lo, e.hi)));
    }
    for (const auto cls : kPersistenceClasses) {
      const auto& c = v[static_cast<std::size_t>(cls)];
      out.push_back({network, t.semester().index, cls, summarize(c[0]), summarize(c[1]),
                     summarize(c[2])});
    }
  }
}

}  // namespace

CommStats comm_stats(const std::vector<Snapshot>& activity,
                     const std::vector<Snapshot>& friendship) {
  CommStats out;
  add_comm_cells("activity", activity, out.cells);
  add_comm_cells("friendship", friendship, out.cells);
  return out;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : ""; }

std::string summary_fields(const Summary& s) {
  return fmt::format("{},{},{}", s.n, opt(s.mean), opt(s.se));
}

std::ofstream table(const std::filesystem::path& dir, const std::string& name,
                    const std::string& header) {
  auto out = csv::open_output(dir / (name + ".csv"));
  out << "# netevo " << name << " v1\n" << header << '\n';
  return out;
}

void write_metrics(const std::filesystem::path& dir, const std::string& name,
                   const std::vector<MetricRow>& rows) {
  auto out = table(dir, name, "classifier,features,accuracy,recall,recall_defined,tp,fp,tn,fn");
  for (const auto& r : rows) {
    const auto& c = r.result.counts;
    out << r.classifier << ',' << r.features << ',' << csv::format_double(r.result.accuracy)
        << ',' << csv::format_double(r.result.recall) << ','
        << (r.result.recall_undefined ? 0 : 1) << ',' << c.tp << ',' << c.fp << ',' << c.tn
        << ',' << c.fn << '\n';
  }
}

void write_ranking_table(const std::filesystem::path& dir, const std::string& name,
                         const std::optional<RankingReport>& r) {
  auto out = table(dir, name, "rank,feature,label,score,abs_score,abs_rank");
  if (!r) return;
  const auto& rk = r->ranking;
  std::vector<std::size_t> abs_rank(rk.abs_order.size());
  for (std::size_t i = 0; i < rk.abs_order.size(); ++i) {
    abs_rank[static_cast<std::size_t>(rk.abs_order[i])] = i + 1;
  }
  for (std::size_t i = 0; i < rk.order.size(); ++i) {
    const auto j = static_cast<std::size_t>(rk.order[i]);
    const double s = rk.scores(static_cast<Eigen::Index>(j));
    out << i + 1 << ',' << r->feature_names[j] << ',' << r->feature_labels[j] << ','
        << csv::format_double(s) << ',' << csv::format_double(std::abs(s)) << ',' << abs_rank[j]
        << '\n';
  }
}

void write_comm_figure(const std::filesystem::path& dir, const std::string& name,
                       const std::optional<CommStats>& comm, const std::string& network,
                       Summary CommCell::*field) {
  auto out = table(dir, name, "network,semester,class,n,mean,se");
  if (!comm) return;
  for (const auto& c : comm->cells) {
    if (c.network != network) continue;
    out << c.network << ',' << c.semester << ',' << to_string(c.cls) << ','
        << summary_fields(c.*field) << '\n';
  }
}

void summary_metrics(std::ostream& out, const std::string& title,
                     const std::vector<MetricRow>& rows) {
  if (rows.empty()) return;
  out << title << "\n";
  for (const auto& r : rows) {
    out << fmt::format("  {:<24} {:<8} accuracy {:6.1f}%  recall {:6.1f}%{}\n", r.classifier,
                       r.features, 100.0 * r.result.accuracy, 100.0 * r.result.recall,
                       r.result.recall_undefined ? " (no positives)" : "");
  }
  out << "\n";
}

void summary_ranking(std::ostream& out, const std::string& title,
                     const std::optional<RankingReport>& r) {
  if (!r) return;
  out << fmt::format("{} ({} weights, top {} eigenfeatures)\n", title, r->classifier, r->k);
  const auto shown = std::min<std::size_t>(r->ranking.order.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto j = static_cast<std::size_t>(r->ranking.order[i]);
    out << fmt::format("  {:>2}. {:<36} {}\n", i + 1, r->feature_labels[j],
                       csv::format_double(r->ranking.scores(static_cast<Eigen::Index>(j))));
  }
  for (const auto& [k, rho] : r->stability) {
    out << fmt::format("  rank correlation with k={}: {:.4f}\n", k, rho);
  }
  out << "\n";
}

}  // namespace

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create report directory '" + dir.string() + "': " + ec.message());

  {
    auto out = table(dir, "tableI", "network,semester,label,nodes,edges");
    for (const auto& s : report.sizes) {
      out << s.network << ',' << s.semester << ',' << s.label << ',' << s.nodes << ',' << s.edges
          << '\n';
    }
  }
  {
    auto f1 = table(dir, "fig1", "semester,class,n,mean,se");
    auto f2 = table(dir, "fig2", "semester,class,n,mean,se");
    auto f8 = table(dir, "fig8_13", "semester,class,attribute,n,mean,se");
    if (report.class_stats) {
      const auto& cs = *report.class_stats;
      for (const auto& c : cs.cells) {
        const auto key = fmt::format("{},{}", c.semester, to_string(c.cls));
        f1 << key << ',' << summary_fields(c.total_agreement) << '\n';
        f2 << key << ',' << summary_fields(c.common_neighbors) << '\n';
        for (std::size_t j = 0; j < c.per_attribute.size(); ++j) {
          f8 << key << ',' << cs.attribute_names[j] << ',' << summary_fields(c.per_attribute[j])
             << '\n';
        }
      }
    }
  }
  write_comm_figure(dir, "fig3", report.comm, "activity", &CommCell::common_neighbors);
  write_comm_figure(dir, "fig4", report.comm, "activity", &CommCell::calls);
  write_comm_figure(dir, "fig5", report.comm, "activity", &CommCell::texts);
  write_comm_figure(dir, "fig6", report.comm, "friendship", &CommCell::calls);
  write_comm_figure(dir, "fig7", report.comm, "friendship", &CommCell::texts);
  write_metrics(dir, "tableII", report.formation);
  write_ranking_table(dir, "tableIII", report.formation_ranking);
  write_metrics(dir, "tableIV", report.persistence);
  write_ranking_table(dir, "tableV", report.persistence_ranking);

  auto out = csv::open_output(dir / "summary.txt");
  out << "netevo report\n\n";
  for (const auto& s : report.sizes) {
    out << fmt::format("{} {} ({}): {} nodes, {} edges\n", s.network, s.semester, s.label, s.nodes,
                       s.edges);
  }
  if (!report.sizes.empty()) out << "\n";
  if (report.class_stats) {
    out << fmt::format("Edge classes over all pairs of nodes present in both semesters "
                       "(total agreement: {} count)\n",
                       report.class_stats->total_mode == TotalMode::Soft ? "soft" : "hard");
    for (const auto& c : report.class_stats->cells) {
      out << fmt::format("  semester {} {:<13} n={:<7} agreement {:>8}  common neighbors {:>8}\n",
                         c.semester, to_string(c.cls), c.total_agreement.n,
                         c.total_agreement.mean ? fmt::format("{:.3f}", *c.total_agreement.mean) : "-",
                         c.common_neighbors.mean ? fmt::format("{:.3f}", *c.common_neighbors.mean) : "-");
    }
    out << "\n";
  }
  summary_metrics(out, "Link formation", report.formation);
  summary_ranking(out, "Formation feature ranking", report.formation_ranking);
  summary_metrics(out, "Link persistence", report.persistence);
  summary_ranking(out, "Persistence feature ranking", report.persistence_ranking);
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  if (!out) throw Error("failed writing report in '" + dir.string() + "'");
}

}  // namespace netevo
