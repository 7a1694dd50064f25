#include "netevo/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netevo/csv.hpp"

namespace netevo {

std::string to_string(ContactKind k) { return k == ContactKind::Call ? "call" : "text"; }

SemesterCalendar::SemesterCalendar(std::vector<Semester> semesters)
    : semesters_(std::move(semesters)) {
  for (std::size_t i = 0; i < semesters_.size(); ++i) {
    const auto& s = semesters_[i];
    if (!s.start.ok() || !s.end.ok() || s.end < s.start) {
      throw InputError(fmt::format("semester {} has an invalid date range", s.index));
    }
    if (i > 0) {
      const auto& prev = semesters_[i - 1];
      if (s.index <= prev.index) throw InputError("semester indices must strictly increase");
      if (s.start <= prev.end) {
        throw InputError(fmt::format("semesters {} and {} overlap", prev.index, s.index));
      }
    }
  }
}

SemesterCalendar SemesterCalendar::netsense() { return academic(2011, 4); }

SemesterCalendar SemesterCalendar::academic(int first_year, int count) {
  using namespace std::chrono;
  std::vector<Semester> out;
  int year = first_year;
  for (int i = 0; i < count; ++i) {
    const bool fall = i % 2 == 0;
    Semester s;
    s.index = i + 1;
    if (fall) {
      s.label = fmt::format("Fall {}", year);
      s.start = year_month_day{std::chrono::year{year}, August, day{1}};
      s.end = year_month_day{std::chrono::year{year}, December, day{31}};
      ++year;
    } else {
      s.label = fmt::format("Spring {}", year);
      s.start = year_month_day{std::chrono::year{year}, January, day{1}};
      s.end = year_month_day{std::chrono::year{year}, May, day{31}};
    }
    out.push_back(std::move(s));
  }
  return SemesterCalendar(std::move(out));
}

const Semester& SemesterCalendar::at_index(int index) const {
  for (const auto& s : semesters_) {
    if (s.index == index) return s;
  }
  throw InputError(fmt::format("semester {} is not in the calendar", index));
}

std::optional<int> SemesterCalendar::semester_of(Timestamp ts) const {
  for (const auto& s : semesters_) {
    if (s.contains(ts)) return s.index;
  }
  return std::nullopt;
}

std::string calendar_to_json(const SemesterCalendar& cal) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : cal.semesters()) {
    nlohmann::ordered_json e;
    e["index"] = s.index;
    e["label"] = s.label;
    e["start"] = format_date(s.start);
    e["end"] = format_date(s.end);
    arr.push_back(std::move(e));
  }
  nlohmann::ordered_json doc;
  doc["semesters"] = std::move(arr);
  return doc.dump(2) + "\n";
}

SemesterCalendar parse_calendar(const std::string& json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    std::vector<Semester> out;
    for (const auto& e : doc.at("semesters")) {
      out.push_back(Semester{e.at("index").get<int>(), e.value("label", std::string()),
                             parse_date(e.at("start").get<std::string>()),
                             parse_date(e.at("end").get<std::string>())});
    }
    return SemesterCalendar(std::move(out));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed calendar: ") + e.what());
  }
}

SemesterCalendar load_calendar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open calendar '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_calendar(ss.str());
}

namespace {

template <typename T, typename RowFn>
ParseResult<T> parse_rows(const std::filesystem::path& path,
                          const std::vector<std::string>& header, const ParseOptions& opts,
                          RowFn&& parse_row) {
  ParseResult<T> out;
  csv::LineReader reader(path);
  reader.expect_header(header, opts.strict);
  std::string line;
  while (reader.next(line)) {
    try {
      const auto fields = csv::split(line);
      if (fields.size() < header.size() || (opts.strict && fields.size() != header.size())) {
        throw InputError(fmt::format("expected {} fields, got {}", header.size(), fields.size()));
      }
      out.records.push_back(parse_row(fields));
    } catch (const InputError& e) {
      if (opts.strict) {
        throw InputError(fmt::format("{}:{}: {}", path.string(), reader.line_number(), e.what()));
      }
      out.errors.push_back(RowError{reader.line_number(), e.what()});
    }
  }
  return out;
}

}  // namespace

ParseResult<ContactRecord> parse_contact_log(const std::filesystem::path& path,
                                             const ParseOptions& opts) {
  return parse_rows<ContactRecord>(
      path, {"timestamp", "sender", "receiver", "kind", "magnitude"}, opts,
      [](const std::vector<std::string>& f) {
        ContactRecord r;
        r.timestamp = parse_timestamp(f[0]);
        r.sender = NodeId{csv::parse_uint(f[1], "sender")};
        r.receiver = NodeId{csv::parse_uint(f[2], "receiver")};
        if (r.sender == r.receiver) throw InputError("sender equals receiver");
        if (f[3] == "call") {
          r.kind = ContactKind::Call;
        } else if (f[3] == "text") {
          r.kind = ContactKind::Text;
        } else {
          throw InputError("kind must be 'call' or 'text', got '" + f[3] + "'");
        }
        r.magnitude = csv::parse_double(f[4], "magnitude");
        if (r.magnitude < 0) throw InputError("magnitude must be non-negative");
        return r;
      });
}

void write_contact_log(const std::filesystem::path& path,
                       const std::vector<ContactRecord>& records) {
  auto out = csv::open_output(path);
  out << "timestamp,sender,receiver,kind,magnitude\n";
  for (const auto& r : records) {
    out << format_timestamp(r.timestamp) << ',' << r.sender.value << ',' << r.receiver.value
        << ',' << to_string(r.kind) << ',' << csv::format_double(r.magnitude) << '\n';
  }
}

ParseResult<Nomination> parse_nominations(const std::filesystem::path& path,
                                          const ParseOptions& opts) {
  return parse_rows<Nomination>(path, {"semester", "nominator", "nominee"}, opts,
                                [](const std::vector<std::string>& f) {
                                  Nomination n;
                                  n.semester = static_cast<int>(csv::parse_int(f[0], "semester"));
                                  n.nominator = NodeId{csv::parse_uint(f[1], "nominator")};
                                  n.nominee = NodeId{csv::parse_uint(f[2], "nominee")};
                                  if (n.nominator == n.nominee) {
                                    throw InputError("nominator equals nominee");
                                  }
                                  return n;
                                });
}

void write_nominations(const std::filesystem::path& path, const std::vector<Nomination>& noms) {
  auto out = csv::open_output(path);
  out << "semester,nominator,nominee\n";
  for (const auto& n : noms) {
    out << n.semester << ',' << n.nominator.value << ',' << n.nominee.value << '\n';
  }
}

std::vector<Snapshot> build_activity_network(const std::vector<ContactRecord>& records,
                                             const SemesterCalendar& cal,
                                             const ActivityOptions& opts,
                                             const Rosters* rosters,
                                             NetworkBuildReport* report) {
  if (opts.threshold < 1) throw InputError("activity threshold must be >= 1");
  NetworkBuildReport local;
  std::map<int, std::map<EdgePair, EdgeWeight>> counts;
  std::map<int, std::set<NodeId>> active;
  for (const auto& r : records) {
    const auto sem = cal.semester_of(r.timestamp);
    if (!sem) {
      ++local.unassigned_records;
      continue;
    }
    if (rosters) {
      const auto it = rosters->find(*sem);
      if (it == rosters->end() || !it->second.contains(r.sender) ||
          !it->second.contains(r.receiver)) {
        ++local.dropped_records;
        continue;
      }
    }
    auto& w = counts[*sem][make_pair_canonical(r.sender, r.receiver)];
    (r.kind == ContactKind::Call ? w.call_count : w.text_count) += 1;
    active[*sem].insert(r.sender);
    active[*sem].insert(r.receiver);
  }

  std::vector<Snapshot> out;
  for (const auto& s : cal.semesters()) {
    SnapshotBuilder b(s);
    for (const auto& [pair, w] : counts[s.index]) {
      if (w.total() >= opts.threshold) b.add_edge(pair.lo, pair.hi, w);
    }
    for (const auto n : active[s.index]) b.add_node(n);
    if (rosters && opts.include_isolates) {
      if (const auto it = rosters->find(s.index); it != rosters->end()) {
        for (const auto n : it->second) b.add_node(n);
      }
    }
    out.push_back(b.build());
  }
  if (report) *report = local;
  return out;
}

std::vector<Snapshot> build_friendship_network(const std::vector<Nomination>& noms,
                                               const SemesterCalendar& cal,
                                               const Rosters& participants,
                                               const FriendshipOptions& opts,
                                               NetworkBuildReport* report) {
  NetworkBuildReport local;
  // semester -> directed nominations among participants
  std::map<int, std::set<std::pair<NodeId, NodeId>>> directed;
  std::map<int, std::set<NodeId>> active;
  for (const auto& n : noms) {
    const auto it = participants.find(n.semester);
    if (it == participants.end() || !it->second.contains(n.nominator) ||
        !it->second.contains(n.nominee)) {
      ++local.dropped_nominations;
      continue;
    }
    directed[n.semester].insert({n.nominator, n.nominee});
    active[n.semester].insert(n.nominator);
    active[n.semester].insert(n.nominee);
  }

  std::vector<Snapshot> out;
  for (const auto& s : cal.semesters()) {
    SnapshotBuilder b(s);
    const auto& d = directed[s.index];
    for (const auto& [from, to] : d) {
      if (opts.rule == FriendshipRule::Mutual && !d.contains({to, from})) continue;
      b.add_edge(from, to, {});  // a mutual pair inserts zero weight twice
    }
    for (const auto n : active[s.index]) b.add_node(n);
    if (opts.include_isolates) {
      if (const auto it = participants.find(s.index); it != participants.end()) {
        for (const auto n : it->second) b.add_node(n);
      }
    }
    out.push_back(b.build());
  }
  if (report) *report = local;
  return out;
}

std::vector<Snapshot> build_friendship_network(const std::vector<Nomination>& noms,
                                               const SemesterCalendar& cal,
                                               const std::set<NodeId>& participants,
                                               const FriendshipOptions& opts,
                                               NetworkBuildReport* report) {
  Rosters rosters;
  for (const auto& s : cal.semesters()) rosters[s.index] = participants;
  auto o = opts;
  // a global participant list says nothing about who was surveyed each term
  o.include_isolates = false;
  return build_friendship_network(noms, cal, rosters, o, report);
}

std::map<EdgePair, EdgeWeight> contact_counts(const std::vector<ContactRecord>& records,
                                              const Semester& semester) {
  std::map<EdgePair, EdgeWeight> out;
  for (const auto& r : records) {
    if (!semester.contains(r.timestamp)) continue;
    auto& w = out[make_pair_canonical(r.sender, r.receiver)];
    (r.kind == ContactKind::Call ? w.call_count : w.text_count) += 1;
  }
  return out;
}

std::vector<Snapshot> attach_contact_counts(const std::vector<Snapshot>& snaps,
                                            const std::vector<ContactRecord>& records) {
  std::vector<Snapshot> out;
  for (const auto& s : snaps) {
    const auto counts = contact_counts(records, s.semester());
    SnapshotBuilder b(s.semester());
    for (const auto n : s.nodes()) b.add_node(n);
    for (const auto& [e, w] : s.edges()) {
      const auto it = counts.find(e);
      b.add_edge(e.lo, e.hi, it == counts.end() ? EdgeWeight{} : it->second);
    }
    out.push_back(b.build());
  }
  return out;
}

}  // namespace netevo
