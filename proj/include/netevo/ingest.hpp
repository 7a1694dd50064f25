#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netevo/core.hpp"
#include "netevo/graph.hpp"

namespace netevo {

enum class ContactKind : std::uint8_t { Call, Text };

std::string to_string(ContactKind k);

struct ContactRecord {
  Timestamp timestamp;
  NodeId sender;
  NodeId receiver;
  ContactKind kind = ContactKind::Call;
  double magnitude = 0.0;  // call seconds or text length; metadata only

  friend bool operator==(const ContactRecord&, const ContactRecord&) = default;
};

struct Nomination {
  int semester = 0;
  NodeId nominator;
  NodeId nominee;

  friend bool operator==(const Nomination&, const Nomination&) = default;
};

/// Ordered, non-overlapping semesters.
class SemesterCalendar {
 public:
  SemesterCalendar() = default;
  explicit SemesterCalendar(std::vector<Semester> semesters);

  /// Fall 2011, Spring 2012, Fall 2012, Spring 2013; no summer term.
  static SemesterCalendar netsense();
  /// `count` alternating Fall/Spring semesters starting Fall `first_year`.
  static SemesterCalendar academic(int first_year, int count);

  const std::vector<Semester>& semesters() const { return semesters_; }
  std::size_t size() const { return semesters_.size(); }
  const Semester& at_index(int index) const;
  /// Semester whose date range contains `ts`, if any.
  std::optional<int> semester_of(Timestamp ts) const;

 private:
  std::vector<Semester> semesters_;
};

std::string calendar_to_json(const SemesterCalendar& cal);
SemesterCalendar parse_calendar(const std::string& json_text);
SemesterCalendar load_calendar(const std::filesystem::path& path);

struct RowError {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> records;
  std::vector<RowError> errors;
};

struct ParseOptions {
  bool strict = false;  // any malformed row or header mismatch is fatal
};

/// CSV `timestamp,sender,receiver,kind,magnitude`, kind in {call, text}.
ParseResult<ContactRecord> parse_contact_log(const std::filesystem::path& path,
                                             const ParseOptions& opts = {});
void write_contact_log(const std::filesystem::path& path,
                       const std::vector<ContactRecord>& records);

/// CSV `semester,nominator,nominee`.
ParseResult<Nomination> parse_nominations(const std::filesystem::path& path,
                                          const ParseOptions& opts = {});
void write_nominations(const std::filesystem::path& path, const std::vector<Nomination>& noms);

/// Per-semester participant sets (usually survey rosters).
using Rosters = std::map<int, std::set<NodeId>>;

struct ActivityOptions {
  std::uint64_t threshold = 5;  // combined call + text events per semester
  bool include_isolates = true;  // add roster members without edges
};

struct NetworkBuildReport {
  std::size_t unassigned_records = 0;  // outside every semester range
  std::size_t dropped_records = 0;     // endpoint outside the semester roster
  std::size_t dropped_nominations = 0;
};

/// Activity network: an undirected edge wherever calls + texts in either
/// direction within the semester reach the threshold. When `rosters` is
/// given, contacts with a non-roster endpoint are dropped.
std::vector<Snapshot> build_activity_network(const std::vector<ContactRecord>& records,
                                             const SemesterCalendar& cal,
                                             const ActivityOptions& opts,
                                             const Rosters* rosters = nullptr,
                                             NetworkBuildReport* report = nullptr);

enum class FriendshipRule : std::uint8_t { EitherNominates, Mutual };

struct FriendshipOptions {
  FriendshipRule rule = FriendshipRule::EitherNominates;
  bool include_isolates = true;
};

/// Friendship network from name-generator nominations restricted to
/// participants; weights are zero until attach_contact_counts.
std::vector<Snapshot> build_friendship_network(const std::vector<Nomination>& noms,
                                               const SemesterCalendar& cal,
                                               const Rosters& participants,
                                               const FriendshipOptions& opts = {},
                                               NetworkBuildReport* report = nullptr);

/// Same rule with one participant set shared by every semester.
std::vector<Snapshot> build_friendship_network(const std::vector<Nomination>& noms,
                                               const SemesterCalendar& cal,
                                               const std::set<NodeId>& participants,
                                               const FriendshipOptions& opts = {},
                                               NetworkBuildReport* report = nullptr);

/// Raw (un-thresholded) per-pair call/text counts for one semester.
std::map<EdgePair, EdgeWeight> contact_counts(const std::vector<ContactRecord>& records,
                                              const Semester& semester);

/// Copies each snapshot with edge weights replaced by the pair's contact
/// counts in the same semester.
std::vector<Snapshot> attach_contact_counts(const std::vector<Snapshot>& snaps,
                                            const std::vector<ContactRecord>& records);

}  // namespace netevo
