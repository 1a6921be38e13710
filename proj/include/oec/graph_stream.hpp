#pragma once

// Online bipartite input model: offline nodes are known up front, online
// nodes arrive one at a time revealing all their edges. Instances are
// stored as JSON lines: a header record followed by one record per arrival.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oec {

struct InstanceHeader {
  int n_offline = 0;
  int delta = 0;  // declared maximum degree

  bool operator==(const InstanceHeader&) const = default;
};

struct OnlineArrival {
  std::vector<int> neighbors;  // offline ids, processing order

  bool operator==(const OnlineArrival&) const = default;
};

struct Instance {
  InstanceHeader header;
  std::vector<OnlineArrival> arrivals;

  std::size_t edge_count() const;
  bool operator==(const Instance&) const = default;
};

class StreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public StreamError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DegreeExceeded : public StreamError {
 public:
  DegreeExceeded(int node, int t);
  int node() const { return node_; }
  int t() const { return t_; }

 private:
  int node_;
  int t_;
};

class DuplicateNeighbor : public StreamError {
 public:
  DuplicateNeighbor(int node, int t);
  int node() const { return node_; }

 private:
  int node_;
};

class IdOutOfRange : public StreamError {
 public:
  IdOutOfRange(int node, int t);
  int node() const { return node_; }

 private:
  int node_;
};

/// The arrival has more neighbors than delta, or none at all.
class ArrivalSizeError : public StreamError {
 public:
  ArrivalSizeError(std::size_t size, int t);
};

/// More online nodes than the configured arrival budget.
class ArrivalBudgetExceeded : public StreamError {
 public:
  explicit ArrivalBudgetExceeded(int budget);
};

/// Throws StreamError unless 1 <= delta <= n_offline.
void check_header(const InstanceHeader& header);

/// Parses an instance. Ids are range- and duplicate-checked; degree bounds
/// are left to validate_arrival.
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);

void write_instance(std::ostream& out, const Instance& instance);
std::string serialize_instance(const Instance& instance);
void save_instance_file(const std::string& path, const Instance& instance);

/// Running degrees of the offline side plus the arrival count.
class DegreeLedger {
 public:
  explicit DegreeLedger(int n_offline);

  int n_offline() const { return static_cast<int>(degree_.size()); }
  int degree(int u) const { return degree_[static_cast<std::size_t>(u)]; }
  std::span<const int> degrees() const { return degree_; }
  int arrivals_seen() const { return arrivals_seen_; }
  std::size_t edges_seen() const { return edges_seen_; }

  /// Unchecked bookkeeping; validate_arrival is the checked entry point.
  void record(std::span<const int> neighbors);

 private:
  std::vector<int> degree_;
  int arrivals_seen_ = 0;
  std::size_t edges_seen_ = 0;
};

struct ValidationOptions {
  /// Drop offending neighbors instead of throwing.
  bool permissive = false;
  /// Maximum number of online nodes; defaults to n_offline.
  std::optional<int> arrival_budget;
};

/// Checks `arrival` against the header and the degrees seen so far and
/// records it in `ledger`. Returns the accepted arrival, which differs from
/// the input only in permissive mode (offending neighbors removed; the
/// result may then be empty, in which case nothing is recorded).
OnlineArrival validate_arrival(const InstanceHeader& header, DegreeLedger& ledger,
                               const OnlineArrival& arrival,
                               const ValidationOptions& options = {});

/// Validates a whole stream in strict mode and returns the final ledger.
DegreeLedger validate_instance(const Instance& instance,
                               const ValidationOptions& options = {});

/// Histogram degree -> number of offline nodes with that degree.
std::map<int, int> degree_profile(const DegreeLedger& ledger);

/// Histogram of online-node degrees for a whole instance.
std::map<int, int> online_degree_profile(const Instance& instance);

/// Largest degree on either side.
int realized_max_degree(const Instance& instance);

// ---------------------------------------------------------------------------
// Edge colorings and the independent properness checker.

inline constexpr int kUncolored = -1;

/// colors[t][j] is the color of edge (arrivals[t].neighbors[j], v_t).
struct EdgeColoring {
  std::vector<std::vector<int>> colors;

  bool operator==(const EdgeColoring&) const = default;
};

struct ColoringCheck {
  std::size_t conflicts = 0;  // pairs of same-colored edges sharing a node
  std::size_t uncolored = 0;
  std::size_t shape_errors = 0;
  std::size_t colors_used = 0;
  std::vector<std::string> samples;  // first few diagnostics

  bool proper() const { return conflicts == 0 && shape_errors == 0; }
  bool total() const { return uncolored == 0; }
};

/// Counts color conflicts at every node; uncolored edges are ignored for
/// properness and counted separately.
ColoringCheck check_coloring(const Instance& instance, const EdgeColoring& coloring);

}  // namespace oec
