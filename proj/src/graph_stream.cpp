#include "oec/graph_stream.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace oec {

using nlohmann::json;

std::size_t Instance::edge_count() const {
  std::size_t m = 0;
  for (const auto& a : arrivals) m += a.neighbors.size();
  return m;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : StreamError("line " + std::to_string(line) + ": " + what), line_(line) {}

DegreeExceeded::DegreeExceeded(int node, int t)
    : StreamError("degree exceeded at offline node " + std::to_string(node) +
                  " (arrival " + std::to_string(t) + ")"),
      node_(node),
      t_(t) {}

DuplicateNeighbor::DuplicateNeighbor(int node, int t)
    : StreamError("duplicate neighbor " + std::to_string(node) + " in arrival " +
                  std::to_string(t)),
      node_(node) {}

IdOutOfRange::IdOutOfRange(int node, int t)
    : StreamError("offline id " + std::to_string(node) + " out of range in arrival " +
                  std::to_string(t)),
      node_(node) {}

ArrivalSizeError::ArrivalSizeError(std::size_t size, int t)
    : StreamError("arrival " + std::to_string(t) + " has " + std::to_string(size) +
                  " neighbors") {}

ArrivalBudgetExceeded::ArrivalBudgetExceeded(int budget)
    : StreamError("arrival budget of " + std::to_string(budget) + " exhausted") {}

void check_header(const InstanceHeader& header) {
  if (header.n_offline < 1) throw StreamError("header: n_offline must be >= 1");
  if (header.delta < 1) throw StreamError("header: delta must be >= 1");
  if (header.delta > header.n_offline)
    throw StreamError("header: delta must not exceed n_offline");
}

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char ch) { return std::isspace(ch) != 0; });
}

int as_int(const json& j, std::size_t line, const char* key) {
  if (!j.is_number_integer()) throw ParseError(line, std::string(key) + " must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ParseError(line, std::string(key) + " out of range");
  return static_cast<int>(v);
}

}  // namespace

Instance load_instance(std::istream& in) {
  Instance inst;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<char> seen;

  while (std::getline(in, text)) {
    ++line_no;
    if (blank(text)) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(line_no, "record is not an object");

    if (!have_header) {
      if (!rec.contains("n_offline") || !rec.contains("delta"))
        throw ParseError(line_no, "header missing (expected n_offline and delta)");
      inst.header.n_offline = as_int(rec["n_offline"], line_no, "n_offline");
      inst.header.delta = as_int(rec["delta"], line_no, "delta");
      try {
        check_header(inst.header);
      } catch (const StreamError& e) {
        throw ParseError(line_no, e.what());
      }
      seen.assign(static_cast<std::size_t>(inst.header.n_offline), 0);
      have_header = true;
      continue;
    }

    auto it = rec.find("neighbors");
    if (it == rec.end() || !it->is_array())
      throw ParseError(line_no, "arrival record needs a neighbors array");
    OnlineArrival a;
    a.neighbors.reserve(it->size());
    for (const auto& v : *it) a.neighbors.push_back(as_int(v, line_no, "neighbor"));
    if (a.neighbors.empty()) throw ParseError(line_no, "arrival with no neighbors");
    const int t = static_cast<int>(inst.arrivals.size());
    for (int u : a.neighbors) {
      if (u < 0 || u >= inst.header.n_offline)
        throw ParseError(line_no, IdOutOfRange(u, t).what());
      if (seen[static_cast<std::size_t>(u)])
        throw ParseError(line_no, DuplicateNeighbor(u, t).what());
      seen[static_cast<std::size_t>(u)] = 1;
    }
    for (int u : a.neighbors) seen[static_cast<std::size_t>(u)] = 0;
    inst.arrivals.push_back(std::move(a));
  }
  if (!have_header) throw ParseError(line_no, "header missing");
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StreamError("cannot open " + path);
  return load_instance(in);
}

void write_instance(std::ostream& out, const Instance& instance) {
  json header = {{"n_offline", instance.header.n_offline}, {"delta", instance.header.delta}};
  out << header.dump() << '\n';
  for (const auto& a : instance.arrivals) {
    json rec = {{"neighbors", a.neighbors}};
    out << rec.dump() << '\n';
  }
}

std::string serialize_instance(const Instance& instance) {
  std::ostringstream os;
  write_instance(os, instance);
  return os.str();
}

void save_instance_file(const std::string& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw StreamError("cannot write " + path);
  write_instance(out, instance);
}

DegreeLedger::DegreeLedger(int n_offline)
    : degree_(static_cast<std::size_t>(std::max(n_offline, 0)), 0) {}

void DegreeLedger::record(std::span<const int> neighbors) {
  for (int u : neighbors) ++degree_[static_cast<std::size_t>(u)];
  edges_seen_ += neighbors.size();
  ++arrivals_seen_;
}

OnlineArrival validate_arrival(const InstanceHeader& header, DegreeLedger& ledger,
                               const OnlineArrival& arrival,
                               const ValidationOptions& options) {
  const int t = ledger.arrivals_seen();
  const int budget = options.arrival_budget.value_or(header.n_offline);
  if (t >= budget) throw ArrivalBudgetExceeded(budget);

  OnlineArrival accepted;
  accepted.neighbors.reserve(arrival.neighbors.size());
  std::unordered_set<int> seen;
  for (int u : arrival.neighbors) {
    if (u < 0 || u >= header.n_offline) {
      if (options.permissive) continue;
      throw IdOutOfRange(u, t);
    }
    if (!seen.insert(u).second) {
      if (options.permissive) continue;
      throw DuplicateNeighbor(u, t);
    }
    if (ledger.degree(u) >= header.delta) {
      if (options.permissive) continue;
      throw DegreeExceeded(u, t);
    }
    if (static_cast<int>(accepted.neighbors.size()) >= header.delta) {
      if (options.permissive) continue;
      throw ArrivalSizeError(arrival.neighbors.size(), t);
    }
    accepted.neighbors.push_back(u);
  }
  if (accepted.neighbors.empty()) {
    if (options.permissive) return accepted;
    throw ArrivalSizeError(0, t);
  }
  ledger.record(accepted.neighbors);
  return accepted;
}

DegreeLedger validate_instance(const Instance& instance, const ValidationOptions& options) {
  check_header(instance.header);
  ValidationOptions strict = options;
  strict.permissive = false;
  DegreeLedger ledger(instance.header.n_offline);
  for (const auto& a : instance.arrivals) validate_arrival(instance.header, ledger, a, strict);
  return ledger;
}

std::map<int, int> degree_profile(const DegreeLedger& ledger) {
  std::map<int, int> hist;
  for (int d : ledger.degrees()) ++hist[d];
  return hist;
}

std::map<int, int> online_degree_profile(const Instance& instance) {
  std::map<int, int> hist;
  for (const auto& a : instance.arrivals) ++hist[static_cast<int>(a.neighbors.size())];
  return hist;
}

int realized_max_degree(const Instance& instance) {
  std::vector<int> deg(static_cast<std::size_t>(instance.header.n_offline), 0);
  int best = 0;
  for (const auto& a : instance.arrivals) {
    best = std::max(best, static_cast<int>(a.neighbors.size()));
    for (int u : a.neighbors) best = std::max(best, ++deg[static_cast<std::size_t>(u)]);
  }
  return best;
}

ColoringCheck check_coloring(const Instance& instance, const EdgeColoring& coloring) {
  ColoringCheck out;
  auto note = [&out](std::string msg) {
    if (out.samples.size() < 8) out.samples.push_back(std::move(msg));
  };
  if (coloring.colors.size() != instance.arrivals.size()) {
    ++out.shape_errors;
    note("coloring has " + std::to_string(coloring.colors.size()) + " rows for " +
         std::to_string(instance.arrivals.size()) + " arrivals");
    return out;
  }

  // Offline side: (node, color) -> first arrival that used it.
  std::unordered_map<std::uint64_t, int> offline_used;
  std::unordered_set<int> all_colors;
  for (std::size_t t = 0; t < instance.arrivals.size(); ++t) {
    const auto& nbrs = instance.arrivals[t].neighbors;
    const auto& cols = coloring.colors[t];
    if (cols.size() != nbrs.size()) {
      ++out.shape_errors;
      note("arrival " + std::to_string(t) + ": row size mismatch");
      continue;
    }
    std::unordered_set<int> online_used;
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      const int c = cols[j];
      if (c == kUncolored) {
        ++out.uncolored;
        continue;
      }
      if (c < 0) {
        ++out.shape_errors;
        note("arrival " + std::to_string(t) + ": negative color");
        continue;
      }
      all_colors.insert(c);
      if (!online_used.insert(c).second) {
        ++out.conflicts;
        note("online node " + std::to_string(t) + " repeats color " + std::to_string(c));
      }
      const std::uint64_t key =
          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(nbrs[j])) << 32) |
          static_cast<std::uint32_t>(c);
      auto [pos, fresh] = offline_used.emplace(key, static_cast<int>(t));
      if (!fresh) {
        ++out.conflicts;
        note("offline node " + std::to_string(nbrs[j]) + " repeats color " +
             std::to_string(c) + " (arrivals " + std::to_string(pos->second) + ", " +
             std::to_string(t) + ")");
      }
    }
  }
  out.colors_used = all_colors.size();
  return out;
}

}  // namespace oec
