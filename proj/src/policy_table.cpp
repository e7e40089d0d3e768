#include "spaql/policy_table.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spaql {

std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

bool PolicyTable::row_contains_state(int row, std::span<const double> state) const {
  const PolicyRow& r = rows[static_cast<std::size_t>(row)];
  for (int j = 0; j < state_dims; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double x = state[ju];
    if (x < r.state_lo[ju]) return false;
    if (x >= r.state_hi[ju] && !(x == r.state_hi[ju] && x == 1.0)) return false;
  }
  return true;
}

int PolicyTable::greedy_row(std::span<const double> state) const {
  int best = -1;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (!row_contains_state(i, state)) continue;
    if (best < 0 || rows[static_cast<std::size_t>(i)].q > rows[static_cast<std::size_t>(best)].q)
      best = i;
  }
  return best;
}

PolicyTable to_policy_table(const PartitionTree& tree) {
  PolicyTable t;
  t.action_kind = tree.space().action_kind();
  t.state_dims = tree.space().state_dims();
  for (std::int32_t i = 0; i < tree.node_count(); ++i) {
    const Ball& b = tree.node(i);
    if (!b.is_leaf()) continue;
    PolicyRow row;
    row.state_lo.resize(static_cast<std::size_t>(t.state_dims));
    row.state_hi.resize(static_cast<std::size_t>(t.state_dims));
    tree.state_bounds(i, row.state_lo.data(), row.state_hi.data());
    if (t.action_kind == ActionKind::kContinuous) {
      tree.action_interval(i, row.action_lo, row.action_hi);
    } else {
      for (int a = 0; a < 64; ++a)
        if ((b.action_set >> a) & 1) row.action_set.push_back(a);
    }
    row.q = b.q;
    row.visits = b.visits;
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_policy_tsv(std::ostream& os, const PolicyTable& table) {
  for (int j = 0; j < table.state_dims; ++j) {
    if (j) os << '\t';
    os << "dim" << j << "_lo\tdim" << j << "_hi";
  }
  if (table.action_kind == ActionKind::kContinuous)
    os << "\taction_lo\taction_hi";
  else
    os << "\taction_set";
  os << "\tq\tvisits\n";

  for (const PolicyRow& r : table.rows) {
    for (int j = 0; j < table.state_dims; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (j) os << '\t';
      os << format_g9(r.state_lo[ju]) << '\t' << format_g9(r.state_hi[ju]);
    }
    if (table.action_kind == ActionKind::kContinuous) {
      os << '\t' << format_g9(r.action_lo) << '\t' << format_g9(r.action_hi);
    } else {
      os << '\t';
      for (std::size_t k = 0; k < r.action_set.size(); ++k) {
        if (k) os << ',';
        os << r.action_set[k];
      }
    }
    os << '\t' << format_g9(r.q) << '\t' << r.visits << '\n';
  }
}

std::string policy_table_to_tsv(const PolicyTable& table) {
  std::ostringstream os;
  write_policy_tsv(os, table);
  return os.str();
}

namespace {
std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("policy table: bad number '" + s + "'");
  return v;
}
}  // namespace

PolicyTable parse_policy_tsv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("policy table: missing header");
  const std::vector<std::string> header = split_tabs(line);
  if (header.size() < 4 || header.back() != "visits" || header[header.size() - 2] != "q")
    throw std::runtime_error("policy table: malformed header");

  PolicyTable t;
  std::size_t col = 0;
  while (col + 1 < header.size() && header[col].rfind("dim", 0) == 0) col += 2;
  t.state_dims = static_cast<int>(col / 2);
  if (t.state_dims < 1) throw std::runtime_error("policy table: no state columns");
  if (header[col] == "action_lo")
    t.action_kind = ActionKind::kContinuous;
  else if (header[col] == "action_set")
    t.action_kind = ActionKind::kCategorical;
  else
    throw std::runtime_error("policy table: unrecognized action column '" + header[col] + "'");

  const std::size_t want =
      2 * static_cast<std::size_t>(t.state_dims) + (t.action_kind == ActionKind::kContinuous ? 4 : 3);
  if (header.size() != want) throw std::runtime_error("policy table: wrong column count");

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_tabs(line);
    if (f.size() != want) throw std::runtime_error("policy table: wrong field count in row");
    PolicyRow r;
    std::size_t k = 0;
    for (int j = 0; j < t.state_dims; ++j) {
      r.state_lo.push_back(to_double(f[k++]));
      r.state_hi.push_back(to_double(f[k++]));
    }
    if (t.action_kind == ActionKind::kContinuous) {
      r.action_lo = to_double(f[k++]);
      r.action_hi = to_double(f[k++]);
    } else {
      std::stringstream ss(f[k++]);
      std::string tok;
      while (std::getline(ss, tok, ',')) r.action_set.push_back(static_cast<int>(to_double(tok)));
      if (r.action_set.empty()) throw std::runtime_error("policy table: empty action set");
    }
    r.q = to_double(f[k++]);
    r.visits = static_cast<std::uint64_t>(to_double(f[k++]));
    t.rows.push_back(std::move(r));
  }
  return t;
}

Action sample_row_action(const PolicyTable& table, int row, Rng& rng) {
  const PolicyRow& r = table.rows[static_cast<std::size_t>(row)];
  if (table.action_kind == ActionKind::kContinuous)
    return Action::continuous(rng.uniform(r.action_lo, r.action_hi));
  const int n = static_cast<int>(r.action_set.size());
  return Action::categorical(r.action_set[static_cast<std::size_t>(rng.uniform_int(n))]);
}

}  // namespace spaql
