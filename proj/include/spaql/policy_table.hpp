#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spaql/partition.hpp"

namespace spaql {

// Flat, human-readable image of a partition tree's leaves: the policy as a
// lookup table. Rows keep creation order so greedy tie-breaks match the tree.
struct PolicyRow {
  std::vector<double> state_lo, state_hi;
  double action_lo = 0.0, action_hi = 0.0;  // continuous action cell
  std::vector<int> action_set;              // categorical action cell (indices)
  double q = 0.0;
  std::uint64_t visits = 0;
};

struct PolicyTable {
  ActionKind action_kind = ActionKind::kContinuous;
  int state_dims = 0;
  std::vector<PolicyRow> rows;

  // Index of the greedy row for a state: max q among rows whose state cell
  // contains it, earliest row on ties. -1 if no row contains the state.
  int greedy_row(std::span<const double> state) const;
  bool row_contains_state(int row, std::span<const double> state) const;
};

PolicyTable to_policy_table(const PartitionTree& tree);

// Tab-separated serialization: header row, then one row per leaf, numbers at 9
// significant digits, newline-terminated. Columns: dim<i>_lo/dim<i>_hi pairs,
// then action_lo/action_hi (continuous) or action_set (comma-joined indices),
// then q and visits.
std::string policy_table_to_tsv(const PolicyTable& table);
void write_policy_tsv(std::ostream& os, const PolicyTable& table);
PolicyTable parse_policy_tsv(std::istream& is);

// Draw an action uniformly from a row's action cell.
Action sample_row_action(const PolicyTable& table, int row, Rng& rng);

// printf-style %.9g formatting used across all text artifacts.
std::string format_g9(double x);

}  // namespace spaql
