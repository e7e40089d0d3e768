#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "spaql/metric_space.hpp"
#include "spaql/rng.hpp"

namespace spaql {

// One node of the covering tree. Cells are axis-aligned infinity-metric boxes:
// per coordinate [center - r, center + r) with r = 2^-depth, half-open, closed
// at the global upper boundary +1 so the leaves tile the space exactly.
//
// Nodes live in a single arena (see PartitionTree); children of a node are
// contiguous, laid out corner-major / action-slot-minor, so child lookup is
// index arithmetic instead of pointer chasing.
struct Ball {
  std::array<double, kMaxStateDims> center{};
  double action_center = 0.0;       // continuous spaces: center of the action interval
  std::uint64_t action_set = 0;     // categorical spaces: bitmask over action indices
  double q = 0.0;                   // Q estimate
  std::uint32_t visits = 0;
  std::uint32_t created = 0;        // creation index (== arena index by construction)
  std::int32_t first_child = -1;    // -1 for leaves
  std::uint16_t depth = 0;

  bool is_leaf() const { return first_child < 0; }
  double radius() const { return std::ldexp(1.0, -static_cast<int>(depth)); }
};

// Visit count at which a ball becomes due for splitting: (d_max/r)^2 = 4^depth.
inline std::uint64_t split_threshold(const Ball& b) { return std::uint64_t{1} << (2 * b.depth); }

class PartitionTree {
 public:
  PartitionTree(SpaceSpec spec, double optimistic_init);

  const SpaceSpec& space() const { return spec_; }
  std::int64_t arm_count() const { return leaf_count_; }
  std::int32_t node_count() const { return static_cast<std::int32_t>(nodes_.size()); }
  const Ball& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }
  Ball& node_mut(std::int32_t i) { return nodes_[static_cast<std::size_t>(i)]; }

  // All leaves whose state cell contains `state`, in creation order. Appends
  // to `out` after clearing it; reuse the buffer in hot loops.
  void relevant_leaves(std::span<const double> state, std::vector<std::int32_t>& out) const;
  std::vector<std::int32_t> relevant_leaves(std::span<const double> state) const;

  // Streaming form of the above (no buffer); f(std::int32_t leaf_index).
  template <typename F>
  void visit_relevant(std::span<const double> state, F&& f) const {
    visit_rec(0, state, f);
  }

  // min(cap, max Q over relevant leaves).
  double value_upper(std::span<const double> state, double cap) const;

  std::uint32_t record_visit(std::int32_t leaf) { return ++node_mut(leaf).visits; }

  // Splits the leaf if its visit count has reached 4^depth. Continuous action:
  // 2^(state_dims+1) children halving every coordinate; categorical: 2^state_dims
  // state cells fanned out per action still in the ball's set (or the singleton
  // carried down). Children inherit q and visits. Returns whether a split happened.
  bool split_if_due(std::int32_t leaf);

  // Cell geometry, used by exports and tests.
  void state_bounds(std::int32_t i, double* lo, double* hi) const;  // arrays of state_dims
  void action_interval(std::int32_t i, double& lo, double& hi) const;
  bool contains(std::int32_t i, const StandardPoint& p) const;
  bool state_cell_contains(std::int32_t i, std::span<const double> state) const;

  std::vector<std::int32_t> all_leaves() const;  // arena scan, creation order

 private:
  template <typename F>
  void visit_rec(std::int32_t idx, std::span<const double> state, F& f) const {
    const Ball& b = nodes_[static_cast<std::size_t>(idx)];
    if (b.is_leaf()) {
      f(idx);
      return;
    }
    int corner = 0;
    for (int j = 0; j < spec_.state_dims(); ++j)
      corner |= (state[static_cast<std::size_t>(j)] >= b.center[static_cast<std::size_t>(j)]) << j;
    const int per = children_per_corner(b);
    const std::int32_t base = b.first_child + corner * per;
    for (int s = 0; s < per; ++s) visit_rec(base + s, state, f);
  }

  int children_per_corner(const Ball& b) const {
    if (spec_.action_kind() == ActionKind::kContinuous) return 2;
    int n = std::popcount(b.action_set);
    return n > 1 ? n : 1;
  }

  SpaceSpec spec_;
  std::vector<Ball> nodes_;
  std::int64_t leaf_count_ = 1;
  std::uint32_t next_creation_ = 0;
};

// Leaf with maximal Q among `leaves`; ties by smallest creation index.
std::int32_t select_greedy(const PartitionTree& tree, std::span<const std::int32_t> leaves);

// Uniform draw from the leaf's action cell (interval or categorical subset).
Action sample_action(const PartitionTree& tree, std::int32_t leaf, Rng& rng);

}  // namespace spaql
