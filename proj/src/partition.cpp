#include "spaql/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spaql {

namespace {
// Half-open interval test with closure at the global +1 boundary.
bool in_cell(double x, double center, double r) {
  const double lo = center - r;
  const double hi = center + r;
  if (x < lo) return false;
  if (x < hi) return true;
  return x == hi && hi == 1.0;
}
}  // namespace

PartitionTree::PartitionTree(SpaceSpec spec, double optimistic_init) : spec_(std::move(spec)) {
  Ball root;
  root.q = optimistic_init;
  root.depth = 0;
  root.created = next_creation_++;
  if (spec_.action_kind() == ActionKind::kCategorical) {
    root.action_set = (spec_.num_actions() == 64)
                          ? ~std::uint64_t{0}
                          : ((std::uint64_t{1} << spec_.num_actions()) - 1);
  }
  nodes_.push_back(root);
  leaf_count_ = 1;
}

void PartitionTree::relevant_leaves(std::span<const double> state,
                                    std::vector<std::int32_t>& out) const {
  out.clear();
  visit_relevant(state, [&out](std::int32_t i) { out.push_back(i); });
}

std::vector<std::int32_t> PartitionTree::relevant_leaves(std::span<const double> state) const {
  std::vector<std::int32_t> out;
  relevant_leaves(state, out);
  return out;
}

double PartitionTree::value_upper(std::span<const double> state, double cap) const {
  double best = -std::numeric_limits<double>::infinity();
  visit_relevant(state, [&](std::int32_t i) {
    best = std::max(best, nodes_[static_cast<std::size_t>(i)].q);
  });
  return std::min(cap, best);
}

bool PartitionTree::split_if_due(std::int32_t leaf) {
  // Copy, not reference: the arena push_backs below can reallocate.
  const Ball b = node(leaf);
  if (!b.is_leaf()) throw std::logic_error("split_if_due: not a leaf");
  if (b.visits < split_threshold(b)) return false;

  const int dims = spec_.state_dims();
  const int corners = 1 << dims;
  const double child_r = b.radius() / 2.0;
  const auto first = static_cast<std::int32_t>(nodes_.size());

  int n_children = 0;
  for (int corner = 0; corner < corners; ++corner) {
    Ball child;
    for (int j = 0; j < dims; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      child.center[ju] = b.center[ju] + ((corner >> j) & 1 ? child_r : -child_r);
    }
    child.q = b.q;
    child.visits = b.visits;
    child.depth = static_cast<std::uint16_t>(b.depth + 1);
    if (spec_.action_kind() == ActionKind::kContinuous) {
      for (int slot = 0; slot < 2; ++slot) {
        child.action_center = b.action_center + (slot ? child_r : -child_r);
        child.created = next_creation_++;
        nodes_.push_back(child);
        ++n_children;
      }
    } else if (std::popcount(b.action_set) > 1) {
      for (int a = 0; a < 64; ++a) {
        if (!((b.action_set >> a) & 1)) continue;
        child.action_set = std::uint64_t{1} << a;
        child.created = next_creation_++;
        nodes_.push_back(child);
        ++n_children;
      }
    } else {
      child.action_set = b.action_set;
      child.created = next_creation_++;
      nodes_.push_back(child);
      ++n_children;
    }
  }
  node_mut(leaf).first_child = first;
  leaf_count_ += n_children - 1;
  return true;
}

void PartitionTree::state_bounds(std::int32_t i, double* lo, double* hi) const {
  const Ball& b = node(i);
  const double r = b.radius();
  for (int j = 0; j < spec_.state_dims(); ++j) {
    lo[j] = b.center[static_cast<std::size_t>(j)] - r;
    hi[j] = b.center[static_cast<std::size_t>(j)] + r;
  }
}

void PartitionTree::action_interval(std::int32_t i, double& lo, double& hi) const {
  const Ball& b = node(i);
  lo = b.action_center - b.radius();
  hi = b.action_center + b.radius();
}

bool PartitionTree::state_cell_contains(std::int32_t i, std::span<const double> state) const {
  const Ball& b = node(i);
  const double r = b.radius();
  for (int j = 0; j < spec_.state_dims(); ++j)
    if (!in_cell(state[static_cast<std::size_t>(j)], b.center[static_cast<std::size_t>(j)], r))
      return false;
  return true;
}

bool PartitionTree::contains(std::int32_t i, const StandardPoint& p) const {
  if (!state_cell_contains(i, p.coords)) return false;
  const Ball& b = node(i);
  if (spec_.action_kind() == ActionKind::kContinuous)
    return in_cell(p.action.value, b.action_center, b.radius());
  return (b.action_set >> p.action.index) & 1;
}

std::vector<std::int32_t> PartitionTree::all_leaves() const {
  std::vector<std::int32_t> out;
  for (std::int32_t i = 0; i < node_count(); ++i)
    if (nodes_[static_cast<std::size_t>(i)].is_leaf()) out.push_back(i);
  return out;
}

std::int32_t select_greedy(const PartitionTree& tree, std::span<const std::int32_t> leaves) {
  if (leaves.empty()) throw std::invalid_argument("select_greedy: empty leaf set");
  std::int32_t best = leaves[0];
  for (std::size_t k = 1; k < leaves.size(); ++k) {
    const Ball& cand = tree.node(leaves[k]);
    const Ball& cur = tree.node(best);
    if (cand.q > cur.q || (cand.q == cur.q && cand.created < cur.created)) best = leaves[k];
  }
  return best;
}

Action sample_action(const PartitionTree& tree, std::int32_t leaf, Rng& rng) {
  const Ball& b = tree.node(leaf);
  if (tree.space().action_kind() == ActionKind::kContinuous) {
    const double r = b.radius();
    return Action::continuous(rng.uniform(b.action_center - r, b.action_center + r));
  }
  const int n = std::popcount(b.action_set);
  int k = rng.uniform_int(n);
  for (int a = 0; a < 64; ++a) {
    if ((b.action_set >> a) & 1) {
      if (k == 0) return Action::categorical(a);
      --k;
    }
  }
  throw std::logic_error("sample_action: empty action set");
}

}  // namespace spaql
