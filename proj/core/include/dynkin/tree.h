#pragma once

// Finite scenario trees, adapted processes and stopping times.
//
// Time is node depth: the root lives at t = 0 and every leaf at t = horizon().
// A stopping time is stored as its canonical stop set, an antichain of nodes
// that cuts every root-to-leaf path exactly once. Pointwise minimum and
// comparison of stopping times then reduce to set operations.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dynkin/errors.h"

namespace dynkin {

inline constexpr double kProbabilitySumTol = 1e-12;
inline constexpr std::uint64_t kDefaultEnumerationCap = 20000;

class ScenarioTree {
 public:
  struct Node {
    NodeId id = 0;
    std::optional<NodeId> parent;
    double cond_prob = 1.0;

    bool operator==(const Node&) const = default;
  };

  // Validates the node list. Throws TreeError naming the offending node.
  ScenarioTree(std::vector<Node> nodes, int horizon);

  // Every internal node has `branching` children with equal probability.
  static ScenarioTree Uniform(int depth, int branching);

  std::size_t size() const { return data_->nodes.size(); }
  int horizon() const { return data_->horizon; }
  NodeId root() const { return 0; }

  const std::vector<Node>& nodes() const { return data_->nodes; }
  std::optional<NodeId> parent(NodeId v) const;
  double cond_prob(NodeId v) const;
  int depth(NodeId v) const;
  std::span<const NodeId> children(NodeId v) const;
  bool is_leaf(NodeId v) const;
  std::span<const NodeId> leaves() const { return data_->leaves; }

  // Unconditional probability of reaching `v`.
  double node_prob(NodeId v) const;

  // Ancestor of `v` at depth `d` (v itself when d == depth(v)).
  NodeId ancestor_at(NodeId v, int d) const;

  bool contains(NodeId v) const {
    return v >= 0 && static_cast<std::size_t>(v) < size();
  }

  // True if both trees are the same object or structurally identical.
  bool SameAs(const ScenarioTree& other) const;

 private:
  struct Data {
    std::vector<Node> nodes;
    int horizon = 0;
    std::vector<int> depth;
    std::vector<double> node_prob;
    std::vector<std::size_t> child_offset;  // CSR layout, size() + 1 entries
    std::vector<NodeId> child_ids;
    std::vector<NodeId> leaves;
  };

  void CheckNode(NodeId v) const;

  std::shared_ptr<const Data> data_;
};

// One finite real per node.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  explicit AdaptedProcess(std::vector<double> values);
  AdaptedProcess(std::size_t size, double value);

  std::size_t size() const { return values_.size(); }
  double operator[](NodeId v) const { return values_[static_cast<std::size_t>(v)]; }
  std::span<const double> values() const { return values_; }

  // Throws ShapeError unless the process has one value per node of `tree`.
  void CheckShape(const ScenarioTree& tree) const;

  bool operator==(const AdaptedProcess&) const = default;

 private:
  std::vector<double> values_;
};

class StoppingTime {
 public:
  // Canonical form of an arbitrary node set: nodes with a stopping ancestor
  // are dropped and leaves on uncovered paths are added.
  static StoppingTime Canonicalize(const ScenarioTree& tree,
                                   std::span<const NodeId> raw_stop_nodes);

  // The constant time t0 (every path stops at depth t0).
  static StoppingTime AtDepth(const ScenarioTree& tree, int depth);
  static StoppingTime Horizon(const ScenarioTree& tree);
  static StoppingTime Root(const ScenarioTree& tree);

  const ScenarioTree& tree() const { return tree_; }

  // Sorted ascending.
  std::span<const NodeId> stop_set() const { return stop_set_; }

  // The stop node on the path through `v` at or above `v`, if any.
  std::optional<NodeId> StopNodeAt(NodeId v) const;

  // True if the path through `v` has not stopped yet at v (v strictly before).
  bool IsBefore(NodeId v) const { return !StopNodeAt(v).has_value(); }

  bool IsStopNode(NodeId v) const;

  // Depth of the stop node on the path of `leaf`.
  int StopDepth(NodeId leaf) const;

  bool operator==(const StoppingTime& other) const;

 private:
  StoppingTime(ScenarioTree tree) : tree_(std::move(tree)) {}

  ScenarioTree tree_;
  std::vector<NodeId> stop_set_;
  // Stop node at or above each node; -1 for nodes strictly before.
  std::vector<NodeId> stop_above_;
};

using Profile = std::vector<StoppingTime>;

inline StoppingTime Canonicalize(std::span<const NodeId> raw,
                                 const ScenarioTree& tree) {
  return StoppingTime::Canonicalize(tree, raw);
}

inline int StopDepth(const StoppingTime& tau, NodeId leaf) {
  return tau.StopDepth(leaf);
}

// Pointwise minimum.
StoppingTime MinStop(const StoppingTime& sigma, const StoppingTime& tau);
// Pointwise minimum of a non-empty list.
StoppingTime MinStop(std::span<const StoppingTime> times);

// sigma <= tau on every path.
bool Leq(const StoppingTime& sigma, const StoppingTime& tau);

// E[Z_tau].
double ExpectAt(const ScenarioTree& tree, const AdaptedProcess& z,
                const StoppingTime& tau);

// Stop depth per leaf, in tree.leaves() order.
std::vector<int> LeafDepths(const StoppingTime& tau);

// Number of canonical stopping times, saturating at UINT64_MAX.
std::uint64_t CountStoppingTimes(const ScenarioTree& tree);

// Calls `visit` once per canonical stopping time. Throws EnumerationCapError
// before visiting anything if the count exceeds `cap`.
void ForEachStoppingTime(const ScenarioTree& tree,
                         const std::function<void(const StoppingTime&)>& visit,
                         std::uint64_t cap = kDefaultEnumerationCap);

std::vector<StoppingTime> EnumerateStoppingTimes(
    const ScenarioTree& tree, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace dynkin
