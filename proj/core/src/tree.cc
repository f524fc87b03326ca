#include "dynkin/tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace dynkin {

namespace {

constexpr NodeId kNone = -1;

std::string NodeLabel(NodeId v) { return "node " + std::to_string(v); }

void CheckSameTree(const StoppingTime& a, const StoppingTime& b) {
  if (!a.tree().SameAs(b.tree())) {
    throw ShapeError("stopping times live on different trees");
  }
}

std::uint64_t SaturatingMul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t SaturatingInc(std::uint64_t a) {
  return a == std::numeric_limits<std::uint64_t>::max() ? a : a + 1;
}

// s(v) = 1 + prod over children s(c), s(leaf) = 1.
std::vector<std::uint64_t> SubtreeCounts(const ScenarioTree& tree) {
  std::vector<std::uint64_t> count(tree.size(), 1);
  for (NodeId v = static_cast<NodeId>(tree.size()) - 1; v >= 0; --v) {
    if (tree.is_leaf(v)) continue;
    std::uint64_t product = 1;
    for (NodeId c : tree.children(v)) product = SaturatingMul(product, count[c]);
    count[v] = SaturatingInc(product);
  }
  return count;
}

// Decodes stopping time number `index` of the subtree at `v`. Index 0 stops
// at v; the rest are a mixed-radix product over the children.
void DecodeStoppingTime(const ScenarioTree& tree,
                        const std::vector<std::uint64_t>& count, NodeId v,
                        std::uint64_t index, std::vector<NodeId>& out) {
  if (index == 0 || tree.is_leaf(v)) {
    out.push_back(v);
    return;
  }
  index -= 1;
  for (NodeId c : tree.children(v)) {
    DecodeStoppingTime(tree, count, c, index % count[c], out);
    index /= count[c];
  }
}

}  // namespace

ScenarioTree::ScenarioTree(std::vector<Node> nodes, int horizon) {
  if (nodes.empty()) throw TreeError("tree has no nodes");
  if (horizon < 1) {
    throw TreeError("horizon must be at least 1, got " +
                    std::to_string(horizon));
  }
  auto data = std::make_shared<Data>();
  const std::size_t k = nodes.size();
  data->horizon = horizon;
  data->depth.assign(k, 0);
  data->node_prob.assign(k, 1.0);

  std::vector<std::size_t> child_count(k, 0);
  for (std::size_t idx = 0; idx < k; ++idx) {
    const Node& node = nodes[idx];
    const auto v = static_cast<NodeId>(idx);
    if (node.id != v) {
      throw TreeError("node ids must be 0..K-1 in order; position " +
                          std::to_string(idx) + " holds id " +
                          std::to_string(node.id),
                      node.id);
    }
    if (!std::isfinite(node.cond_prob) || node.cond_prob <= 0.0 ||
        node.cond_prob > 1.0) {
      throw TreeError(NodeLabel(v) + ": conditional probability must lie in "
                      "(0, 1]",
                      v);
    }
    if (!node.parent) {
      if (v != 0) throw TreeError(NodeLabel(v) + ": second root", v);
      if (std::abs(node.cond_prob - 1.0) > kProbabilitySumTol) {
        throw TreeError(NodeLabel(v) + ": root probability must be 1", v);
      }
      continue;
    }
    if (v == 0) throw TreeError("node 0 must be the root", v);
    const NodeId p = *node.parent;
    if (p < 0 || p >= v) {
      throw TreeError(NodeLabel(v) + ": parent " + std::to_string(p) +
                          " must be an earlier node",
                      v);
    }
    data->depth[idx] = data->depth[p] + 1;
    data->node_prob[idx] = data->node_prob[p] * node.cond_prob;
    if (data->depth[idx] > horizon) {
      throw TreeError(NodeLabel(v) + ": depth " +
                          std::to_string(data->depth[idx]) +
                          " exceeds horizon " + std::to_string(horizon),
                      v);
    }
    ++child_count[p];
  }

  data->child_offset.assign(k + 1, 0);
  for (std::size_t idx = 0; idx < k; ++idx) {
    data->child_offset[idx + 1] = data->child_offset[idx] + child_count[idx];
  }
  data->child_ids.resize(data->child_offset[k]);
  std::vector<std::size_t> fill(data->child_offset.begin(),
                                data->child_offset.end() - 1);
  for (std::size_t idx = 1; idx < k; ++idx) {
    data->child_ids[fill[*nodes[idx].parent]++] = static_cast<NodeId>(idx);
  }

  for (std::size_t idx = 0; idx < k; ++idx) {
    const auto v = static_cast<NodeId>(idx);
    if (child_count[idx] == 0) {
      if (data->depth[idx] != horizon) {
        throw TreeError(NodeLabel(v) + ": leaf at depth " +
                            std::to_string(data->depth[idx]) +
                            " but horizon is " + std::to_string(horizon),
                        v);
      }
      data->leaves.push_back(v);
      continue;
    }
    double sum = 0.0;
    for (std::size_t c = data->child_offset[idx]; c < data->child_offset[idx + 1];
         ++c) {
      sum += nodes[data->child_ids[c]].cond_prob;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << NodeLabel(v) << ": children probabilities sum to " << sum
          << " (expected 1)";
      throw TreeError(msg.str(), v);
    }
  }
  data->nodes = std::move(nodes);
  data_ = std::move(data);
}

ScenarioTree ScenarioTree::Uniform(int depth, int branching) {
  if (depth < 1) throw TreeError("depth must be at least 1");
  if (branching < 1) throw TreeError("branching must be at least 1");
  std::vector<Node> nodes{{0, std::nullopt, 1.0}};
  const double p = 1.0 / branching;
  std::size_t level_begin = 0;
  for (int d = 0; d < depth; ++d) {
    const std::size_t level_end = nodes.size();
    for (std::size_t parent = level_begin; parent < level_end; ++parent) {
      for (int b = 0; b < branching; ++b) {
        nodes.push_back({static_cast<NodeId>(nodes.size()),
                         static_cast<NodeId>(parent), p});
      }
    }
    level_begin = level_end;
  }
  return ScenarioTree(std::move(nodes), depth);
}

void ScenarioTree::CheckNode(NodeId v) const {
  if (!contains(v)) throw TreeError("unknown " + NodeLabel(v), v);
}

std::optional<NodeId> ScenarioTree::parent(NodeId v) const {
  CheckNode(v);
  return data_->nodes[v].parent;
}

double ScenarioTree::cond_prob(NodeId v) const {
  CheckNode(v);
  return data_->nodes[v].cond_prob;
}

int ScenarioTree::depth(NodeId v) const {
  CheckNode(v);
  return data_->depth[v];
}

std::span<const NodeId> ScenarioTree::children(NodeId v) const {
  CheckNode(v);
  const auto begin = data_->child_offset[v];
  const auto end = data_->child_offset[v + 1];
  return std::span<const NodeId>(data_->child_ids).subspan(begin, end - begin);
}

bool ScenarioTree::is_leaf(NodeId v) const { return children(v).empty(); }

double ScenarioTree::node_prob(NodeId v) const {
  CheckNode(v);
  return data_->node_prob[v];
}

NodeId ScenarioTree::ancestor_at(NodeId v, int d) const {
  CheckNode(v);
  if (d < 0 || d > data_->depth[v]) {
    throw TreeError(NodeLabel(v) + " has no ancestor at depth " +
                        std::to_string(d),
                    v);
  }
  while (data_->depth[v] > d) v = *data_->nodes[v].parent;
  return v;
}

bool ScenarioTree::SameAs(const ScenarioTree& other) const {
  return data_ == other.data_ ||
         (data_->horizon == other.data_->horizon &&
          data_->nodes == other.data_->nodes);
}

AdaptedProcess::AdaptedProcess(std::vector<double> values)
    : values_(std::move(values)) {
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (!std::isfinite(values_[v])) {
      throw TreeError("process value at node " + std::to_string(v) +
                          " is not finite",
                      static_cast<NodeId>(v));
    }
  }
}

AdaptedProcess::AdaptedProcess(std::size_t size, double value)
    : AdaptedProcess(std::vector<double>(size, value)) {}

void AdaptedProcess::CheckShape(const ScenarioTree& tree) const {
  if (values_.size() != tree.size()) {
    throw ShapeError("process has " + std::to_string(values_.size()) +
                     " values but the tree has " + std::to_string(tree.size()) +
                     " nodes");
  }
}

StoppingTime StoppingTime::Canonicalize(const ScenarioTree& tree,
                                        std::span<const NodeId> raw) {
  std::vector<char> marked(tree.size(), 0);
  for (NodeId v : raw) {
    if (!tree.contains(v)) {
      throw TreeError("stop set names unknown node " + std::to_string(v), v);
    }
    marked[v] = 1;
  }
  StoppingTime tau(tree);
  tau.stop_above_.assign(tree.size(), kNone);
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    const auto parent = tree.parent(v);
    if (parent && tau.stop_above_[*parent] != kNone) {
      tau.stop_above_[v] = tau.stop_above_[*parent];
    } else if (marked[v] || tree.is_leaf(v)) {
      tau.stop_above_[v] = v;
      tau.stop_set_.push_back(v);
    }
  }
  return tau;
}

StoppingTime StoppingTime::AtDepth(const ScenarioTree& tree, int depth) {
  if (depth < 0 || depth > tree.horizon()) {
    throw TreeError("constant time " + std::to_string(depth) +
                    " outside [0, " + std::to_string(tree.horizon()) + "]");
  }
  std::vector<NodeId> raw;
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    if (tree.depth(v) == depth) raw.push_back(v);
  }
  return Canonicalize(tree, raw);
}

StoppingTime StoppingTime::Horizon(const ScenarioTree& tree) {
  return Canonicalize(tree, {});
}

StoppingTime StoppingTime::Root(const ScenarioTree& tree) {
  const NodeId root = tree.root();
  return Canonicalize(tree, std::span<const NodeId>(&root, 1));
}

std::optional<NodeId> StoppingTime::StopNodeAt(NodeId v) const {
  if (!tree_.contains(v)) throw TreeError("unknown node " + std::to_string(v), v);
  const NodeId s = stop_above_[v];
  if (s == kNone) return std::nullopt;
  return s;
}

bool StoppingTime::IsStopNode(NodeId v) const {
  return tree_.contains(v) && stop_above_[v] == v;
}

int StoppingTime::StopDepth(NodeId leaf) const {
  if (!tree_.contains(leaf) || !tree_.is_leaf(leaf)) {
    throw TreeError("node " + std::to_string(leaf) + " is not a leaf", leaf);
  }
  return tree_.depth(stop_above_[leaf]);
}

bool StoppingTime::operator==(const StoppingTime& other) const {
  return stop_set_ == other.stop_set_ && tree_.SameAs(other.tree_);
}

StoppingTime MinStop(const StoppingTime& sigma, const StoppingTime& tau) {
  CheckSameTree(sigma, tau);
  std::vector<NodeId> raw(sigma.stop_set().begin(), sigma.stop_set().end());
  raw.insert(raw.end(), tau.stop_set().begin(), tau.stop_set().end());
  return StoppingTime::Canonicalize(sigma.tree(), raw);
}

StoppingTime MinStop(std::span<const StoppingTime> times) {
  if (times.empty()) throw ShapeError("minimum of an empty set of stopping times");
  std::vector<NodeId> raw;
  for (const StoppingTime& t : times) {
    CheckSameTree(times.front(), t);
    raw.insert(raw.end(), t.stop_set().begin(), t.stop_set().end());
  }
  return StoppingTime::Canonicalize(times.front().tree(), raw);
}

bool Leq(const StoppingTime& sigma, const StoppingTime& tau) {
  CheckSameTree(sigma, tau);
  for (NodeId leaf : sigma.tree().leaves()) {
    if (sigma.StopDepth(leaf) > tau.StopDepth(leaf)) return false;
  }
  return true;
}

double ExpectAt(const ScenarioTree& tree, const AdaptedProcess& z,
                const StoppingTime& tau) {
  z.CheckShape(tree);
  if (!tree.SameAs(tau.tree())) {
    throw ShapeError("stopping time lives on a different tree");
  }
  double sum = 0.0;
  for (NodeId v : tau.stop_set()) sum += tree.node_prob(v) * z[v];
  return sum;
}

std::vector<int> LeafDepths(const StoppingTime& tau) {
  std::vector<int> depths;
  depths.reserve(tau.tree().leaves().size());
  for (NodeId leaf : tau.tree().leaves()) depths.push_back(tau.StopDepth(leaf));
  return depths;
}

std::uint64_t CountStoppingTimes(const ScenarioTree& tree) {
  return SubtreeCounts(tree)[tree.root()];
}

void ForEachStoppingTime(const ScenarioTree& tree,
                         const std::function<void(const StoppingTime&)>& visit,
                         std::uint64_t cap) {
  const auto count = SubtreeCounts(tree);
  const std::uint64_t total = count[tree.root()];
  if (total > cap) {
    throw EnumerationCapError(total, cap,
                              total == std::numeric_limits<std::uint64_t>::max());
  }
  std::vector<NodeId> raw;
  for (std::uint64_t index = 0; index < total; ++index) {
    raw.clear();
    DecodeStoppingTime(tree, count, tree.root(), index, raw);
    visit(StoppingTime::Canonicalize(tree, raw));
  }
}

std::vector<StoppingTime> EnumerateStoppingTimes(const ScenarioTree& tree,
                                                 std::uint64_t cap) {
  std::vector<StoppingTime> out;
  ForEachStoppingTime(
      tree, [&out](const StoppingTime& t) { out.push_back(t); }, cap);
  return out;
}

}  // namespace dynkin
