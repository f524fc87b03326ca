#include "dynkin/snell.h"

#include <cmath>
#include <vector>

namespace dynkin {

double Continuation(const ScenarioTree& tree, const AdaptedProcess& z,
                    NodeId v) {
  double sum = 0.0;
  for (NodeId c : tree.children(v)) sum += tree.cond_prob(c) * z[c];
  return sum;
}

SnellResult SnellEnvelope(const ScenarioTree& tree, const AdaptedProcess& source,
                          double eq_tol) {
  source.CheckShape(tree);
  const auto k = static_cast<NodeId>(tree.size());
  std::vector<double> w(tree.size());
  std::vector<NodeId> hits;
  // Ids are topologically ordered, so descending ids visit children first.
  for (NodeId v = k - 1; v >= 0; --v) {
    if (tree.is_leaf(v)) {
      w[v] = source[v];
      hits.push_back(v);
      continue;
    }
    double continuation = 0.0;
    for (NodeId c : tree.children(v)) continuation += tree.cond_prob(c) * w[c];
    if (source[v] >= continuation - eq_tol) {
      w[v] = source[v];
      hits.push_back(v);
    } else {
      w[v] = continuation;
    }
  }
  SnellResult result{AdaptedProcess(std::move(w)),
                     StoppingTime::Canonicalize(tree, hits), 0.0};
  result.root_value = result.envelope[tree.root()];
  return result;
}

namespace {

template <typename Check>
bool AllBefore(const ScenarioTree& tree, const AdaptedProcess& z,
               const StoppingTime& bound, Check check) {
  z.CheckShape(tree);
  if (!tree.SameAs(bound.tree())) {
    throw ShapeError("bound lives on a different tree");
  }
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    if (tree.is_leaf(v) || !bound.IsBefore(v)) continue;
    if (!check(z[v], Continuation(tree, z, v))) return false;
  }
  return true;
}

}  // namespace

bool IsSupermartingaleBefore(const ScenarioTree& tree, const AdaptedProcess& z,
                             const StoppingTime& bound, double tol) {
  return AllBefore(tree, z, bound, [tol](double value, double continuation) {
    return value >= continuation - tol;
  });
}

bool IsMartingaleBefore(const ScenarioTree& tree, const AdaptedProcess& z,
                        const StoppingTime& bound, double tol) {
  return AllBefore(tree, z, bound, [tol](double value, double continuation) {
    return std::abs(value - continuation) <= tol;
  });
}

}  // namespace dynkin
