#include "dynkin/game.h"

#include <string>

namespace dynkin {

namespace {

void CheckProcesses(const ScenarioTree& tree,
                    const std::vector<AdaptedProcess>& processes,
                    std::size_t players, const char* name) {
  if (processes.size() != players) {
    throw ShapeError(std::string(name) + " has " +
                     std::to_string(processes.size()) + " players, expected " +
                     std::to_string(players));
  }
  for (const AdaptedProcess& p : processes) p.CheckShape(tree);
}

// Earliest stop node among `times` on the path of `leaf`.
NodeId EarliestStopNode(std::span<const StoppingTime> times, NodeId leaf) {
  const ScenarioTree& tree = times.front().tree();
  NodeId best = *times.front().StopNodeAt(leaf);
  for (const StoppingTime& t : times.subspan(1)) {
    const NodeId s = *t.StopNodeAt(leaf);
    if (tree.depth(s) < tree.depth(best)) best = s;
  }
  return best;
}

}  // namespace

GameSpec::GameSpec(ScenarioTree tree, std::vector<AdaptedProcess> leader,
                   std::vector<AdaptedProcess> tie,
                   std::vector<AdaptedProcess> follower)
    : tree_(std::move(tree)),
      leader_(std::move(leader)),
      tie_(std::move(tie)),
      follower_(std::move(follower)) {
  if (leader_.size() < 2) {
    throw ShapeError("a game needs at least two players, got " +
                     std::to_string(leader_.size()));
  }
  CheckProcesses(tree_, leader_, leader_.size(), "X");
  CheckProcesses(tree_, tie_, leader_.size(), "Q");
  CheckProcesses(tree_, follower_, leader_.size(), "Y");
}

void GameSpec::CheckPlayer(int i) const {
  if (i < 0 || i >= players()) {
    throw ShapeError("player index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(players()) + ")");
  }
}

void GameSpec::CheckProfile(std::span<const StoppingTime> profile) const {
  if (profile.size() != static_cast<std::size_t>(players())) {
    throw ShapeError("profile has " + std::to_string(profile.size()) +
                     " stopping times, expected " + std::to_string(players()));
  }
  for (const StoppingTime& t : profile) {
    if (!t.tree().SameAs(tree_)) {
      throw ShapeError("profile stopping time lives on a different tree");
    }
  }
}

AssumptionReport Validate(const GameSpec& spec, double strict_tol) {
  const ScenarioTree& tree = spec.tree();
  const int n = spec.players();
  AssumptionReport report;
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    for (int i = 0; i < n; ++i) {
      const double x = spec.leader(i)[v];
      const double q = spec.tie(i)[v];
      const double y = spec.follower(i)[v];
      if (!(x <= q && q <= y)) report.ordering_violations.push_back({i, v, x, q, y});
    }
    if (tree.depth(v) >= tree.horizon()) continue;
    for (int i = 0; i < n; ++i) {
      const double tie_gap = spec.follower(i)[v] - spec.tie(i)[v];
      if (!(tie_gap > strict_tol)) continue;
      for (int j = 0; j < n; ++j) {
        const double leader_gap = spec.follower(j)[v] - spec.leader(j)[v];
        if (!(leader_gap > strict_tol)) {
          report.separation_violations.push_back({i, j, v, tie_gap, leader_gap});
        }
      }
    }
  }
  return report;
}

AdaptedProcess FrozenPayoff(const GameSpec& spec, int i) {
  spec.CheckPlayer(i);
  const ScenarioTree& tree = spec.tree();
  std::vector<double> values(tree.size());
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    values[v] = tree.depth(v) < tree.horizon() ? spec.follower(i)[v]
                                               : spec.tie(i)[v];
  }
  return AdaptedProcess(std::move(values));
}

AdaptedProcess SchemeObstacle(const GameSpec& spec, int i,
                              const StoppingTime& theta) {
  spec.CheckPlayer(i);
  const ScenarioTree& tree = spec.tree();
  if (!theta.tree().SameAs(tree)) {
    throw ShapeError("theta lives on a different tree");
  }
  const AdaptedProcess frozen = FrozenPayoff(spec, i);
  std::vector<double> values(tree.size());
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    const auto stop = theta.StopNodeAt(v);
    values[v] = stop ? frozen[*stop] : spec.leader(i)[v];
  }
  return AdaptedProcess(std::move(values));
}

double Payoff(const GameSpec& spec, int i, std::span<const StoppingTime> profile) {
  spec.CheckPlayer(i);
  spec.CheckProfile(profile);
  const ScenarioTree& tree = spec.tree();
  const Profile others = Others(profile, i);
  double total = 0.0;
  for (NodeId leaf : tree.leaves()) {
    const NodeId own = *profile[i].StopNodeAt(leaf);
    const NodeId rival = EarliestStopNode(others, leaf);
    const int own_t = tree.depth(own);
    const int rival_t = tree.depth(rival);
    double value;
    if (own_t < rival_t) {
      value = spec.leader(i)[own];
    } else if (own_t == rival_t) {
      value = spec.tie(i)[own];
    } else {
      value = spec.follower(i)[rival];
    }
    total += tree.node_prob(leaf) * value;
  }
  return total;
}

AdaptedProcess BestResponseProcess(const GameSpec& spec, int i,
                                   std::span<const StoppingTime> others) {
  spec.CheckPlayer(i);
  if (others.size() + 1 != static_cast<std::size_t>(spec.players())) {
    throw ShapeError("expected " + std::to_string(spec.players() - 1) +
                     " opponent stopping times, got " +
                     std::to_string(others.size()));
  }
  const ScenarioTree& tree = spec.tree();
  const StoppingTime rival = MinStop(others);
  if (!rival.tree().SameAs(tree)) {
    throw ShapeError("opponent stopping times live on a different tree");
  }
  std::vector<double> values(tree.size());
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    const auto stop = rival.StopNodeAt(v);
    if (!stop) {
      values[v] = spec.leader(i)[v];
    } else if (*stop == v) {
      values[v] = spec.tie(i)[v];
    } else {
      values[v] = spec.follower(i)[*stop];
    }
  }
  return AdaptedProcess(std::move(values));
}

Profile Others(std::span<const StoppingTime> profile, int i) {
  Profile others;
  others.reserve(profile.size() - 1);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (static_cast<int>(j) != i) others.push_back(profile[j]);
  }
  return others;
}

Profile WithPlayer(std::span<const StoppingTime> others, int i,
                   const StoppingTime& own) {
  Profile profile(others.begin(), others.end());
  profile.insert(profile.begin() + i, own);
  return profile;
}

}  // namespace dynkin
