#include "dynkin/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynkin {

BestResponse ComputeBestResponse(const GameSpec& spec, int i,
                                 std::span<const StoppingTime> others,
                                 double eq_tol) {
  const AdaptedProcess h = BestResponseProcess(spec, i, others);
  SnellResult snell = SnellEnvelope(spec.tree(), h, eq_tol);
  return BestResponse{snell.root_value, std::move(snell.first_hit)};
}

BestResponse BruteForceBestResponse(const GameSpec& spec, int i,
                                    std::span<const StoppingTime> others,
                                    std::uint64_t cap, double tie_tol) {
  spec.CheckPlayer(i);
  std::vector<std::pair<double, StoppingTime>> scored;
  double best = -std::numeric_limits<double>::infinity();
  ForEachStoppingTime(
      spec.tree(),
      [&](const StoppingTime& tau) {
        const double value = Payoff(spec, i, WithPlayer(others, i, tau));
        best = std::max(best, value);
        scored.emplace_back(value, tau);
      },
      cap);
  std::vector<StoppingTime> maximizers;
  for (auto& [value, tau] : scored) {
    if (value >= best - tie_tol) maximizers.push_back(std::move(tau));
  }
  return BestResponse{best, MinStop(maximizers)};
}

double NashCertificate::max_gap() const {
  double gap = -std::numeric_limits<double>::infinity();
  for (const PlayerNash& p : players) gap = std::max(gap, p.gap);
  return gap;
}

NashCertificate VerifyNash(const GameSpec& spec,
                           std::span<const StoppingTime> profile, double tol) {
  spec.CheckProfile(profile);
  NashCertificate cert{{}, true, tol};
  for (int i = 0; i < spec.players(); ++i) {
    const double payoff = Payoff(spec, i, profile);
    const Profile others = Others(profile, i);
    BestResponse br = ComputeBestResponse(spec, i, others);
    // Same summation as the payoff, so an unchanged best response has gap 0.
    const double value = Payoff(spec, i, WithPlayer(others, i, br.argmax));
    const double gap = value - payoff;
    cert.players.push_back({payoff, value, gap, std::move(br.argmax)});
    if (!(gap <= tol)) cert.is_nash = false;
  }
  return cert;
}

bool StreamlineCertificate::passed() const {
  return std::all_of(players.begin(), players.end(),
                     [](const PlayerStreamline& p) { return p.passed(); });
}

StreamlineCertificate VerifyStreamline(const GameSpec& spec,
                                       const EquilibriumCandidate& candidate,
                                       double tol, double eq_tol) {
  spec.CheckProfile(candidate.strategies);
  const ScenarioTree& tree = spec.tree();
  const auto nodes = static_cast<NodeId>(tree.size());
  StreamlineCertificate cert{{}, tol};
  for (int i = 0; i < spec.players(); ++i) {
    const StoppingTime& own = candidate.strategies[i];
    const StoppingTime& rival = candidate.rival_stops[i];
    const AdaptedProcess& leader = spec.leader(i);
    const AdaptedProcess& tie = spec.tie(i);
    const AdaptedProcess& follower = spec.follower(i);

    PlayerStreamline p;
    p.witness = SnellEnvelope(tree, SchemeObstacle(spec, i, rival), eq_tol).envelope;
    const AdaptedProcess& w = p.witness;

    p.martingale_ok = IsMartingaleBefore(tree, w, candidate.first_stop, tol);
    p.supermartingale_ok = IsSupermartingaleBefore(tree, w, rival, tol);

    p.dominance_ok = true;
    p.hit_equality_ok = true;
    p.boundary_ok = true;
    p.residual_ok = true;
    for (NodeId v = 0; v < nodes; ++v) {
      const bool before_rival = rival.IsBefore(v);
      if (before_rival && w[v] < leader[v] - tol) p.dominance_ok = false;
      if (before_rival && own.IsStopNode(v) &&
          std::abs(w[v] - leader[v]) > tol) {
        p.hit_equality_ok = false;
      }
      if (rival.IsStopNode(v)) {
        const bool at_horizon = tree.depth(v) == tree.horizon();
        const double target = at_horizon ? tie[v] : follower[v];
        if (std::abs(w[v] - target) > tol) p.boundary_ok = false;
        if (!at_horizon && own.IsStopNode(v) &&
            std::abs(follower[v] - tie[v]) > tol) {
          p.residual_ok = false;
        }
      }
    }
    cert.players.push_back(std::move(p));
  }
  return cert;
}

std::vector<double> ResidualYQ(const GameSpec& spec,
                               const EquilibriumCandidate& candidate) {
  spec.CheckProfile(candidate.strategies);
  const ScenarioTree& tree = spec.tree();
  std::vector<double> residuals;
  for (int i = 0; i < spec.players(); ++i) {
    const StoppingTime& own = candidate.strategies[i];
    const StoppingTime& rival = candidate.rival_stops[i];
    double sum = 0.0;
    for (NodeId leaf : tree.leaves()) {
      const int t = own.StopDepth(leaf);
      if (t != rival.StopDepth(leaf) || t >= tree.horizon()) continue;
      const NodeId v = *own.StopNodeAt(leaf);
      sum += tree.node_prob(leaf) * (spec.follower(i)[v] - spec.tie(i)[v]);
    }
    residuals.push_back(sum);
  }
  return residuals;
}

DeviationAuditResult AuditDeviationBound(const GameSpec& spec,
                                     const SchemeState& state, double tol,
                                     std::uint64_t cap) {
  const ScenarioTree& tree = spec.tree();
  const std::vector<StoppingTime> deviations = EnumerateStoppingTimes(tree, cap);
  DeviationAuditResult result;
  result.max_excess = -std::numeric_limits<double>::infinity();
  for (const TraceRecord& r : state.trace()) {
    const int i = r.player;
    const Profile others = Others(r.profile, i);
    double slack = 0.0;
    for (NodeId leaf : tree.leaves()) {
      const int t = r.tau.StopDepth(leaf);
      if (t != r.theta.StopDepth(leaf) || t >= tree.horizon()) continue;
      const NodeId v = *r.tau.StopNodeAt(leaf);
      slack += tree.node_prob(leaf) * (spec.follower(i)[v] - spec.tie(i)[v]);
    }
    const double bound = Payoff(spec, i, WithPlayer(others, i, r.tau)) + slack;
    for (const StoppingTime& sigma : deviations) {
      const double excess = Payoff(spec, i, WithPlayer(others, i, sigma)) - bound;
      ++result.checked;
      result.max_excess = std::max(result.max_excess, excess);
      if (excess > tol) ++result.violations;
    }
  }
  return result;
}

}  // namespace dynkin
