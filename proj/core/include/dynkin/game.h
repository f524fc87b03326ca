#pragma once

// N-player nonzero-sum stopping game on a scenario tree.
//
// Player i is paid, depending on who stops first:
//   leader(i)   when i stops strictly before every other player,
//   tie(i)      when i stops together with the earliest other player,
//   follower(i) when another player stops strictly first (read at that time).
// Players are indexed 0..N-1 in this API.

#include <string>
#include <vector>

#include "dynkin/tree.h"

namespace dynkin {

class GameSpec {
 public:
  // Throws ShapeError on inconsistent shapes or fewer than two players.
  GameSpec(ScenarioTree tree, std::vector<AdaptedProcess> leader,
           std::vector<AdaptedProcess> tie, std::vector<AdaptedProcess> follower);

  const ScenarioTree& tree() const { return tree_; }
  int players() const { return static_cast<int>(leader_.size()); }

  const AdaptedProcess& leader(int i) const { return leader_.at(i); }
  const AdaptedProcess& tie(int i) const { return tie_.at(i); }
  const AdaptedProcess& follower(int i) const { return follower_.at(i); }

  void CheckPlayer(int i) const;
  void CheckProfile(std::span<const StoppingTime> profile) const;

 private:
  ScenarioTree tree_;
  std::vector<AdaptedProcess> leader_;
  std::vector<AdaptedProcess> tie_;
  std::vector<AdaptedProcess> follower_;
};

// leader <= tie <= follower fails at (player, node).
struct OrderingViolation {
  int player = 0;
  NodeId node = 0;
  double leader = 0.0;
  double tie = 0.0;
  double follower = 0.0;
};

// At a node before the horizon, `player` has tie < follower but `other` has
// leader >= follower.
struct SeparationViolation {
  int player = 0;
  int other = 0;
  NodeId node = 0;
  double tie_gap = 0.0;     // follower(player) - tie(player)
  double leader_gap = 0.0;  // follower(other) - leader(other)
};

struct AssumptionReport {
  std::vector<OrderingViolation> ordering_violations;
  std::vector<SeparationViolation> separation_violations;

  bool passed() const {
    return ordering_violations.empty() && separation_violations.empty();
  }
};

// Exhaustive nodewise check of the ordering leader <= tie <= follower and of
// the separation condition: wherever some player's tie payoff is strictly
// below its follower payoff before the horizon, every player's leader payoff
// is strictly below its follower payoff. Strictness means gap > strict_tol.
AssumptionReport Validate(const GameSpec& spec, double strict_tol = 0.0);

// follower(i) before the horizon, tie(i) at the leaves: the value a player
// collects when someone else's stop freezes the game.
AdaptedProcess FrozenPayoff(const GameSpec& spec, int i);

// leader(i) strictly before `theta`; afterwards, FrozenPayoff(i) read at the
// theta-stop node, propagated to all of its descendants.
AdaptedProcess SchemeObstacle(const GameSpec& spec, int i,
                              const StoppingTime& theta);

// J_i(profile), evaluated leafwise.
double Payoff(const GameSpec& spec, int i, std::span<const StoppingTime> profile);

// Process H with E[H_tau] = J_i(others with tau inserted at position i):
// leader(i) strictly before R, tie(i) at R-stop nodes, follower(i) frozen at
// the R-stop node afterwards, where R is the minimum of `others`.
AdaptedProcess BestResponseProcess(const GameSpec& spec, int i,
                                   std::span<const StoppingTime> others);

// The N-1 stopping times of every player except i.
Profile Others(std::span<const StoppingTime> profile, int i);

// `others` with `own` inserted at position i.
Profile WithPlayer(std::span<const StoppingTime> others, int i,
                   const StoppingTime& own);

}  // namespace dynkin
