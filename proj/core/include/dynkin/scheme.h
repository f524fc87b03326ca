#pragma once

// Cyclic approximating scheme for the equilibrium stopping profile.
//
// Every player starts at the horizon. Step n = N q + i (1 <= i <= N) updates
// player i: theta is the earliest current stop among the other players, the
// obstacle is leader(i) before theta and the frozen payoff from theta on, mu
// is the first hitting time of its Snell envelope, and on each path the new
// stop is mu ^ tau_old when that comes strictly before theta, tau_old
// otherwise. Stop depths never increase, so the scheme reaches a fixed point
// after finitely many rounds.

#include <string>
#include <vector>

#include "dynkin/game.h"
#include "dynkin/snell.h"

namespace dynkin {

struct TraceRecord {
  int n = 0;       // flat step index, first update has n = N + 1
  int player = 0;  // 0-based; n = N q + (player + 1)
  Profile profile;  // every player's stop just before this step
  StoppingTime theta;
  StoppingTime mu;
  StoppingTime tau;
  StoppingTime previous_tau;  // same player's previous iterate
  AdaptedProcess obstacle;
  AdaptedProcess envelope;
  double root_value = 0.0;  // E[W_0]
};

class SchemeState {
 public:
  int n() const { return n_; }
  int players() const { return static_cast<int>(current_.size()); }
  const Profile& current() const { return current_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  friend SchemeState Init(const GameSpec& spec);
  friend SchemeState InitFromProfile(const GameSpec& spec, Profile profile);
  friend SchemeState Step(SchemeState state, const GameSpec& spec,
                          double eq_tol);

  int n_ = 0;
  Profile current_;
  std::vector<TraceRecord> trace_;
};

// All players stop at the horizon; n = N.
SchemeState Init(const GameSpec& spec);

// Experimental: starts the scheme from an arbitrary profile. Convergence to an
// equilibrium is not covered by theory for anything but Init().
SchemeState InitFromProfile(const GameSpec& spec, Profile profile);

// One update of the next player in cyclic order.
SchemeState Step(SchemeState state, const GameSpec& spec,
                 double eq_tol = kDefaultEqTol);

struct EquilibriumCandidate {
  Profile strategies;    // limit stop of each player
  Profile rival_stops;   // per player, minimum over the other players
  StoppingTime first_stop;  // minimum over all players
  int rounds_used = 0;
  bool converged = false;

  static EquilibriumCandidate FromProfile(Profile strategies);
};

struct RunOptions {
  int max_rounds = 0;  // 0 selects DefaultMaxRounds
  double eq_tol = kDefaultEqTol;
};

struct RunResult {
  EquilibriumCandidate candidate;
  SchemeState state;
};

// N * #leaves * horizon + 2: every strict decrease lowers one of N * #leaves
// integer stop depths in [0, horizon], plus the round that detects stationarity.
int DefaultMaxRounds(const GameSpec& spec);

// Runs full rounds until one leaves every stop unchanged or the round budget
// is spent. Throws std::logic_error if a stop depth ever increases.
RunResult Run(const GameSpec& spec, const RunOptions& options = {});
RunResult Run(const GameSpec& spec, SchemeState initial,
              const RunOptions& options = {});

enum class AuditCheck {
  kMuBeforeTheta,       // mu_n <= theta_n
  kTauNonIncreasing,    // tau_n <= tau_{n-N}
  kMuIsMinimum,         // mu_n = tau_n ^ theta_n
  kTauUpdateForm,       // tau_n = mu_n on {mu_n < theta_n}, tau_{n-N} elsewhere
  kEnvelopeFrozen,      // W^n = U^n at and after theta_n
  kNextMuBeforeTau,     // mu_{n+N} <= tau_n
};

struct AuditViolation {
  int n = 0;
  AuditCheck check = AuditCheck::kMuBeforeTheta;
  std::string detail;
};

std::string ToString(AuditCheck check);

// Checks every trace record against the relations the scheme's iterates must
// satisfy. Returns an empty list when all hold.
std::vector<AuditViolation> AuditIteration(const SchemeState& state);

}  // namespace dynkin
