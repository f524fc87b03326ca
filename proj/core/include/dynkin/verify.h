#pragma once

// Independent certification of stopping profiles.

#include <cstdint>
#include <vector>

#include "dynkin/game.h"
#include "dynkin/scheme.h"

namespace dynkin {

inline constexpr double kDefaultNashTol = 1e-9;
inline constexpr double kBruteForceTieTol = 1e-12;

struct BestResponse {
  double value = 0.0;
  StoppingTime argmax;
};

// Optimal stopping against fixed opponents: Snell envelope of
// BestResponseProcess; argmax is the first hitting time.
BestResponse ComputeBestResponse(const GameSpec& spec, int i,
                                 std::span<const StoppingTime> others,
                                 double eq_tol = kDefaultEqTol);

// Same quantity by exhaustive search over every stopping time, evaluating
// Payoff directly. Among maximizers (within tie_tol of the best value) the
// argmax is their pointwise minimum.
BestResponse BruteForceBestResponse(const GameSpec& spec, int i,
                                    std::span<const StoppingTime> others,
                                    std::uint64_t cap = kDefaultEnumerationCap,
                                    double tie_tol = kBruteForceTieTol);

struct PlayerNash {
  double payoff = 0.0;
  double best_response_value = 0.0;
  double gap = 0.0;  // best_response_value - payoff
  StoppingTime best_response_time;
};

struct NashCertificate {
  std::vector<PlayerNash> players;
  bool is_nash = false;
  double tol = kDefaultNashTol;

  double max_gap() const;
};

NashCertificate VerifyNash(const GameSpec& spec,
                           std::span<const StoppingTime> profile,
                           double tol = kDefaultNashTol);

struct PlayerStreamline {
  bool martingale_ok = false;       // W stopped at the first stop is a martingale
  bool supermartingale_ok = false;  // W stopped at the rivals' stop is a supermartingale
  bool dominance_ok = false;        // W >= leader before the rivals' stop
  bool hit_equality_ok = false;     // W = leader where the player stops first
  bool boundary_ok = false;         // W = follower (tie at horizon) at the rivals' stop
  bool residual_ok = false;         // follower = tie where player and rivals stop together
  AdaptedProcess witness;

  bool passed() const {
    return martingale_ok && supermartingale_ok && dominance_ok &&
           hit_equality_ok && boundary_ok && residual_ok;
  }
};

struct StreamlineCertificate {
  std::vector<PlayerStreamline> players;
  double tol = kDefaultNashTol;

  bool passed() const;
};

// Builds W^i as the Snell envelope of SchemeObstacle(i, rival_stops[i]) and
// checks the sufficient conditions for the candidate to be an equilibrium
// with J_i = W^i(root).
StreamlineCertificate VerifyStreamline(const GameSpec& spec,
                                       const EquilibriumCandidate& candidate,
                                       double tol = kDefaultNashTol,
                                       double eq_tol = kDefaultEqTol);

// Per player, E[(follower - tie) at the player's stop; on paths where the
// player and the earliest rival stop together before the horizon].
std::vector<double> ResidualYQ(const GameSpec& spec,
                               const EquilibriumCandidate& candidate);

struct DeviationAuditResult {
  std::size_t checked = 0;     // (record, deviation) pairs evaluated
  std::size_t violations = 0;
  double max_excess = 0.0;     // largest lhs - rhs seen (negative when slack)
};

// For every trace record (player i at step n) and every stopping time sigma:
//   J_i(profile_n with sigma) <= J_i(profile_n with tau_n)
//                                + E[(follower - tie)(tau_n); tau_n = theta_n < T]
// where profile_n holds the other players' stops at step n.
DeviationAuditResult AuditDeviationBound(const GameSpec& spec,
                                     const SchemeState& state, double tol,
                                     std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace dynkin
