#pragma once

#include "dynkin/tree.h"

namespace dynkin {

// Tolerance of the "envelope equals source" test in backward induction.
inline constexpr double kDefaultEqTol = 1e-9;

struct SnellResult {
  AdaptedProcess envelope;
  StoppingTime first_hit;
  double root_value = 0.0;
};

// Smallest supermartingale dominating `source`, computed children-first:
//   W(leaf) = U(leaf),  W(v) = max(U(v), sum_c p(c) W(c)).
// A node counts as a hit when U(v) >= continuation - eq_tol; W(v) is then set
// to U(v) exactly, so first_hit and dominance agree bitwise.
SnellResult SnellEnvelope(const ScenarioTree& tree, const AdaptedProcess& source,
                          double eq_tol = kDefaultEqTol);

// Z(v) >= E[Z | v] - tol at every internal node strictly before `bound`.
bool IsSupermartingaleBefore(const ScenarioTree& tree, const AdaptedProcess& z,
                             const StoppingTime& bound, double tol);

// |Z(v) - E[Z | v]| <= tol at every internal node strictly before `bound`.
bool IsMartingaleBefore(const ScenarioTree& tree, const AdaptedProcess& z,
                        const StoppingTime& bound, double tol);

// sum_c p(c) Z(c) for an internal node.
double Continuation(const ScenarioTree& tree, const AdaptedProcess& z, NodeId v);

}  // namespace dynkin
