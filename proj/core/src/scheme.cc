#include "dynkin/scheme.h"

#include <sstream>
#include <stdexcept>

namespace dynkin {

namespace {

std::string DepthsToString(const std::vector<int>& depths) {
  std::ostringstream out;
  for (std::size_t k = 0; k < depths.size(); ++k) {
    out << (k ? " " : "") << depths[k];
  }
  return out.str();
}

}  // namespace

SchemeState Init(const GameSpec& spec) {
  return InitFromProfile(
      spec, Profile(spec.players(), StoppingTime::Horizon(spec.tree())));
}

SchemeState InitFromProfile(const GameSpec& spec, Profile profile) {
  spec.CheckProfile(profile);
  SchemeState state;
  state.n_ = spec.players();
  state.current_ = std::move(profile);
  return state;
}

SchemeState Step(SchemeState state, const GameSpec& spec, double eq_tol) {
  const int players = spec.players();
  const int n = state.n_ + 1;
  const int i = (n - 1) % players;

  const StoppingTime& previous = state.current_[i];
  StoppingTime theta = MinStop(Others(state.current_, i));
  AdaptedProcess obstacle = SchemeObstacle(spec, i, theta);
  SnellResult snell = SnellEnvelope(spec.tree(), obstacle, eq_tol);

  // On paths where mu ^ tau_old stops strictly before theta take that node,
  // elsewhere keep tau_old. Both candidates sit on a path at or above the
  // tau_old node, so canonicalizing the union picks the right one.
  const StoppingTime early = MinStop(snell.first_hit, previous);
  std::vector<NodeId> raw(previous.stop_set().begin(), previous.stop_set().end());
  for (NodeId v : early.stop_set()) {
    if (theta.IsBefore(v)) raw.push_back(v);
  }
  StoppingTime tau = StoppingTime::Canonicalize(spec.tree(), raw);

  TraceRecord record{
      .n = n,
      .player = i,
      .profile = state.current_,
      .theta = std::move(theta),
      .mu = std::move(snell.first_hit),
      .tau = tau,
      .previous_tau = previous,
      .obstacle = std::move(obstacle),
      .envelope = std::move(snell.envelope),
      .root_value = snell.root_value,
  };
  state.trace_.push_back(std::move(record));
  state.current_[i] = std::move(tau);
  state.n_ = n;
  return state;
}

EquilibriumCandidate EquilibriumCandidate::FromProfile(Profile strategies) {
  if (strategies.size() < 2) {
    throw ShapeError("an equilibrium candidate needs at least two players");
  }
  Profile rivals;
  rivals.reserve(strategies.size());
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    rivals.push_back(MinStop(Others(strategies, static_cast<int>(i))));
  }
  StoppingTime first = MinStop(strategies);
  return EquilibriumCandidate{std::move(strategies), std::move(rivals),
                              std::move(first), 0, false};
}

int DefaultMaxRounds(const GameSpec& spec) {
  return spec.players() * static_cast<int>(spec.tree().leaves().size()) *
             spec.tree().horizon() +
         2;
}

RunResult Run(const GameSpec& spec, const RunOptions& options) {
  return Run(spec, Init(spec), options);
}

RunResult Run(const GameSpec& spec, SchemeState state,
              const RunOptions& options) {
  const int max_rounds =
      options.max_rounds > 0 ? options.max_rounds : DefaultMaxRounds(spec);
  const int players = spec.players();
  int rounds = 0;
  bool converged = false;
  while (rounds < max_rounds && !converged) {
    const Profile before = state.current();
    for (int k = 0; k < players; ++k) {
      state = Step(std::move(state), spec, options.eq_tol);
    }
    ++rounds;
    converged = true;
    for (int i = 0; i < players; ++i) {
      if (!Leq(state.current()[i], before[i])) {
        throw std::logic_error(
            "scheme iterate increased for player " + std::to_string(i + 1) +
            " in round " + std::to_string(rounds));
      }
      if (!(state.current()[i] == before[i])) converged = false;
    }
  }
  EquilibriumCandidate candidate =
      EquilibriumCandidate::FromProfile(state.current());
  candidate.rounds_used = rounds;
  candidate.converged = converged;
  return RunResult{std::move(candidate), std::move(state)};
}

std::string ToString(AuditCheck check) {
  switch (check) {
    case AuditCheck::kMuBeforeTheta:
      return "mu_before_theta";
    case AuditCheck::kTauNonIncreasing:
      return "tau_non_increasing";
    case AuditCheck::kMuIsMinimum:
      return "mu_is_min_tau_theta";
    case AuditCheck::kTauUpdateForm:
      return "tau_update_form";
    case AuditCheck::kEnvelopeFrozen:
      return "envelope_frozen_after_theta";
    case AuditCheck::kNextMuBeforeTau:
      return "next_mu_before_tau";
  }
  return "unknown";
}

std::vector<AuditViolation> AuditIteration(const SchemeState& state) {
  std::vector<AuditViolation> violations;
  const auto& trace = state.trace();
  const std::size_t players = static_cast<std::size_t>(state.players());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const TraceRecord& r = trace[k];
    const ScenarioTree& tree = r.tau.tree();
    auto report = [&](AuditCheck check, std::string detail) {
      violations.push_back({r.n, check, std::move(detail)});
    };

    if (!Leq(r.mu, r.theta)) {
      report(AuditCheck::kMuBeforeTheta,
             "mu " + DepthsToString(LeafDepths(r.mu)) + " theta " +
                 DepthsToString(LeafDepths(r.theta)));
    }
    if (!Leq(r.tau, r.previous_tau)) {
      report(AuditCheck::kTauNonIncreasing,
             "tau " + DepthsToString(LeafDepths(r.tau)) + " previous " +
                 DepthsToString(LeafDepths(r.previous_tau)));
    }
    if (!(r.mu == MinStop(r.tau, r.theta))) {
      report(AuditCheck::kMuIsMinimum,
             "mu " + DepthsToString(LeafDepths(r.mu)) + " tau^theta " +
                 DepthsToString(LeafDepths(MinStop(r.tau, r.theta))));
    }

    const auto mu = LeafDepths(r.mu);
    const auto theta = LeafDepths(r.theta);
    const auto previous = LeafDepths(r.previous_tau);
    const auto tau = LeafDepths(r.tau);
    for (std::size_t l = 0; l < tau.size(); ++l) {
      const int expected = mu[l] < theta[l] ? mu[l] : previous[l];
      if (tau[l] != expected) {
        report(AuditCheck::kTauUpdateForm,
               "leaf " + std::to_string(tree.leaves()[l]) + ": tau depth " +
                   std::to_string(tau[l]) + ", expected " +
                   std::to_string(expected));
        break;
      }
    }

    for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
      if (r.theta.IsBefore(v)) continue;
      if (r.envelope[v] != r.obstacle[v]) {
        std::ostringstream detail;
        detail.precision(17);
        detail << "node " << v << ": W " << r.envelope[v] << " U "
               << r.obstacle[v];
        report(AuditCheck::kEnvelopeFrozen, detail.str());
        break;
      }
    }

    if (k + players < trace.size() && !Leq(trace[k + players].mu, r.tau)) {
      report(AuditCheck::kNextMuBeforeTau,
             "mu_{n+N} " + DepthsToString(LeafDepths(trace[k + players].mu)) +
                 " tau " + DepthsToString(tau));
    }
  }
  return violations;
}

}  // namespace dynkin
