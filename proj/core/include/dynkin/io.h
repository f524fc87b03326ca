#pragma once

// Game files, profile files, run reports, trace tables and game generators.
// Document layouts are described in docs/format.md.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dynkin/game.h"
#include "dynkin/scheme.h"
#include "dynkin/verify.h"

namespace dynkin::io {

// Structural tree errors surface as TreeError, document errors as ParseError.
// Neither checks the payoff ordering assumptions (see Validate).
GameSpec ParseGame(std::string_view text);
GameSpec LoadGame(const std::filesystem::path& path);
std::string SerializeGame(const GameSpec& spec);
void SaveGame(const GameSpec& spec, const std::filesystem::path& path);

// Accepts a profile document or a run report (its per-player stop nodes).
// Stop sets are canonicalized on load.
Profile ParseProfile(std::string_view text, const GameSpec& spec);
Profile LoadProfile(const std::filesystem::path& path, const GameSpec& spec);
std::string SerializeProfile(std::span<const StoppingTime> profile);

enum class GenMode { kStrict, kTouching };

struct GenOptions {
  int players = 3;
  int depth = 3;
  int branching = 2;
  std::uint64_t seed = 0;
  GenMode mode = GenMode::kStrict;
  double gap = 0.1;             // minimum leader/tie and tie/follower gap
  double touch_fraction = 0.2;  // touching mode: share of nodes with tie = follower
};

// Deterministic in the options. Output always passes Validate().
GameSpec GenerateGame(const GenOptions& options);

// leader = 1/2 and tie = follower = 1 everywhere on a uniform tree.
GameSpec DemoConstant(int players, int depth, int branching);

struct RunReport {
  std::string input_digest;
  AssumptionReport assumptions;
  EquilibriumCandidate candidate;
  int max_rounds = 0;
  double tol = kDefaultNashTol;
  std::vector<AuditViolation> audit;
  NashCertificate nash;
  StreamlineCertificate streamline;
  std::vector<double> residuals;
  std::string trace_file;  // empty when no trace was written

  bool residual_ok() const;
  bool certified() const;
};

std::string SerializeAssumptionReport(const AssumptionReport& report);
std::string SerializeNashCertificate(const NashCertificate& cert);
std::string SerializeRunReport(const GameSpec& spec, const RunReport& report);

// CSV with header n,player,E_W0 followed by per-leaf stop depths of theta,
// mu and tau (columns theta_<leaf>, mu_<leaf>, tau_<leaf>).
std::string TraceTable(const SchemeState& state);

// "sha256:<hex>" of the bytes.
std::string Digest(std::string_view bytes);

std::string ReadFile(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

}  // namespace dynkin::io
