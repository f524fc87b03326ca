#include "cli.h"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "dynkin/io.h"
#include "dynkin/scheme.h"
#include "dynkin/verify.h"

namespace dynkin::cli {

namespace {

struct Options {
  std::string game;
  std::string profile;
  std::string report;
  std::string trace;
  std::string init_profile;
  std::string out;
  double strict_tol = 0.0;
  double tol = kDefaultNashTol;
  int max_rounds = 0;
  int player = 0;
  std::uint64_t cap = kDefaultEnumerationCap;
  int players = 3;
  int depth = 3;
  int branching = 2;
  std::uint64_t seed = 0;
  io::GenMode mode = io::GenMode::kStrict;
  double gap = 0.1;
  double touch_fraction = 0.2;
};

void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::WriteFileAtomic(path, text);
  }
}

int Validate(const Options& o, std::ostream& out) {
  const GameSpec spec = io::LoadGame(o.game);
  const AssumptionReport report = dynkin::Validate(spec, o.strict_tol);
  out << io::SerializeAssumptionReport(report);
  return report.passed() ? kOk : kValidation;
}

int Solve(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string text = io::ReadFile(o.game);
  const GameSpec spec = io::ParseGame(text);
  const AssumptionReport assumptions = dynkin::Validate(spec, o.strict_tol);
  if (!assumptions.passed()) {
    err << "error: game violates the payoff assumptions\n";
    out << io::SerializeAssumptionReport(assumptions);
    return kValidation;
  }

  SchemeState initial = Init(spec);
  if (!o.init_profile.empty()) {
    err << "warning: --init-profile is experimental; equilibrium convergence "
           "is only established for the horizon initialization\n";
    initial = InitFromProfile(spec, io::LoadProfile(o.init_profile, spec));
  }
  RunOptions run_options;
  run_options.max_rounds = o.max_rounds;
  RunResult run = Run(spec, std::move(initial), run_options);

  io::RunReport report{
      .input_digest = io::Digest(io::SerializeGame(spec)),
      .assumptions = assumptions,
      .candidate = run.candidate,
      .max_rounds = o.max_rounds > 0 ? o.max_rounds : DefaultMaxRounds(spec),
      .tol = o.tol,
      .audit = AuditIteration(run.state),
      .nash = VerifyNash(spec, run.candidate.strategies, o.tol),
      .streamline = VerifyStreamline(spec, run.candidate, o.tol),
      .residuals = ResidualYQ(spec, run.candidate),
      .trace_file = o.trace,
  };
  if (!o.trace.empty()) io::WriteFileAtomic(o.trace, io::TraceTable(run.state));
  Emit(io::SerializeRunReport(spec, report), o.report, out);

  if (!run.candidate.converged) {
    err << "error: scheme did not converge within " << report.max_rounds
        << " rounds\n";
    return kNonConvergence;
  }
  if (!report.certified()) {
    err << "error: certification failed (audit violations: "
        << report.audit.size() << ", nash: " << report.nash.is_nash
        << ", streamline: " << report.streamline.passed()
        << ", residual: " << report.residual_ok() << ")\n";
    return kCertification;
  }
  if (!o.report.empty()) {
    out << "converged in " << run.candidate.rounds_used
        << " rounds; equilibrium certified; report written to " << o.report
        << "\n";
  }
  return kOk;
}

int Verify(const Options& o, std::ostream& out, std::ostream& err) {
  const GameSpec spec = io::LoadGame(o.game);
  const Profile profile = io::LoadProfile(o.profile, spec);
  const NashCertificate nash = VerifyNash(spec, profile, o.tol);
  const EquilibriumCandidate candidate = EquilibriumCandidate::FromProfile(profile);
  const StreamlineCertificate streamline = VerifyStreamline(spec, candidate, o.tol);
  const std::vector<double> residuals = ResidualYQ(spec, candidate);

  std::ostringstream doc;
  doc.precision(17);
  doc << "{\n  \"nash\": ";
  std::string nash_json = io::SerializeNashCertificate(nash);
  nash_json.pop_back();
  for (char c : nash_json) {
    doc << c;
    if (c == '\n') doc << "  ";
  }
  doc << ",\n  \"streamline_ok\": " << (streamline.passed() ? "true" : "false")
      << ",\n  \"residual_yq\": [";
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    doc << (i ? ", " : "") << residuals[i];
  }
  doc << "]\n}\n";
  out << doc.str();
  if (!nash.is_nash) {
    for (std::size_t i = 0; i < nash.players.size(); ++i) {
      if (nash.players[i].gap > nash.tol) {
        err << "error: player " << i + 1 << " gains " << nash.players[i].gap
            << " by deviating (tol " << nash.tol << ")\n";
      }
    }
    return kCertification;
  }
  return kOk;
}

int Oracle(const Options& o, std::ostream& out) {
  const GameSpec spec = io::LoadGame(o.game);
  if (o.player < 1 || o.player > spec.players()) {
    throw ParseError("--player must lie in [1, " +
                         std::to_string(spec.players()) + "]",
                     std::nullopt, "--player");
  }
  const int i = o.player - 1;
  const Profile profile = io::LoadProfile(o.profile, spec);
  const Profile others = Others(profile, i);
  const BestResponse brute = BruteForceBestResponse(spec, i, others, o.cap);
  const BestResponse snell = ComputeBestResponse(spec, i, others);

  std::ostringstream doc;
  doc.precision(17);
  auto nodes = [](const StoppingTime& t) {
    std::ostringstream s;
    s << "[";
    for (std::size_t k = 0; k < t.stop_set().size(); ++k) {
      s << (k ? ", " : "") << t.stop_set()[k];
    }
    s << "]";
    return s.str();
  };
  doc << "{\n"
      << "  \"player\": " << o.player << ",\n"
      << "  \"stopping_times\": " << CountStoppingTimes(spec.tree()) << ",\n"
      << "  \"brute_force_value\": " << brute.value << ",\n"
      << "  \"brute_force_stop_nodes\": " << nodes(brute.argmax) << ",\n"
      << "  \"snell_value\": " << snell.value << ",\n"
      << "  \"snell_stop_nodes\": " << nodes(snell.argmax) << "\n"
      << "}\n";
  out << doc.str();
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Nash equilibria of N-player stopping games on scenario trees",
               "dynkin"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check the payoff assumptions");
  validate->add_option("game", o.game, "Game file")->required();
  validate->add_option("--strict-tol", o.strict_tol,
                       "Slack for the strict separation inequalities");

  auto* solve = app.add_subcommand(
      "solve", "Run the scheme, audit it and certify the limit profile");
  solve->add_option("game", o.game, "Game file")->required();
  solve->add_option("--max-rounds", o.max_rounds,
                    "Round budget (default N*#leaves*horizon+2)");
  solve->add_option("--tol", o.tol, "Certification tolerance");
  solve->add_option("--strict-tol", o.strict_tol,
                    "Slack for the strict separation inequalities");
  solve->add_option("--report", o.report, "Write the run report here");
  solve->add_option("--trace", o.trace, "Write the iteration trace (CSV) here");
  solve->add_option("--init-profile", o.init_profile,
                    "EXPERIMENTAL: start from this profile instead of the "
                    "horizon");

  auto* verify = app.add_subcommand("verify", "Certify an arbitrary profile");
  verify->add_option("game", o.game, "Game file")->required();
  verify->add_option("--profile", o.profile, "Profile or run report")->required();
  verify->add_option("--tol", o.tol, "Nash tolerance");

  auto* oracle = app.add_subcommand(
      "oracle", "Brute-force best response of one player");
  oracle->add_option("game", o.game, "Game file")->required();
  oracle->add_option("--player", o.player, "Player (1-based)")->required();
  oracle->add_option("--profile", o.profile, "Profile or run report")->required();
  oracle->add_option("--cap", o.cap, "Maximum number of stopping times");

  const std::map<std::string, io::GenMode> modes{
      {"strict", io::GenMode::kStrict}, {"touching", io::GenMode::kTouching}};
  auto* gen = app.add_subcommand("gen", "Generate a random valid game");
  gen->add_option("--players", o.players)->check(CLI::Range(2, 1 << 20));
  gen->add_option("--depth", o.depth)->check(CLI::Range(1, 1 << 20));
  gen->add_option("--branching", o.branching)->check(CLI::Range(1, 1 << 20));
  gen->add_option("--seed", o.seed);
  gen->add_option("--mode", o.mode)
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  gen->add_option("--gap", o.gap);
  gen->add_option("--touch-fraction", o.touch_fraction);
  gen->add_option("--out", o.out, "Output file (default stdout)");

  auto* demo = app.add_subcommand(
      "demo", "Constant game: leader 1/2, tie = follower = 1");
  demo->add_option("--players", o.players)->check(CLI::Range(2, 1 << 20));
  demo->add_option("--depth", o.depth)->check(CLI::Range(1, 1 << 20));
  demo->add_option("--branching", o.branching)->check(CLI::Range(1, 1 << 20));
  demo->add_option("--out", o.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kParse;
  }

  try {
    if (*validate) return Validate(o, out);
    if (*solve) return Solve(o, out, err);
    if (*verify) return Verify(o, out, err);
    if (*oracle) return Oracle(o, out);
    if (*gen) {
      io::GenOptions g{o.players, o.depth, o.branching, o.seed, o.mode, o.gap,
                       o.touch_fraction};
      Emit(io::SerializeGame(io::GenerateGame(g)), o.out, out);
      return kOk;
    }
    if (*demo) {
      Emit(io::SerializeGame(io::DemoConstant(o.players, o.depth, o.branching)),
           o.out, out);
      return kOk;
    }
  } catch (const EnumerationCapError& e) {
    err << "error: " << e.what() << "\n";
    return kCap;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const TreeError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::logic_error& e) {
    err << "error: internal invariant broken: " << e.what() << "\n";
    return kCertification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}

}  // namespace dynkin::cli
