#include "dynkin/io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

namespace dynkin::io {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kGameFormat = "dynkin-game/1";
constexpr const char* kProfileFormat = "dynkin-profile/1";
constexpr const char* kReportFormat = "dynkin-run-report/1";

int LineOfByte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const int line = LineOfByte(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("line " + std::to_string(line) + ": malformed document: " +
                         e.what(),
                     line);
  }
}

const Json& Field(const Json& object, const std::string& key,
                  const std::string& path) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!object.is_object() || !object.contains(key)) {
    throw ParseError("missing field '" + where + "'", std::nullopt, where);
  }
  return object.at(key);
}

template <typename T>
T As(const Json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("field '" + where + "' has the wrong type", std::nullopt,
                     where);
  }
}

int AsInt(const Json& value, const std::string& where) {
  if (!value.is_number_integer()) {
    throw ParseError("field '" + where + "' must be an integer", std::nullopt,
                     where);
  }
  return value.get<int>();
}

const Json& AsArray(const Json& value, const std::string& where,
                    std::optional<std::size_t> size = std::nullopt) {
  if (!value.is_array()) {
    throw ParseError("field '" + where + "' must be an array", std::nullopt,
                     where);
  }
  if (size && value.size() != *size) {
    throw ParseError("field '" + where + "' has " +
                         std::to_string(value.size()) + " entries, expected " +
                         std::to_string(*size),
                     std::nullopt, where);
  }
  return value;
}

std::vector<AdaptedProcess> ParseProcesses(const Json& processes,
                                           const std::string& key, int players,
                                           std::size_t nodes) {
  const std::string where = "processes." + key;
  const Json& per_player = AsArray(Field(processes, key, "processes"), where,
                                   static_cast<std::size_t>(players));
  std::vector<AdaptedProcess> out;
  for (int i = 0; i < players; ++i) {
    const std::string entry = where + "[" + std::to_string(i) + "]";
    const Json& values = AsArray(per_player[i], entry, nodes);
    std::vector<double> v;
    v.reserve(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      const std::string cell = entry + "[" + std::to_string(k) + "]";
      if (!values[k].is_number()) {
        throw ParseError("field '" + cell + "' must be a number", std::nullopt,
                         cell);
      }
      v.push_back(values[k].get<double>());
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

Json NodeList(std::span<const NodeId> nodes) {
  Json out = Json::array();
  for (NodeId v : nodes) out.push_back(v);
  return out;
}

Json StopJson(const StoppingTime& tau) {
  Json out;
  out["stop_nodes"] = NodeList(tau.stop_set());
  out["leaf_depths"] = LeafDepths(tau);
  return out;
}

Json ProcessArrays(const GameSpec& spec,
                   const AdaptedProcess& (GameSpec::*get)(int) const) {
  Json out = Json::array();
  for (int i = 0; i < spec.players(); ++i) {
    const auto values = (spec.*get)(i).values();
    out.push_back(std::vector<double>(values.begin(), values.end()));
  }
  return out;
}

Json AssumptionJson(const AssumptionReport& report) {
  Json out;
  out["passed"] = report.passed();
  Json ordering = Json::array();
  for (const auto& v : report.ordering_violations) {
    ordering.push_back({{"player", v.player + 1},
                        {"node", v.node},
                        {"X", v.leader},
                        {"Q", v.tie},
                        {"Y", v.follower}});
  }
  Json separation = Json::array();
  for (const auto& v : report.separation_violations) {
    separation.push_back({{"player", v.player + 1},
                          {"other", v.other + 1},
                          {"node", v.node},
                          {"Y_minus_Q", v.tie_gap},
                          {"other_Y_minus_X", v.leader_gap}});
  }
  out["ordering_violations"] = std::move(ordering);
  out["separation_violations"] = std::move(separation);
  return out;
}

Json NashJson(const NashCertificate& cert) {
  Json out;
  out["is_nash"] = cert.is_nash;
  out["max_gap"] = cert.max_gap();
  out["tol"] = cert.tol;
  Json players = Json::array();
  for (std::size_t i = 0; i < cert.players.size(); ++i) {
    const PlayerNash& p = cert.players[i];
    players.push_back({{"player", static_cast<int>(i) + 1},
                       {"payoff", p.payoff},
                       {"best_response_value", p.best_response_value},
                       {"gap", p.gap},
                       {"best_response_stop_nodes",
                        NodeList(p.best_response_time.stop_set())}});
  }
  out["players"] = std::move(players);
  return out;
}

// Uniform on [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GameSpec ParseGame(std::string_view text) {
  const Json doc = ParseJson(text);
  if (!doc.is_object()) throw ParseError("game document must be an object");
  if (doc.contains("format") &&
      As<std::string>(doc["format"], "format") != kGameFormat) {
    throw ParseError("unsupported game format '" +
                         doc["format"].get<std::string>() + "'",
                     std::nullopt, "format");
  }
  const int horizon = AsInt(Field(doc, "horizon", ""), "horizon");
  const int players = AsInt(Field(doc, "players", ""), "players");
  const Json& nodes_json = AsArray(Field(doc, "nodes", ""), "nodes");

  std::vector<ScenarioTree::Node> nodes;
  nodes.reserve(nodes_json.size());
  for (std::size_t k = 0; k < nodes_json.size(); ++k) {
    const std::string where = "nodes[" + std::to_string(k) + "]";
    const Json& node = nodes_json[k];
    ScenarioTree::Node n;
    n.id = AsInt(Field(node, "id", where), where + ".id");
    const Json& parent = Field(node, "parent", where);
    if (!parent.is_null()) n.parent = AsInt(parent, where + ".parent");
    const Json& p = Field(node, "p", where);
    if (!p.is_number()) {
      throw ParseError("field '" + where + ".p' must be a number", std::nullopt,
                       where + ".p");
    }
    n.cond_prob = p.get<double>();
    nodes.push_back(n);
  }
  ScenarioTree tree(std::move(nodes), horizon);
  if (players < 2) {
    throw ParseError("field 'players' must be at least 2", std::nullopt,
                     "players");
  }

  const Json& processes = Field(doc, "processes", "");
  auto x = ParseProcesses(processes, "X", players, tree.size());
  auto q = ParseProcesses(processes, "Q", players, tree.size());
  auto y = ParseProcesses(processes, "Y", players, tree.size());
  return GameSpec(std::move(tree), std::move(x), std::move(q), std::move(y));
}

GameSpec LoadGame(const std::filesystem::path& path) {
  return ParseGame(ReadFile(path));
}

std::string SerializeGame(const GameSpec& spec) {
  const ScenarioTree& tree = spec.tree();
  Json doc;
  doc["format"] = kGameFormat;
  doc["horizon"] = tree.horizon();
  doc["players"] = spec.players();
  Json nodes = Json::array();
  for (const auto& node : tree.nodes()) {
    Json n;
    n["id"] = node.id;
    n["parent"] = node.parent ? Json(*node.parent) : Json(nullptr);
    n["p"] = node.cond_prob;
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  doc["processes"] = {{"X", ProcessArrays(spec, &GameSpec::leader)},
                      {"Q", ProcessArrays(spec, &GameSpec::tie)},
                      {"Y", ProcessArrays(spec, &GameSpec::follower)}};
  return doc.dump(2) + "\n";
}

void SaveGame(const GameSpec& spec, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeGame(spec));
}

Profile ParseProfile(std::string_view text, const GameSpec& spec) {
  const Json doc = ParseJson(text);
  std::vector<std::vector<NodeId>> sets;
  std::string where;
  if (doc.is_object() && doc.contains("stop_sets")) {
    where = "stop_sets";
    const Json& arr = AsArray(doc["stop_sets"], where,
                              static_cast<std::size_t>(spec.players()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      sets.push_back(As<std::vector<NodeId>>(
          AsArray(arr[i], where + "[" + std::to_string(i) + "]"),
          where + "[" + std::to_string(i) + "]"));
    }
  } else if (doc.is_object() && doc.contains("players") &&
             doc["players"].is_array()) {
    where = "players";
    const Json& arr = AsArray(doc["players"], where,
                              static_cast<std::size_t>(spec.players()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string entry = where + "[" + std::to_string(i) + "]";
      sets.push_back(As<std::vector<NodeId>>(
          AsArray(Field(arr[i], "stop_nodes", entry), entry + ".stop_nodes"),
          entry + ".stop_nodes"));
    }
  } else {
    throw ParseError("profile document needs 'stop_sets' (or a run report's "
                     "'players')");
  }
  Profile profile;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    try {
      profile.push_back(StoppingTime::Canonicalize(spec.tree(), sets[i]));
    } catch (const TreeError& e) {
      const std::string field = where + "[" + std::to_string(i) + "]";
      throw ParseError("player " + std::to_string(i + 1) + ": " + e.what(),
                       std::nullopt, field);
    }
  }
  return profile;
}

Profile LoadProfile(const std::filesystem::path& path, const GameSpec& spec) {
  return ParseProfile(ReadFile(path), spec);
}

std::string SerializeProfile(std::span<const StoppingTime> profile) {
  Json doc;
  doc["format"] = kProfileFormat;
  Json sets = Json::array();
  for (const StoppingTime& t : profile) sets.push_back(NodeList(t.stop_set()));
  doc["stop_sets"] = std::move(sets);
  return doc.dump(2) + "\n";
}

GameSpec GenerateGame(const GenOptions& options) {
  if (options.players < 2) throw ShapeError("players must be at least 2");
  if (!(options.gap > 0.0)) throw ShapeError("gap must be positive");
  if (options.touch_fraction < 0.0 || options.touch_fraction > 1.0) {
    throw ShapeError("touch fraction must lie in [0, 1]");
  }
  ScenarioTree tree = ScenarioTree::Uniform(options.depth, options.branching);
  std::mt19937_64 rng(options.seed);
  const std::size_t k = tree.size();
  const auto n = static_cast<std::size_t>(options.players);
  std::vector<std::vector<double>> x(n, std::vector<double>(k));
  std::vector<std::vector<double>> q = x;
  std::vector<std::vector<double>> y = x;
  for (std::size_t v = 0; v < k; ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i][v] = 2.0 * Unit(rng) - 1.0;
      q[i][v] = x[i][v] + options.gap + 0.5 * Unit(rng);
      y[i][v] = q[i][v] + options.gap + 0.5 * Unit(rng);
    }
  }
  if (options.mode == GenMode::kTouching) {
    bool any = false;
    for (std::size_t v = 0; v < k; ++v) {
      if (Unit(rng) < options.touch_fraction) {
        any = true;
        for (std::size_t i = 0; i < n; ++i) q[i][v] = y[i][v];
      }
    }
    if (!any && options.touch_fraction > 0.0) {
      const std::size_t v = static_cast<std::size_t>(rng() % k);
      for (std::size_t i = 0; i < n; ++i) q[i][v] = y[i][v];
    }
  }
  auto wrap = [](std::vector<std::vector<double>> raw) {
    std::vector<AdaptedProcess> out;
    for (auto& r : raw) out.emplace_back(std::move(r));
    return out;
  };
  return GameSpec(std::move(tree), wrap(std::move(x)), wrap(std::move(q)),
                  wrap(std::move(y)));
}

GameSpec DemoConstant(int players, int depth, int branching) {
  if (players < 2) throw ShapeError("players must be at least 2");
  ScenarioTree tree = ScenarioTree::Uniform(depth, branching);
  const std::size_t k = tree.size();
  const auto n = static_cast<std::size_t>(players);
  return GameSpec(std::move(tree),
                  std::vector<AdaptedProcess>(n, AdaptedProcess(k, 0.5)),
                  std::vector<AdaptedProcess>(n, AdaptedProcess(k, 1.0)),
                  std::vector<AdaptedProcess>(n, AdaptedProcess(k, 1.0)));
}

bool RunReport::residual_ok() const {
  return std::all_of(residuals.begin(), residuals.end(),
                     [this](double r) { return std::abs(r) <= tol; });
}

bool RunReport::certified() const {
  return assumptions.passed() && candidate.converged && audit.empty() &&
         nash.is_nash && streamline.passed() && residual_ok();
}

std::string SerializeAssumptionReport(const AssumptionReport& report) {
  return AssumptionJson(report).dump(2) + "\n";
}

std::string SerializeNashCertificate(const NashCertificate& cert) {
  return NashJson(cert).dump(2) + "\n";
}

std::string SerializeRunReport(const GameSpec& spec, const RunReport& report) {
  const ScenarioTree& tree = spec.tree();
  const EquilibriumCandidate& c = report.candidate;
  Json doc;
  doc["format"] = kReportFormat;
  doc["input_digest"] = report.input_digest;
  doc["players_count"] = spec.players();
  doc["horizon"] = tree.horizon();
  doc["leaves"] = NodeList(tree.leaves());
  doc["assumptions"] = AssumptionJson(report.assumptions);
  doc["converged"] = c.converged;
  doc["rounds_used"] = c.rounds_used;
  doc["max_rounds"] = report.max_rounds;
  doc["tol"] = report.tol;

  Json players = Json::array();
  for (int i = 0; i < spec.players(); ++i) {
    Json p;
    p["player"] = i + 1;
    const Json stop = StopJson(c.strategies[i]);
    p["stop_nodes"] = stop["stop_nodes"];
    p["leaf_depths"] = stop["leaf_depths"];
    p["rival_stop_nodes"] = NodeList(c.rival_stops[i].stop_set());
    if (static_cast<std::size_t>(i) < report.nash.players.size()) {
      const PlayerNash& n = report.nash.players[i];
      p["payoff"] = n.payoff;
      p["best_response_value"] = n.best_response_value;
      p["gap"] = n.gap;
      p["best_response_stop_nodes"] = NodeList(n.best_response_time.stop_set());
    }
    if (static_cast<std::size_t>(i) < report.streamline.players.size()) {
      const PlayerStreamline& s = report.streamline.players[i];
      p["streamline"] = {{"martingale_ok", s.martingale_ok},
                         {"supermartingale_ok", s.supermartingale_ok},
                         {"dominance_ok", s.dominance_ok},
                         {"hit_equality_ok", s.hit_equality_ok},
                         {"boundary_ok", s.boundary_ok},
                         {"residual_ok", s.residual_ok}};
      p["witness_root_value"] = s.witness[tree.root()];
    }
    if (static_cast<std::size_t>(i) < report.residuals.size()) {
      p["residual_yq"] = report.residuals[i];
    }
    players.push_back(std::move(p));
  }
  doc["players"] = std::move(players);
  doc["first_stop"] = StopJson(c.first_stop);

  doc["nash"] = {{"is_nash", report.nash.is_nash},
                 {"max_gap", report.nash.max_gap()},
                 {"tol", report.nash.tol}};
  doc["streamline_ok"] = report.streamline.passed();
  doc["residual_ok"] = report.residual_ok();
  Json audit = Json::array();
  for (const AuditViolation& v : report.audit) {
    audit.push_back({{"n", v.n}, {"check", ToString(v.check)}, {"detail", v.detail}});
  }
  doc["audit_violations"] = std::move(audit);
  doc["trace_file"] =
      report.trace_file.empty() ? Json(nullptr) : Json(report.trace_file);
  doc["certified"] = report.certified();
  return doc.dump(2) + "\n";
}

std::string TraceTable(const SchemeState& state) {
  std::ostringstream out;
  out << "n,player,E_W0";
  if (state.trace().empty()) {
    out << "\n";
    return out.str();
  }
  const ScenarioTree& tree = state.trace().front().tau.tree();
  for (const char* name : {"theta", "mu", "tau"}) {
    for (NodeId leaf : tree.leaves()) out << "," << name << "_" << leaf;
  }
  out << "\n";
  out << std::setprecision(17);
  for (const TraceRecord& r : state.trace()) {
    out << r.n << "," << r.player + 1 << "," << r.root_value;
    for (const StoppingTime* t : {&r.theta, &r.mu, &r.tau}) {
      for (int d : LeafDepths(*t)) out << "," << d;
    }
    out << "\n";
  }
  return out.str();
}

std::string Digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::ostringstream hex;
  hex << "sha256:" << std::hex << std::setfill('0');
  for (unsigned int k = 0; k < len; ++k) hex << std::setw(2) << int{md[k]};
  return hex.str();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dynkin::io
