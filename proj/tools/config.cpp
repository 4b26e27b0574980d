#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace blochdeck::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void reject_unknown_keys(const json& obj, const std::string& block,
                         const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail("unknown key '" + it.key() + "' in config block '" + block + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

GroupSpec parse_group(const json& obj) {
  if (!obj.is_object()) fail("config block 'group' must be an object");
  std::string family = obj.value("family", "");
  if (family == "finite_cyclic") {
    reject_unknown_keys(obj, "group", {"family", "n"});
    if (!obj.contains("n")) fail("finite_cyclic requires 'n'");
    return GroupSpec::finite_cyclic(obj.at("n").get<long>());
  }
  if (family == "finite_product") {
    reject_unknown_keys(obj, "group", {"family", "orders"});
    if (!obj.contains("orders")) fail("finite_product requires 'orders'");
    return GroupSpec::finite_product(obj.at("orders").get<std::vector<long>>());
  }
  if (family == "free_abelian") {
    reject_unknown_keys(obj, "group", {"family", "rank"});
    if (!obj.contains("rank")) fail("free_abelian requires 'rank'");
    return GroupSpec::free_abelian(obj.at("rank").get<int>());
  }
  if (family == "klein_bottle") {
    reject_unknown_keys(obj, "group", {"family"});
    return GroupSpec::klein_bottle();
  }
  fail("unknown group family '" + family +
       "' (expected finite_cyclic, finite_product, free_abelian, klein_bottle)");
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

RunConfig RunConfig::parse_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be a JSON object");
  reject_unknown_keys(root, "<root>", {"group", "grid", "potential", "task", "output"});
  if (!root.contains("group")) fail("config requires a 'group' block");
  if (!root.contains("task")) fail("config requires a 'task' block");

  RunConfig cfg;
  cfg.group_ = parse_group(root.at("group"));

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    reject_unknown_keys(g, "grid", {"m", "cell_length", "window_radius",
                                    "dual_resolution"});
    cfg.grid_.m = g.value("m", cfg.grid_.m);
    cfg.grid_.cell_length = g.value("cell_length", cfg.grid_.cell_length);
    cfg.grid_.window_radius = g.value("window_radius", cfg.grid_.window_radius);
    cfg.grid_.dual_resolution = g.value("dual_resolution", cfg.grid_.dual_resolution);
  }

  if (root.contains("potential")) {
    const json& p = root.at("potential");
    reject_unknown_keys(p, "potential", {"kind", "amplitude", "values"});
    std::string kind = p.value("kind", "zero");
    if (kind == "zero")
      cfg.potential_.kind = PotentialConfig::Kind::Zero;
    else if (kind == "cosine")
      cfg.potential_.kind = PotentialConfig::Kind::Cosine;
    else if (kind == "table")
      cfg.potential_.kind = PotentialConfig::Kind::Table;
    else
      fail("unknown potential kind '" + kind + "'");
    cfg.potential_.amplitude = p.value("amplitude", 1.0);
    if (p.contains("values"))
      cfg.potential_.values = p.at("values").get<std::vector<double>>();
  }

  {
    const json& t = root.at("task");
    reject_unknown_keys(t, "task", {"command", "tau", "t", "ball_radius", "epsilon",
                                    "support_radius", "seed", "tolerance_scale",
                                    "threads"});
    if (!t.contains("command")) fail("task block requires 'command'");
    cfg.task_.command = t.at("command").get<std::string>();
    if (t.contains("tau")) cfg.task_.tau = t.at("tau").get<std::vector<double>>();
    if (t.contains("t")) cfg.task_.t = t.at("t").get<std::vector<double>>();
    cfg.task_.ball_radius = t.value("ball_radius", cfg.task_.ball_radius);
    cfg.task_.epsilon = t.value("epsilon", cfg.task_.epsilon);
    cfg.task_.support_radius = t.value("support_radius", cfg.task_.support_radius);
    cfg.task_.seed = t.value("seed", cfg.task_.seed);
    cfg.task_.tolerance_scale = t.value("tolerance_scale", cfg.task_.tolerance_scale);
    cfg.task_.threads = t.value("threads", cfg.task_.threads);
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    reject_unknown_keys(o, "output", {"directory", "formats"});
    cfg.output_.directory = o.value("directory", cfg.output_.directory);
    if (o.contains("formats"))
      cfg.output_.formats = o.at("formats").get<std::vector<std::string>>();
  }

  cfg.hash_ = fnv1a(root.dump());
  cfg.validate();
  return cfg;
}

bool RunConfig::needs_covering() const {
  return task_.command == "bloch" || task_.command == "schulman";
}

DomainConfig RunConfig::domain_config() const {
  return {grid_.m, grid_.cell_length, grid_.window_radius};
}

CoveringGraph RunConfig::build_graph() const {
  return CoveringGraph::build(group_, domain_config());
}

std::vector<double> RunConfig::potential_on_domain(const CoveringGraph& g) const {
  std::vector<double> V(g.base_count(), 0.0);
  switch (potential_.kind) {
    case PotentialConfig::Kind::Zero:
      break;
    case PotentialConfig::Kind::Cosine: {
      // Invariant well: amplitude * sum_i (1 - cos(2 pi x_i / L)).
      for (long b = 0; b < g.base_count(); ++b) {
        auto pt = g.base_point(b);
        double v = 0;
        for (double x : pt)
          v += 1.0 - std::cos(2.0 * std::numbers::pi * x / grid_.cell_length);
        V[b] = potential_.amplitude * v;
      }
      break;
    }
    case PotentialConfig::Kind::Table:
      if (static_cast<long>(potential_.values.size()) != g.base_count())
        fail("potential table must have one value per fundamental-domain node (" +
             std::to_string(g.base_count()) + ")");
      V = potential_.values;
      break;
  }
  return V;
}

void RunConfig::validate() const {
  const std::set<std::string> commands = {"check-harmonic", "bloch", "schulman"};
  if (!commands.count(task_.command))
    fail("unknown command '" + task_.command +
         "' (expected check-harmonic, bloch, schulman)");

  if (grid_.m < 1) fail("grid.m must be >= 1");
  if (grid_.cell_length <= 0) fail("grid.cell_length must be positive");
  if (grid_.dual_resolution < 1) fail("grid.dual_resolution must be >= 1");
  if (!group_.is_finite() && grid_.window_radius < 1)
    fail("grid.window_radius must be >= 1 for infinite groups");

  for (double tau : task_.tau)
    if (!(tau > 0) || !std::isfinite(tau)) fail("task.tau entries must be positive");
  for (double t : task_.t)
    if (!std::isfinite(t)) fail("task.t entries must be finite");
  if (task_.ball_radius < 0) fail("task.ball_radius must be >= 0");
  if (task_.epsilon < 0) fail("task.epsilon must be >= 0");
  if (task_.tolerance_scale <= 0) fail("task.tolerance_scale must be positive");
  if (task_.threads < 1) fail("task.threads must be >= 1");

  for (double v : potential_.values)
    if (!std::isfinite(v)) fail("potential.values must be finite (bounded potentials only)");

  for (const auto& f : output_.formats)
    if (f != "csv") fail("unknown output format '" + f + "' (supported: csv)");

  if (needs_covering()) {
    bool has_model =
        group_.family() == GroupFamily::FiniteCyclic ||
        group_.family() == GroupFamily::KleinBottle ||
        (group_.family() == GroupFamily::FreeAbelian && group_.params()[0] <= 2);
    if (!has_model)
      fail("no built-in covering model for " + group_.describe() +
           "; covering commands support finite_cyclic, free_abelian rank <= 2 "
           "and klein_bottle");
    if (group_.family() == GroupFamily::KleinBottle && grid_.cell_length != 1.0)
      fail("the Klein-bottle model is pinned to a unit cell (cell_length = 1)");

    int dim = group_.family() == GroupFamily::FiniteCyclic
                  ? 1
                  : (group_.family() == GroupFamily::KleinBottle
                         ? 2
                         : static_cast<int>(group_.params()[0]));
    long copies = group_.is_finite()
                      ? group_.order()
                      : static_cast<long>(
                            enumerate_ball(group_, grid_.window_radius).size());
    long base = 1;
    for (int k = 0; k < dim; ++k) base *= grid_.m;
    if (copies * base > kVertexCap)
      fail("model size " + std::to_string(copies * base) + " exceeds the vertex cap " +
           std::to_string(kVertexCap) + " (dense eigendecomposition baseline)");
    if (task_.command == "schulman" && !group_.is_finite() &&
        task_.ball_radius > grid_.window_radius)
      fail("task.ball_radius must not exceed grid.window_radius");
  }

  if (task_.command == "schulman" && !group_.is_finite() && !task_.t.empty() &&
      task_.epsilon == 0.0)
    fail("real-time Schulman sums on infinite groups require complex time: set "
         "task.epsilon > 0 or restrict to imaginary time (task.tau)");
}

}  // namespace blochdeck::cli
