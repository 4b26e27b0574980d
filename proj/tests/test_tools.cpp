#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace blochdeck;
using namespace blochdeck::cli;

namespace {

std::string tmpdir() {
  auto p = std::filesystem::temp_directory_path() / "blochdeck_test_out";
  std::filesystem::create_directories(p);
  return p.string();
}

const char* kCircleConfig = R"({
  "group": {"family": "free_abelian", "rank": 1},
  "grid": {"m": 8, "window_radius": 3, "dual_resolution": 16},
  "potential": {"kind": "cosine", "amplitude": 0.3},
  "task": {"command": "bloch", "seed": 5},
  "output": {"directory": "out"}
})";

}  // namespace

TEST_CASE("config parsing fills defaults and hashes deterministically") {
  auto cfg = RunConfig::parse_text(kCircleConfig);
  CHECK(cfg.group().family() == GroupFamily::FreeAbelian);
  CHECK(cfg.grid().m == 8);
  CHECK(cfg.grid().cell_length == 1.0);  // default
  CHECK(cfg.task().command == "bloch");
  CHECK(cfg.task().tau == std::vector<double>{0.2});  // default
  CHECK(cfg.output().directory == "out");

  auto cfg2 = RunConfig::parse_text(kCircleConfig);
  CHECK(cfg.hash() == cfg2.hash());

  auto other = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 3},
    "task": {"command": "bloch"}
  })");
  CHECK(other.hash() != cfg.hash());
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_WITH_AS(RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "task": {"command": "bloch"},
    "extra": 1
  })"),
                       doctest::Contains("unknown key 'extra'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2, "m": 4},
    "task": {"command": "bloch"}
  })"),
                       doctest::Contains("unknown key 'm'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "grid": {"resolution": 4},
    "task": {"command": "bloch"}
  })"),
                       doctest::Contains("unknown key 'resolution'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "task": {"command": "bloch", "taus": [0.1]}
  })"),
                       doctest::Contains("unknown key 'taus'"), std::invalid_argument);
}

TEST_CASE("validation enforces the library preconditions") {
  auto wrap = [](const std::string& group, const std::string& grid,
                 const std::string& task) {
    return std::string("{\"group\": ") + group + ", \"grid\": " + grid +
           ", \"task\": " + task + "}";
  };
  // Unknown family, bad sizes, bad tau, vertex cap, covering rejections.
  CHECK_THROWS_AS(RunConfig::parse_text(wrap(R"({"family": "dihedral", "n": 3})",
                                             "{}", R"({"command": "bloch"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::parse_text(wrap(R"({"family": "finite_cyclic", "n": 0})",
                                             "{}", R"({"command": "bloch"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::parse_text(wrap(R"({"family": "free_abelian", "rank": 1})",
                                             R"({"m": 0})", R"({"command": "bloch"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      RunConfig::parse_text(wrap(R"({"family": "finite_cyclic", "n": 4})", "{}",
                                 R"({"command": "schulman", "tau": [-0.5]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      RunConfig::parse_text(wrap(R"({"family": "klein_bottle"})",
                                 R"({"m": 16, "window_radius": 6})",
                                 R"({"command": "bloch"})")),
      std::invalid_argument);  // 169 * 256 vertices exceed the cap
  CHECK_THROWS_AS(
      RunConfig::parse_text(wrap(R"({"family": "finite_product", "orders": [2, 2]})",
                                 "{}", R"({"command": "bloch"})")),
      std::invalid_argument);  // no covering model
  CHECK_THROWS_AS(
      RunConfig::parse_text(wrap(R"({"family": "klein_bottle"})",
                                 R"({"m": 4, "cell_length": 2.0})",
                                 R"({"command": "schulman"})")),
      std::invalid_argument);  // unit cell pinned
  // Real-time Schulman sums on infinite groups need epsilon > 0.
  CHECK_THROWS_WITH_AS(
      RunConfig::parse_text(
          wrap(R"({"family": "free_abelian", "rank": 1})",
               R"({"m": 4, "window_radius": 2})",
               R"({"command": "schulman", "t": [0.5], "ball_radius": 2})")),
      doctest::Contains("epsilon"), std::invalid_argument);
  // ... and pass once epsilon is set.
  auto ok = RunConfig::parse_text(
      wrap(R"({"family": "free_abelian", "rank": 1})",
           R"({"m": 4, "window_radius": 2})",
           R"({"command": "schulman", "t": [0.5], "epsilon": 0.1, "ball_radius": 2})"));
  CHECK(ok.task().epsilon == 0.1);
  // finite_product is fine for harmonic-only runs.
  auto harm = RunConfig::parse_text(
      wrap(R"({"family": "finite_product", "orders": [2, 3]})", "{}",
           R"({"command": "check-harmonic"})"));
  CHECK(harm.group().order() == 6);
}

TEST_CASE("potential construction on the fundamental domain") {
  auto cfg = RunConfig::parse_text(kCircleConfig);
  auto g = cfg.build_graph();
  auto V = cfg.potential_on_domain(g);
  REQUIRE(static_cast<long>(V.size()) == g.base_count());
  // Cosine well: zero at the cell origin, positive elsewhere.
  CHECK(V[0] == doctest::Approx(0.0));
  for (double v : V) CHECK(v >= 0.0);

  auto table = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "grid": {"m": 2},
    "potential": {"kind": "table", "values": [0.5, -0.5]},
    "task": {"command": "bloch"}
  })");
  auto g2 = table.build_graph();
  CHECK(table.potential_on_domain(g2) == std::vector<double>{0.5, -0.5});

  auto bad = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "grid": {"m": 3},
    "potential": {"kind": "table", "values": [1.0]},
    "task": {"command": "bloch"}
  })");
  auto g3 = bad.build_graph();
  CHECK_THROWS_AS(bad.potential_on_domain(g3), std::invalid_argument);
}

TEST_CASE("report records and serialization") {
  Report rep;
  rep.command = "bloch";
  rep.config_hash = 0xdeadbeef;
  rep.add("alpha", 1e-14, 1e-12);
  rep.add("beta", 1e-3, 1e-12);
  Flags fl;
  fl.band_exceeded = true;
  rep.add_info("gamma", 2.0, fl, "informational");
  CHECK(!rep.all_pass());
  CHECK(rep.exit_code() == 1);
  std::ostringstream a, b;
  rep.write(a);
  rep.write(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("check name=beta") != std::string::npos);
  CHECK(a.str().find("pass=no") != std::string::npos);
  CHECK(a.str().find("tol=- pass=info flags=band-exceeded") != std::string::npos);
  CHECK(a.str().find("summary checks=3 passed=2 failed=1") != std::string::npos);
}

TEST_CASE("check-harmonic command passes and writes its outputs") {
  auto cfg = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 6},
    "grid": {"dual_resolution": 1},
    "task": {"command": "check-harmonic", "seed": 3}
  })");
  std::string out = tmpdir() + "/harm";
  Report rep = cmd_check_harmonic(cfg, out);
  CHECK(rep.all_pass());
  CHECK(std::filesystem::exists(out + "/report.txt"));
  CHECK(std::filesystem::exists(out + "/dual_grid.txt"));
}

TEST_CASE("check-harmonic raises the band flag beyond the exactness band") {
  auto cfg = RunConfig::parse_text(R"({
    "group": {"family": "free_abelian", "rank": 1},
    "grid": {"m": 4, "window_radius": 2, "dual_resolution": 4},
    "task": {"command": "check-harmonic", "support_radius": 3}
  })");
  Report rep = cmd_check_harmonic(cfg, tmpdir() + "/band");
  CHECK(rep.all_pass());  // warning, not an error
  bool flagged = false;
  for (const auto& r : rep.records)
    if (r.name == "exactness-band" && r.flags.band_exceeded) flagged = true;
  CHECK(flagged);
}

TEST_CASE("bloch command on the micro model reports the spectral union") {
  auto cfg = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 2},
    "grid": {"m": 1, "dual_resolution": 1},
    "task": {"command": "bloch", "t": [0.5], "seed": 4}
  })");
  std::string out = tmpdir() + "/bloch_micro";
  Report rep = cmd_bloch(cfg, out);
  CHECK(rep.all_pass());
  bool has_union = false, has_evolution = false;
  for (const auto& r : rep.records) {
    if (r.name == "spectral-union") has_union = true;
    if (r.name.rfind("evolution-decomposition", 0) == 0) has_evolution = true;
  }
  CHECK(has_union);
  CHECK(has_evolution);
  CHECK(std::filesystem::exists(out + "/bands.csv"));
  CHECK(std::filesystem::exists(out + "/defects.txt"));
}

TEST_CASE("schulman command covers the trivial group identity") {
  auto cfg = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 1},
    "grid": {"m": 5, "dual_resolution": 1},
    "task": {"command": "schulman", "tau": [0.3], "seed": 6}
  })");
  Report rep = cmd_schulman(cfg, tmpdir() + "/schul_triv");
  CHECK(rep.all_pass());
  bool has_trivial = false;
  for (const auto& r : rep.records)
    if (r.name.rfind("trivial-group-identity", 0) == 0) has_trivial = true;
  CHECK(has_trivial);
}

TEST_CASE("run_command dispatches on the config command") {
  auto cfg = RunConfig::parse_text(R"({
    "group": {"family": "finite_cyclic", "n": 4},
    "grid": {"dual_resolution": 1},
    "task": {"command": "check-harmonic"}
  })");
  Report rep = run_command(cfg, tmpdir() + "/dispatch");
  CHECK(rep.command == "check-harmonic");
}

TEST_CASE("reports are byte-identical across repeated runs") {
  auto cfg = RunConfig::parse_text(kCircleConfig);
  std::string o1 = tmpdir() + "/det1", o2 = tmpdir() + "/det2";
  cmd_bloch(cfg, o1);
  cmd_bloch(cfg, o2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(o1 + "/report.txt") == slurp(o2 + "/report.txt"));
  CHECK(slurp(o1 + "/bands.csv") == slurp(o2 + "/bands.csv"));
}
