#ifndef BLOCHDECK_TOOLS_CONFIG_HPP
#define BLOCHDECK_TOOLS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blochdeck/covering.hpp"

namespace blochdeck::cli {

// JSON run configuration with a published schema and strict unknown-key
// rejection. Blocks: group, grid, potential, task, output. See the README
// for the field list; every numeric parameter is validated against the
// library preconditions before any computation starts.
struct GridConfig {
  long m = 8;
  double cell_length = 1.0;
  long window_radius = 4;
  long dual_resolution = 16;
};

struct PotentialConfig {
  enum class Kind { Zero, Cosine, Table };
  Kind kind = Kind::Zero;
  double amplitude = 1.0;          // cosine well depth
  std::vector<double> values;      // table on the fundamental domain
};

struct TaskConfig {
  std::string command;             // check-harmonic | bloch | schulman
  std::vector<double> tau = {0.2};
  std::vector<double> t;
  long ball_radius = 4;
  double epsilon = 0.0;
  long support_radius = -1;        // -1: clamp to the exactness band
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  int threads = 1;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv"};
};

class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& json_text);

  const GroupSpec& group() const { return group_; }
  const GridConfig& grid() const { return grid_; }
  const PotentialConfig& potential() const { return potential_; }
  TaskConfig& task() { return task_; }
  const TaskConfig& task() const { return task_; }
  const OutputConfig& output() const { return output_; }
  std::uint64_t hash() const { return hash_; }

  bool needs_covering() const;  // bloch/schulman build a graph
  DomainConfig domain_config() const;
  CoveringGraph build_graph() const;
  std::vector<double> potential_on_domain(const CoveringGraph& g) const;

 private:
  RunConfig() : group_(GroupSpec::finite_cyclic(1)) {}
  void validate() const;

  GroupSpec group_;
  GridConfig grid_;
  PotentialConfig potential_;
  TaskConfig task_;
  OutputConfig output_;
  std::uint64_t hash_ = 0;
};

inline constexpr long kVertexCap = 20000;

}  // namespace blochdeck::cli

#endif
