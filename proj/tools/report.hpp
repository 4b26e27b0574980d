#ifndef BLOCHDECK_TOOLS_REPORT_HPP
#define BLOCHDECK_TOOLS_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "blochdeck/common.hpp"

namespace blochdeck::cli {

struct CheckRecord {
  std::string name;
  double defect = 0;
  double tolerance = 0;
  bool pass = true;
  Flags flags;
  std::string note;
};

// Machine-readable command report. write() is deterministic for a fixed
// config: record order is fixed and wall-clock timing stays out of the file
// (it is printed to the console instead).
struct Report {
  std::string command;
  std::uint64_t config_hash = 0;
  std::vector<CheckRecord> records;
  double elapsed_seconds = 0;

  void add(const std::string& name, double defect, double tolerance,
           Flags flags = {}, const std::string& note = "");
  void add_info(const std::string& name, double value, Flags flags = {},
                const std::string& note = "");
  bool all_pass() const;
  int exit_code() const { return all_pass() ? 0 : 1; }
  void write(std::ostream& os) const;
};

}  // namespace blochdeck::cli

#endif
