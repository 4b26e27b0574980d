#include "report.hpp"

#include <cstdio>
#include <ostream>

namespace blochdeck::cli {

void Report::add(const std::string& name, double defect, double tolerance,
                 Flags flags, const std::string& note) {
  records.push_back({name, defect, tolerance, defect <= tolerance, flags, note});
}

void Report::add_info(const std::string& name, double value, Flags flags,
                      const std::string& note) {
  CheckRecord r{name, value, 0.0, true, flags, note};
  r.tolerance = -1.0;  // informational marker
  records.push_back(r);
}

bool Report::all_pass() const {
  for (const auto& r : records)
    if (!r.pass) return false;
  return true;
}

void Report::write(std::ostream& os) const {
  char buf[64];
  os << "blochdeck report version=" << kVersion << "\n";
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  os << "command=" << command << " config=" << buf << "\n";
  std::size_t passed = 0;
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.defect);
    os << "check name=" << r.name << " defect=" << buf;
    if (r.tolerance >= 0) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.tolerance);
      os << " tol=" << buf << " pass=" << (r.pass ? "yes" : "no");
    } else {
      os << " tol=- pass=info";
    }
    os << " flags=" << r.flags.to_string();
    if (!r.note.empty()) os << " note=\"" << r.note << "\"";
    os << "\n";
    passed += r.pass;
  }
  os << "summary checks=" << records.size() << " passed=" << passed
     << " failed=" << records.size() - passed << "\n";
}

}  // namespace blochdeck::cli
