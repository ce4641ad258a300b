#include "morita/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace morita {

bool CheckReport::add(std::string name, std::string reference, double defect, double tolerance,
                      std::string note) {
  const bool ok = std::isfinite(defect) && defect <= tolerance;
  entries_.push_back({std::move(name), std::move(reference), defect, tolerance, ok,
                      std::move(note)});
  return ok;
}

bool CheckReport::require(std::string name, std::string reference, bool condition,
                          std::string note) {
  return add(std::move(name), std::move(reference), condition ? 0.0 : 1.0, 0.5, std::move(note));
}

void CheckReport::merge(const CheckReport& other, const std::string& prefix) {
  for (const auto& e : other.entries_) {
    CheckEntry copy = e;
    if (!prefix.empty()) copy.name = prefix + "/" + copy.name;
    entries_.push_back(std::move(copy));
  }
  if (!seed && other.seed) seed = other.seed;
}

bool CheckReport::passed() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.passed; });
}

double CheckReport::max_defect() const {
  double m = 0.0;
  for (const auto& e : entries_) {
    if (e.tolerance == 0.5 && (e.defect == 0.0 || e.defect == 1.0)) continue;  // flags
    m = std::max(m, e.defect);
  }
  return m;
}

std::string CheckReport::first_failure() const {
  for (const auto& e : entries_) {
    if (!e.passed) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e > %.3e", e.defect, e.tolerance);
      return e.name + " [" + e.reference + "] defect " + buf + (e.note.empty() ? "" : " (" + e.note + ")");
    }
  }
  return {};
}

std::string CheckReport::to_text() const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s defect=%.3e tol=%.1e  ", e.passed ? "PASS" : "FAIL",
                  e.defect, e.tolerance);
    out << buf << e.name << "  [" << e.reference << "]";
    if (!e.note.empty()) out << "  " << e.note;
    out << '\n';
  }
  return out.str();
}

}  // namespace morita
