#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace morita {

/// One asserted identity: its measured defect and the threshold it was held to.
struct CheckEntry {
  std::string name;
  std::string reference;  // the result of the theory the check exercises
  double defect = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

/// Structured outcome of a verification. Defects are always numbers; a
/// boolean-only check records defect 0 or 1 against tolerance 0.5.
class CheckReport {
 public:
  CheckReport() = default;
  explicit CheckReport(std::string subject) : subject_(std::move(subject)) {}

  /// Records a measured defect; returns whether it passed.
  bool add(std::string name, std::string reference, double defect, double tolerance,
           std::string note = {});
  /// Records a yes/no condition.
  bool require(std::string name, std::string reference, bool condition, std::string note = {});
  /// Appends another report's entries, prefixing their names.
  void merge(const CheckReport& other, const std::string& prefix = {});

  bool passed() const;
  double max_defect() const;
  const std::vector<CheckEntry>& entries() const { return entries_; }
  const std::string& subject() const { return subject_; }
  void set_subject(std::string s) { subject_ = std::move(s); }
  std::optional<std::uint64_t> seed;
  /// First failing entry, formatted for diagnostics.
  std::string first_failure() const;
  std::string to_text() const;

 private:
  std::string subject_;
  std::vector<CheckEntry> entries_;
};

}  // namespace morita
