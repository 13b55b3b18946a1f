#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace saddlescope {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// Worst offending sample recorded by a failed check.
struct Witness {
  std::vector<double> point;
  double violation = 0.0;
  std::string what;
};

/// Structured pass/fail report for one numerical hypothesis check.
/// A pass means "no violation found at the stated sample size", never a
/// proof; the sampling parameters are part of the record.
struct Certificate {
  std::string check_name;
  Verdict verdict = Verdict::inconclusive;
  std::map<std::string, double> tolerances;
  long samples = 0;
  uint64_t seed = 0;
  std::optional<Witness> worst_witness;
  std::map<std::string, double> constants;  // fitted or supplied constants
  std::vector<std::string> notes;

  void fail_with(const std::vector<double>& point, double violation, const std::string& what);
};

}  // namespace saddlescope
