#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkv/io.hpp"

namespace mkv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;        // the numerical check
  std::string detail;       // deterministic summary numbers
  double seconds = 0.0;
  double budget_seconds = 0.0;
  bool errored = false;     // the criterion threw instead of producing numbers

  bool within_budget() const { return seconds <= budget_seconds; }
  bool ok() const { return pass && within_budget(); }
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  std::filesystem::path out_dir = "acceptance";
  /// Runs the suite at max(hardware, 4) threads and at 1 thread and compares manifests.
  bool determinism = true;
};

/// Criteria 1-10 write their tables into `w`; with determinism on they run twice in
/// subdirectories of out_dir and criterion 11 compares the two manifests.
AcceptanceReport run_acceptance(const AcceptanceOptions& options, ArtifactWriter& w);

std::string format_line(const CriterionResult& r);
nlohmann::json acceptance_json(const AcceptanceReport& report);

}  // namespace mkv
