#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hoarefix/mutate.hpp"
#include "hoarefix/repair.hpp"
#include "hoarefix/serialize.hpp"

namespace hoarefix::eval {

struct PatchRecord {
  int line = 0;
  std::string text;
};

struct AttemptRecord {
  int line = 0;
  int attempt = 0;
  std::optional<std::string> candidate;
  std::string verdict;
};

/// Outcome for one buggy program of the dataset.
struct ProgramRecord {
  std::string name;     // mutant file stem
  std::string program;  // source program (directory under Mutations)
  std::string strategy;  // short tag from the file name, empty when absent
  int true_line = 0;
  /// The buggy file verified or did not parse; excluded from the metrics.
  bool invalid = false;
  std::string invalid_reason;
  std::vector<int> ranking;
  std::size_t rank = 0;  // 1-based position of the true line, 0 when absent
  double coverage = 0;
  bool fixed = false;
  bool complete = true;
  int attempts_to_first_fix = 0;
  std::vector<PatchRecord> patches;
  std::vector<AttemptRecord> attempts;
  bool exact_match = false;
};

struct EvalMetrics {
  double top1 = 0;
  double top3 = 0;
  double success_rate = 0;
  double precision = 0;
  double exact_match = 0;
  double avg_attempts = 0;
  double coverage_mean = 0;
  std::size_t total = 0;
  std::size_t localized = 0;  // true line appears anywhere in the report
  std::size_t repaired = 0;
  std::size_t discarded = 0;  // invalid dataset entries
  std::size_t patches = 0;
  std::size_t precise_patches = 0;
};

/// Pure reduction over records; invalid entries only count as discarded.
EvalMetrics aggregate(const std::vector<ProgramRecord>& records);

struct EvalOptions {
  repair::RepairOptions repair;
  unsigned jobs = 1;
  /// Empty keeps every mutant.
  std::vector<mutate::Strategy> filter;
  /// Root for the `Repair/` tree; defaults to the dataset directory.
  std::optional<std::filesystem::path> out_dir;
  bool write_files = true;
};

struct BenchmarkResult {
  EvalMetrics metrics;
  std::vector<ProgramRecord> records;
  std::vector<entail::Disagreement> disagreements;
  std::vector<std::string> warnings;
  std::filesystem::path report_dir;
};

BenchmarkResult run_benchmark(const std::filesystem::path& dataset_dir, repair::ModelClient& model,
                              const EvalOptions& options);

/// Directory-safe form of a model name.
std::string model_dir_name(std::string_view model);

serialize::Json to_json(const ProgramRecord& r);
ProgramRecord record_from_json(const serialize::Json& j);
serialize::Json to_json(const EvalMetrics& m);
std::string metrics_csv(const EvalMetrics& m);

/// Per-program records previously written under `report_dir`.
std::vector<ProgramRecord> load_records(const std::filesystem::path& report_dir);

struct ModelTables {
  std::string text;
  std::string csv;
};

/// Success rate descending, ties broken by fewer average attempts.
ModelTables compare_models(std::vector<std::pair<std::string, EvalMetrics>> entries);

/// Two-decimal rounding used in every report.
double round2(double x);

}  // namespace hoarefix::eval
