#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "hoarefix/eval.hpp"

namespace hoarefix::eval {

namespace fs = std::filesystem;
using serialize::Json;

double round2(double x) { return std::round(x * 100.0) / 100.0; }

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

int marked_line_of(const fs::path& hints) {
  const auto lines = split_lines(read_file(hints));
  int found = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t pos = lines[i].find("//");
    if (pos != std::string::npos && lang::is_marker_comment(std::string_view(lines[i]).substr(pos))) {
      if (found) throw mutate::LayoutError(hints, "exactly one '//buggy line' marker");
      found = static_cast<int>(i) + 1;
    }
  }
  if (!found) throw mutate::LayoutError(hints, "a '//buggy line' marker");
  return found;
}

std::string strategy_tag(const std::string& stem) {
  static const std::regex pattern(R"(_(op|coef|reorder|combined)_L\d+$)");
  std::smatch m;
  return std::regex_search(stem, m, pattern) ? m[1].str() : std::string();
}

struct Job {
  fs::path mutation;
  fs::path hints;
  std::string program;
  std::string name;
  std::string strategy;
};

struct JobResult {
  ProgramRecord record;
  repair::RepairOutcome outcome;
  std::vector<entail::Disagreement> disagreements;
};

JobResult run_one(const Job& job, const fs::path& dataset, repair::ModelClient& model, const EvalOptions& options) {
  JobResult out;
  ProgramRecord& r = out.record;
  r.name = job.name;
  r.program = job.program;
  r.strategy = job.strategy;
  r.true_line = marked_line_of(job.hints);

  const fs::path correct = dataset / "Correct_Code" / (job.program + ".dfy");
  if (!fs::exists(correct)) throw mutate::LayoutError(correct, "the correct program for " + job.name);
  const auto correct_lines = split_lines(read_file(correct));

  lang::Program p;
  try {
    p = lang::parse_program(read_file(job.mutation));
  } catch (const lang::LangError& e) {
    r.invalid = true;
    r.invalid_reason = e.what();
    return out;
  }
  const auto verification = entail::verify_program(p, options.repair.backend);
  for (const auto& res : verification.results) {
    out.disagreements.insert(out.disagreements.end(), res.disagreements.begin(), res.disagreements.end());
  }
  if (verification.verified()) {
    r.invalid = true;
    r.invalid_reason = "buggy program verifies";
    return out;
  }

  const auto report = faultloc::localize_program(p, verification);
  for (const auto& s : report.lines) r.ranking.push_back(s.line);
  r.rank = faultloc::rank_of(report, r.true_line);
  r.coverage = report.coverage;

  out.outcome = repair::repair_loop(p, report, model, options.repair);
  r.fixed = out.outcome.status == repair::RepairStatus::Fixed;
  r.complete = out.outcome.complete;
  r.attempts_to_first_fix = out.outcome.attempts_to_first_fix;
  for (const auto& patch : out.outcome.patches) r.patches.push_back({patch.line, patch.text});
  for (const auto& a : out.outcome.attempts) {
    r.attempts.push_back({a.line, a.attempt, a.candidate, std::string(repair::to_string(a.verdict))});
  }
  if (r.true_line >= 1 && static_cast<std::size_t>(r.true_line) <= correct_lines.size()) {
    const std::string expected = mutate::normalize(lang::strip_marker(correct_lines[r.true_line - 1]));
    for (const auto& patch : r.patches) {
      if (patch.line == r.true_line && mutate::normalize(patch.text) == expected) r.exact_match = true;
    }
  }
  return out;
}

}  // namespace

EvalMetrics aggregate(const std::vector<ProgramRecord>& records) {
  EvalMetrics m;
  std::size_t top1 = 0, top3 = 0, exact = 0;
  long attempts = 0;
  double coverage = 0;
  for (const auto& r : records) {
    if (r.invalid) {
      ++m.discarded;
      continue;
    }
    ++m.total;
    if (r.rank == 1) ++top1;
    if (r.rank >= 1 && r.rank <= 3) ++top3;
    if (r.rank >= 1) ++m.localized;
    coverage += r.coverage;
    if (r.fixed) {
      ++m.repaired;
      attempts += r.attempts_to_first_fix;
      if (r.exact_match) ++exact;
    }
    for (const auto& p : r.patches) {
      ++m.patches;
      if (p.line == r.true_line) ++m.precise_patches;
    }
  }
  m.top1 = percent(top1, m.total);
  m.top3 = percent(top3, m.total);
  m.success_rate = percent(m.repaired, m.total);
  m.precision = percent(m.precise_patches, m.patches);
  m.exact_match = percent(exact, m.repaired);
  m.avg_attempts = m.repaired == 0 ? 0.0 : static_cast<double>(attempts) / static_cast<double>(m.repaired);
  m.coverage_mean = m.total == 0 ? 0.0 : coverage / static_cast<double>(m.total);
  return m;
}

std::string model_dir_name(std::string_view model) {
  std::string out;
  for (char c : model) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_') ? c : '_';
  return out.empty() ? "model" : out;
}

Json to_json(const ProgramRecord& r) {
  Json j;
  j["name"] = r.name;
  j["program"] = r.program;
  j["strategy"] = r.strategy;
  j["true_line"] = r.true_line;
  j["invalid"] = r.invalid;
  if (r.invalid) j["invalid_reason"] = r.invalid_reason;
  j["ranking"] = r.ranking;
  j["rank"] = r.rank;
  j["coverage"] = r.coverage;
  j["fixed"] = r.fixed;
  j["complete"] = r.complete;
  j["attempts_to_first_fix"] = r.attempts_to_first_fix;
  j["exact_match"] = r.exact_match;
  j["patches"] = Json::array();
  for (const auto& p : r.patches) j["patches"].push_back(Json{{"line", p.line}, {"text", p.text}});
  j["attempts"] = Json::array();
  for (const auto& a : r.attempts) {
    j["attempts"].push_back(Json{{"line", a.line},
                                 {"attempt", a.attempt},
                                 {"candidate", a.candidate ? Json(*a.candidate) : Json(nullptr)},
                                 {"verdict", a.verdict}});
  }
  return j;
}

ProgramRecord record_from_json(const Json& j) {
  ProgramRecord r;
  r.name = j.at("name").get<std::string>();
  r.program = j.at("program").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.true_line = j.at("true_line").get<int>();
  r.invalid = j.at("invalid").get<bool>();
  if (j.contains("invalid_reason")) r.invalid_reason = j.at("invalid_reason").get<std::string>();
  r.ranking = j.at("ranking").get<std::vector<int>>();
  r.rank = j.at("rank").get<std::size_t>();
  r.coverage = j.at("coverage").get<double>();
  r.fixed = j.at("fixed").get<bool>();
  r.complete = j.at("complete").get<bool>();
  r.attempts_to_first_fix = j.at("attempts_to_first_fix").get<int>();
  r.exact_match = j.at("exact_match").get<bool>();
  for (const auto& p : j.at("patches")) r.patches.push_back({p.at("line").get<int>(), p.at("text").get<std::string>()});
  for (const auto& a : j.at("attempts")) {
    AttemptRecord x;
    x.line = a.at("line").get<int>();
    x.attempt = a.at("attempt").get<int>();
    if (!a.at("candidate").is_null()) x.candidate = a.at("candidate").get<std::string>();
    x.verdict = a.at("verdict").get<std::string>();
    r.attempts.push_back(std::move(x));
  }
  return r;
}

Json to_json(const EvalMetrics& m) {
  Json j;
  j["top1"] = round2(m.top1);
  j["top3"] = round2(m.top3);
  j["success_rate"] = round2(m.success_rate);
  j["precision"] = round2(m.precision);
  j["exact_match"] = round2(m.exact_match);
  j["avg_attempts"] = round2(m.avg_attempts);
  j["coverage_mean"] = round2(m.coverage_mean);
  j["total"] = m.total;
  j["localized"] = m.localized;
  j["repaired"] = m.repaired;
  j["discarded"] = m.discarded;
  j["patches"] = m.patches;
  j["precise_patches"] = m.precise_patches;
  return j;
}

std::string metrics_csv(const EvalMetrics& m) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "top1,top3,success_rate,precision,exact_match,avg_attempts,coverage_mean,total,localized,repaired,discarded\n";
  out << m.top1 << ',' << m.top3 << ',' << m.success_rate << ',' << m.precision << ',' << m.exact_match << ','
      << m.avg_attempts << ',' << m.coverage_mean << ',' << m.total << ',' << m.localized << ',' << m.repaired << ','
      << m.discarded << '\n';
  return out.str();
}

std::vector<ProgramRecord> load_records(const fs::path& report_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(report_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().parent_path() == report_dir) continue;  // metrics and disagreement reports
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProgramRecord> out;
  for (const auto& f : files) out.push_back(record_from_json(Json::parse(read_file(f))));
  return out;
}

BenchmarkResult run_benchmark(const fs::path& dataset_dir, repair::ModelClient& model, const EvalOptions& options) {
  const fs::path mutations = dataset_dir / "Bugs_Code" / "Mutations";
  const fs::path hints = dataset_dir / "Bugs_Code" / "Hints";
  if (!fs::is_directory(mutations)) throw mutate::LayoutError(mutations, "the unmarked mutant directory");
  if (!fs::is_directory(hints)) throw mutate::LayoutError(hints, "the marked mutant directory");

  std::vector<Job> jobs;
  for (const auto& entry : fs::recursive_directory_iterator(mutations)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".dfy") continue;
    const fs::path rel = fs::relative(entry.path(), mutations);
    Job job;
    job.mutation = entry.path();
    job.hints = hints / rel;
    job.name = entry.path().stem().string();
    job.program = rel.has_parent_path() ? rel.parent_path().string() : job.name;
    job.strategy = strategy_tag(job.name);
    if (!options.filter.empty()) {
      const bool wanted = std::any_of(options.filter.begin(), options.filter.end(),
                                      [&](mutate::Strategy s) { return mutate::tag(s) == job.strategy; });
      if (!wanted) continue;
    }
    if (!fs::exists(job.hints)) throw mutate::LayoutError(job.hints, "a marked twin of " + rel.string());
    jobs.push_back(std::move(job));
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.mutation < b.mutation; });

  std::vector<JobResult> results(jobs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_one(jobs[i], dataset_dir, model, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  BenchmarkResult out;
  for (auto& r : results) {
    out.disagreements.insert(out.disagreements.end(), r.disagreements.begin(), r.disagreements.end());
    out.records.push_back(r.record);
  }
  out.metrics = aggregate(out.records);
  if (out.metrics.total == 0) out.warnings.push_back("no evaluable buggy programs in " + dataset_dir.string());

  out.report_dir = options.out_dir.value_or(dataset_dir) / "Repair" / model_dir_name(model.name());
  if (options.write_files) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const fs::path base = out.report_dir / results[i].record.program / results[i].record.name;
      write_file(fs::path(base.string() + ".json"), to_json(results[i].record).dump(2) + "\n");
      repair::write_transcript(fs::path(base.string() + ".jsonl"), model.name(), results[i].outcome);
    }
    write_file(out.report_dir / "metrics.json", to_json(out.metrics).dump(2) + "\n");
    write_file(out.report_dir / "metrics.csv", metrics_csv(out.metrics));
    if (options.repair.backend.backend == entail::Backend::Both) {
      Json d = Json::array();
      for (const auto& x : out.disagreements) d.push_back(serialize::to_json(x));
      write_file(out.report_dir / "disagreements.json", d.dump(2) + "\n");
    }
  }
  return out;
}

ModelTables compare_models(std::vector<std::pair<std::string, EvalMetrics>> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    const double sa = round2(a.second.success_rate), sb = round2(b.second.success_rate);
    if (sa != sb) return sa > sb;
    return round2(a.second.avg_attempts) < round2(b.second.avg_attempts);
  });
  std::size_t width = 5;
  for (const auto& [name, m] : entries) width = std::max(width, name.size());

  std::ostringstream text, csv;
  text << std::fixed << std::setprecision(2);
  csv << std::fixed << std::setprecision(2);
  text << std::left << std::setw(static_cast<int>(width)) << "model" << "  " << std::right << std::setw(12)
       << "success_rate" << "  " << std::setw(12) << "avg_attempts" << "\n";
  csv << "model,success_rate,avg_attempts\n";
  for (const auto& [name, m] : entries) {
    text << std::left << std::setw(static_cast<int>(width)) << name << "  " << std::right << std::setw(12)
         << round2(m.success_rate) << "  " << std::setw(12) << round2(m.avg_attempts) << "\n";
    csv << name << ',' << round2(m.success_rate) << ',' << round2(m.avg_attempts) << "\n";
  }
  return {text.str(), csv.str()};
}

}  // namespace hoarefix::eval
