#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hoarefix/eval.hpp"
#include "hoarefix/faultloc.hpp"
#include "hoarefix/mutate.hpp"
#include "hoarefix/repair.hpp"
#include "hoarefix/serialize.hpp"

namespace fs = std::filesystem;
using namespace hoarefix;
using serialize::Json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kExternal = 3 };

struct Config {
  std::string solver = "z3";
  int solver_timeout_ms = 20000;
  std::string backend = "smt";
  int bound = 5;
  std::string model_url;
  std::string model_name;
  int max_tokens = 30;
  double temperature = 0.2;
  unsigned max_in_flight = 1;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
  std::string dump_smt;
};

entail::BackendOptions backend_options(const Config& c) {
  entail::BackendOptions o;
  o.backend = *entail::parse_backend(c.backend);
  o.solver.executable = c.solver;
  o.solver.timeout_ms = c.solver_timeout_ms;
  if (!c.dump_smt.empty()) o.solver.dump_dir = c.dump_smt;
  o.bound = c.bound;
  o.jobs = c.jobs;
  return o;
}

std::unique_ptr<repair::ModelClient> make_model(const Config& c) {
  if (c.model_url.empty()) return std::make_unique<repair::MockModel>();
  repair::HttpModelConfig h;
  h.base_url = c.model_url;
  if (!c.model_name.empty()) h.model = c.model_name;
  h.max_in_flight = c.max_in_flight;
  return std::make_unique<repair::HttpChatModel>(h);
}

repair::RepairOptions repair_options(const Config& c) {
  repair::RepairOptions o;
  o.backend = backend_options(c);
  o.max_tokens = c.max_tokens;
  o.temperature = c.temperature;
  return o;
}

std::string read_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<mutate::Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<mutate::Strategy> out;
  for (const auto& n : names) {
    auto s = mutate::parse_strategy(n);
    if (!s) throw std::invalid_argument("unknown strategy '" + n + "'");
    out.push_back(*s);
  }
  return out;
}

Json verification_json(const std::string& file, const entail::ProgramVerification& v) {
  Json j;
  j["file"] = file;
  j["verified"] = v.verified();
  j["methods"] = Json::array();
  Json disagreements = Json::array();
  for (std::size_t i = 0; i < v.results.size(); ++i) {
    j["methods"].push_back(serialize::to_json(v.analyses[i], v.results[i]));
    for (const auto& d : v.results[i].disagreements) disagreements.push_back(serialize::to_json(d));
  }
  j["disagreements"] = std::move(disagreements);
  return j;
}

int cmd_verify(const std::string& file, const Config& c) {
  const auto program = lang::parse_program(read_source(file));
  const auto v = entail::verify_program(program, backend_options(c));
  std::cout << verification_json(file, v).dump(2) << "\n";
  return v.verified() ? kOk : kNegative;
}

int cmd_localize(const std::string& file, const Config& c) {
  const auto program = lang::parse_program(read_source(file));
  const auto v = entail::verify_program(program, backend_options(c));
  Json j;
  j["file"] = file;
  j["verified"] = v.verified();
  j["methods"] = Json::object();
  for (std::size_t i = 0; i < program.methods.size(); ++i) {
    j["methods"][program.methods[i].name] =
        serialize::to_json(faultloc::localize(program.methods[i], v.analyses[i], v.results[i]));
  }
  j["ranking"] = serialize::to_json(faultloc::localize_program(program, v));
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_mutate(const std::string& src, const std::vector<std::string>& strategies, bool force, const Config& c) {
  if (c.out.empty()) throw std::invalid_argument("--out is required for mutate");
  mutate::GenerateOptions o;
  if (!strategies.empty()) o.strategies = parse_strategies(strategies);
  o.seed = c.seed;
  o.backend = backend_options(c);
  const auto s = mutate::build_dataset(src, c.out, o, force);
  std::cout << "programs: " << s.programs << "\nmutants: " << s.mutants << "\ndiscarded: " << s.discarded
            << "\nfailed: " << s.failed.size() << "\nskipped: " << s.skipped.size() << "\n";
  return kOk;
}

int cmd_repair(const std::string& file, const std::string& transcript, const Config& c) {
  auto model = make_model(c);  // fails fast on a missing key
  const auto program = lang::parse_program(read_source(file));
  const auto options = repair_options(c);
  const auto v = entail::verify_program(program, options.backend);
  Json j;
  j["file"] = file;
  if (v.verified()) {
    j["status"] = "verified";
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  const auto report = faultloc::localize_program(program, v);
  const auto outcome = repair::repair_loop(program, report, *model, options);
  const fs::path log = transcript.empty() ? fs::path(file).replace_extension(".transcript.jsonl") : fs::path(transcript);
  repair::write_transcript(log, model->name(), outcome);

  j = serialize::to_json(outcome);
  j["file"] = file;
  j["model"] = model->name();
  j["transcript"] = log.string();
  if (!outcome.patches.empty()) {
    const auto& patch = outcome.patches.front();
    const fs::path fixed = fs::path(file).replace_extension(".fixed.dfy");
    std::ofstream(fixed, std::ios::binary) << lang::replace_line(program, patch.line, patch.text).source();
    j["fixed_file"] = fixed.string();
    std::cerr << "line " << patch.line << ": " << patch.text << "\n";
  }
  std::cout << j.dump(2) << "\n";
  if (!outcome.complete) {
    std::cerr << outcome.error << "\n";
    return kExternal;
  }
  return outcome.status == repair::RepairStatus::Fixed ? kOk : kNegative;
}

int cmd_eval(const std::string& dataset, const std::vector<std::string>& filter, const Config& c) {
  auto model = make_model(c);
  eval::EvalOptions o;
  o.repair = repair_options(c);
  o.jobs = c.jobs;
  o.filter = parse_strategies(filter);
  if (!c.out.empty()) o.out_dir = c.out;
  const auto result = eval::run_benchmark(dataset, *model, o);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<std::pair<std::string, eval::EvalMetrics>> rows;
  const fs::path repair_root = result.report_dir.parent_path();
  for (const auto& entry : fs::directory_iterator(repair_root)) {
    if (!entry.is_directory() || entry.path() == result.report_dir) continue;
    if (!fs::exists(entry.path() / "metrics.json")) continue;
    rows.emplace_back(entry.path().filename().string(), eval::aggregate(eval::load_records(entry.path())));
  }
  rows.emplace_back(model->name(), result.metrics);
  std::cout << serialize::Json(eval::to_json(result.metrics)).dump(2) << "\n";
  std::cout << eval::compare_models(rows).text;
  if (c.backend == "both") {
    std::cout << "backend disagreements: " << result.disagreements.size() << "\n";
    return result.disagreements.empty() ? kOk : kNegative;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Specification-guided fault localization and repair for contract-annotated programs"};
  app.require_subcommand(1);
  Config c;

  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--solver", c.solver, "SMT-LIB solver executable")->capture_default_str();
    sub->add_option("--solver-timeout-ms", c.solver_timeout_ms, "Per-query wall-clock limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--backend", c.backend, "smt, brute or both")
        ->check(CLI::IsMember({"smt", "brute", "both"}))
        ->capture_default_str();
    sub->add_option("--bound", c.bound, "Brute-force search box [-bound, bound]")
        ->check(CLI::Range(1, entail::kMaxBound))
        ->capture_default_str();
    sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--dump-smt", c.dump_smt, "Write every solver query to this directory");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model-url", c.model_url, "Chat completion base URL; the offline mock is used when absent");
    sub->add_option("--model-name", c.model_name, "Remote model name");
    sub->add_option("--max-tokens", c.max_tokens, "Completion token cap")->capture_default_str();
    sub->add_option("--temperature", c.temperature, "Sampling temperature")->capture_default_str();
    sub->add_option("--max-in-flight", c.max_in_flight, "Concurrent model requests")->capture_default_str();
  };

  std::string file, dir, transcript;
  std::vector<std::string> strategies, filter;
  bool force = false;

  auto* verify = app.add_subcommand("verify", "Check every entailment of every method");
  verify->add_option("file", file)->required();
  add_solver(verify);

  auto* localize = app.add_subcommand("localize", "Rank suspicious lines");
  localize->add_option("file", file)->required();
  add_solver(localize);

  auto* mutate_cmd = app.add_subcommand("mutate", "Build a buggy dataset from verified programs");
  mutate_cmd->add_option("src", dir)->required();
  mutate_cmd->add_option("--out", c.out, "Dataset directory");
  mutate_cmd->add_option("--strategies", strategies, "op, coef, reorder, combined")->delimiter(',');
  mutate_cmd->add_option("--seed", c.seed)->capture_default_str();
  mutate_cmd->add_flag("--force", force, "Replace an existing dataset");
  add_solver(mutate_cmd);

  auto* repair_cmd = app.add_subcommand("repair", "Localize and repair one program");
  repair_cmd->add_option("file", file)->required();
  repair_cmd->add_option("--transcript", transcript, "JSON-lines attempt log");
  add_solver(repair_cmd);
  add_model(repair_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate localization and repair over a dataset");
  eval_cmd->add_option("dataset", dir)->required();
  eval_cmd->add_option("--filter", filter, "Only these strategies")->delimiter(',');
  eval_cmd->add_option("--out", c.out, "Root of the Repair/ report tree");
  add_solver(eval_cmd);
  add_model(eval_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*verify) return cmd_verify(file, c);
    if (*localize) return cmd_localize(file, c);
    if (*mutate_cmd) return cmd_mutate(dir, strategies, force, c);
    if (*repair_cmd) return cmd_repair(file, transcript, c);
    if (*eval_cmd) return cmd_eval(dir, filter, c);
  } catch (const lang::LangError& e) {
    std::cerr << file << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kInput;
  } catch (const entail::SolverNotFound& e) {
    std::cerr << e.what() << "\n";
    return kExternal;
  } catch (const entail::SolverProtocolError& e) {
    std::cerr << e.what() << "\n";
    return kExternal;
  } catch (const repair::MissingApiKey& e) {
    std::cerr << e.what() << "\n";
    return kExternal;
  } catch (const repair::ModelUnavailable& e) {
    std::cerr << e.what() << "\n";
    return kExternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
