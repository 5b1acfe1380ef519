#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hoarefix/mutate.hpp"

namespace hoarefix::mutate {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

LayoutError::LayoutError(const fs::path& path, const std::string& expectation)
    : std::runtime_error(path.string() + ": expected " + expectation) {}

namespace {

constexpr const char* kOwnedEntries[] = {"Original_Code", "Correct_Code",  "Bugs_Code",     "All_Bugs_Code",
                                         "Fail_Bugs_Code", "manifest.json", "skip_list.txt"};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LayoutError(path, "a writable file");
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DatasetSummary build_dataset(const fs::path& src_dir, const fs::path& out_dir, const GenerateOptions& options,
                             bool force) {
  if (!fs::is_directory(src_dir)) throw LayoutError(src_dir, "a directory of .dfy programs");
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) throw LayoutError(out_dir, "a directory");
    if (!fs::is_empty(out_dir)) {
      if (!force) throw LayoutError(out_dir, "an empty output directory (pass --force to overwrite)");
      for (const char* entry : kOwnedEntries) fs::remove_all(out_dir / entry);
    }
  }
  fs::create_directories(out_dir);

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(src_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".dfy") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());

  DatasetSummary summary;
  ordered_json manifest;
  manifest["seed"] = options.seed;
  manifest["strategies"] = ordered_json::array();
  for (Strategy s : options.strategies) manifest["strategies"].push_back(tag(s));
  manifest["programs"] = ordered_json::array();
  manifest["skipped"] = ordered_json::array();
  std::string skip_list;

  for (const auto& path : inputs) {
    const std::string name = path.stem().string();
    const std::string source = read_file(path);
    write_file(out_dir / "Original_Code" / (name + ".dfy"), source);

    GenerationResult generated;
    try {
      const lang::Program program = lang::parse_program(source);
      generated = generate_bugs(name, program, options);
    } catch (const std::exception& e) {
      summary.skipped.push_back(name);
      manifest["skipped"].push_back({{"program", name}, {"reason", e.what()}});
      skip_list += name + ": " + e.what() + "\n";
      continue;
    }

    ++summary.programs;
    summary.discarded += generated.discarded;
    write_file(out_dir / "Correct_Code" / (name + ".dfy"), source);

    ordered_json entry;
    entry["program"] = name;
    entry["discarded"] = generated.discarded;
    entry["mutants"] = ordered_json::array();
    if (generated.kept.empty()) {
      summary.failed.push_back(name);
      write_file(out_dir / "Fail_Bugs_Code" / (name + ".dfy"), source);
    }
    for (const auto& m : generated.kept) {
      ++summary.mutants;
      write_file(out_dir / "Bugs_Code" / "Hints" / name / (m.name + ".dfy"), m.marked);
      write_file(out_dir / "Bugs_Code" / "Mutations" / name / (m.name + ".dfy"), m.unmarked);
      write_file(out_dir / "All_Bugs_Code" / (m.name + ".dfy"), m.unmarked);
      entry["mutants"].push_back({{"name", m.name},
                                  {"strategy", to_string(m.record.strategy)},
                                  {"line", m.record.line},
                                  {"original", m.record.original},
                                  {"mutated", m.record.mutated},
                                  {"seed", m.record.seed}});
    }
    manifest["programs"].push_back(std::move(entry));
  }

  fs::create_directories(out_dir / "Bugs_Code" / "Hints");
  fs::create_directories(out_dir / "Bugs_Code" / "Mutations");
  fs::create_directories(out_dir / "All_Bugs_Code");
  fs::create_directories(out_dir / "Fail_Bugs_Code");
  fs::create_directories(out_dir / "Correct_Code");
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_file(out_dir / "skip_list.txt", skip_list);
  return summary;
}

}  // namespace hoarefix::mutate
