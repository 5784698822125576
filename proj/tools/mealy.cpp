#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mealy/commands.hpp"

namespace {

using mealy::cli::CommandResult;

struct Outcome {
  std::string out;
  std::string err;
  int code = 0;
};

struct Common {
  std::vector<std::string> files;
  std::optional<std::string> state;
  bool json = false;
  bool timings = true;
  std::size_t jobs = 1;
};

Outcome run_one(const std::string& path, const Common& common,
                const std::function<CommandResult(const mealy::cli::LoadedFile&)>& command) {
  Outcome o;
  try {
    auto file = mealy::cli::load_file(path);
    CommandResult r = command(file);
    if (!common.timings) r.document.erase("timings");
    o.out = common.json ? r.document.dump(2) + "\n" : r.text;
    o.code = r.exit_code;
  } catch (const mealy::Error& e) {
    o.err = path + ": " + e.what() + "\n";
    o.code = mealy::cli::exit_code_for(e);
  }
  return o;
}

// Runs a command over every input file; output order matches the argument order
// regardless of --jobs.
int run_batch(const Common& common, const std::function<CommandResult(const mealy::cli::LoadedFile&)>& command) {
  std::vector<Outcome> outcomes(common.files.size());
  const std::size_t jobs = std::max<std::size_t>(1, common.jobs);
  for (std::size_t start = 0; start < common.files.size(); start += jobs) {
    std::vector<std::future<Outcome>> running;
    for (std::size_t i = start; i < std::min(common.files.size(), start + jobs); ++i) {
      running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_one,
                                   std::cref(common.files[i]), std::cref(common), std::cref(command)));
    }
    for (std::size_t i = 0; i < running.size(); ++i) outcomes[start + i] = running[i].get();
  }
  int code = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (common.files.size() > 1 && !common.json) std::cout << "== " << common.files[i] << " ==\n";
    std::cout << outcomes[i].out;
    std::cerr << outcomes[i].err;
    int c = outcomes[i].code;
    if (c != 0 && (code == 0 || code == mealy::cli::exit_inconclusive)) code = c;
  }
  return code;
}

void add_common(CLI::App* cmd, Common& common, bool many_files) {
  if (many_files) {
    cmd->add_option("files", common.files, "Automaton files")->required()->check(CLI::ExistingFile);
    cmd->add_option("--jobs", common.jobs, "Process files concurrently");
  } else {
    cmd->add_option("file", common.files, "Automaton file")->required()->expected(1)->check(CLI::ExistingFile);
  }
  cmd->add_option("--state", common.state, "State to analyze (default: main, else first declared)");
  cmd->add_flag("--json", common.json, "Print the JSON result document");
  cmd->add_flag("!--no-timings", common.timings, "Omit timings from the JSON document");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mealy transformation analysis: activity growth and the order problem"};
  app.require_subcommand(1);
  Common common;

  mealy::cli::ClassifyParams classify;
  auto* c_classify = app.add_subcommand("classify", "Place a transformation in the SPol/SExp hierarchy");
  add_common(c_classify, common, true);
  c_classify->add_option("--precision", classify.precision, "Relative precision of lambda")
      ->default_val(mealy::default_precision);
  c_classify->add_option("--max-subsets", classify.max_subsets, "Determinization cap")
      ->default_val(mealy::default_max_subsets);

  mealy::cli::ActivityParams activity;
  auto* c_activity = app.add_subcommand("activity", "Print the activity series 1..N");
  add_common(c_activity, common, true);
  c_activity->add_option("--upto", activity.upto, "Largest length N")->default_val(8);
  c_activity->add_flag("--oracle", activity.oracle, "Cross-check against word enumeration");
  c_activity->add_option("--budget", activity.budget, "Word enumeration budget for --oracle")
      ->default_val(mealy::default_enumeration_budget);

  mealy::cli::OrderParams order;
  auto* c_order = app.add_subcommand("order", "Decide whether the transformation has finite order");
  add_common(c_order, common, true);
  c_order->add_option("--max-vertices", order.max_vertices, "Orbit signalizer graph cap")
      ->default_val(mealy::default_max_vertices);
  c_order->add_flag("--exact,!--no-exact", order.exact, "Compute the exact index with the power oracle")
      ->default_val(true);

  mealy::cli::ExportParams exp;
  std::optional<std::string> dot_path;
  auto* c_export = app.add_subcommand("export", "Write a Graphviz rendering");
  add_common(c_export, common, false);
  c_export->add_option("--what", exp.what, "mealy | out | detout | osg")
      ->check(CLI::IsMember({"mealy", "out", "detout", "osg"}))
      ->default_val("mealy");
  c_export->add_option("--dot", dot_path, "Output path (default: stdout)");
  c_export->add_option("--max-vertices", exp.max_vertices, "Orbit signalizer graph cap")
      ->default_val(mealy::default_max_vertices);

  std::string word;
  auto* c_compose = app.add_subcommand("compose", "Print the canonical product of named states");
  add_common(c_compose, common, false);
  c_compose->add_option("--word", word, "Space-separated names, applied left to right")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(c_classify)) {
    classify.state = common.state;
    return run_batch(common, [&](const auto& f) { return mealy::cli::cmd_classify(f, classify); });
  }
  if (app.got_subcommand(c_activity)) {
    activity.state = common.state;
    return run_batch(common, [&](const auto& f) { return mealy::cli::cmd_activity(f, activity); });
  }
  if (app.got_subcommand(c_order)) {
    order.state = common.state;
    return run_batch(common, [&](const auto& f) { return mealy::cli::cmd_order(f, order); });
  }
  if (app.got_subcommand(c_export)) {
    exp.state = common.state;
    bool to_file = dot_path.has_value() && !common.json;
    return run_batch(common, [&](const auto& f) {
      CommandResult r = mealy::cli::cmd_export(f, exp);
      if (dot_path) {
        std::ofstream out(*dot_path, std::ios::binary);
        if (!out || !(out << r.text)) throw mealy::Error(mealy::ErrorKind::io, "cannot write '" + *dot_path + "'");
        if (to_file) r.text = "wrote " + *dot_path + "\n";
      }
      return r;
    });
  }
  if (app.got_subcommand(c_compose)) {
    std::vector<std::string> names;
    std::istringstream in(word);
    for (std::string n; in >> n;) names.push_back(n);
    return run_batch(common, [&](const auto& f) { return mealy::cli::cmd_compose(f, names); });
  }
  return 0;
}
