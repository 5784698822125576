#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mealy/activity.hpp"
#include "mealy/dot.hpp"
#include "mealy/orbit.hpp"
#include "mealy/wreath.hpp"

// Command implementations behind the `mealy` tool. Each command returns both a
// human-readable report and a JSON result document (schema `format: 1`; big
// integers are decimal strings).
namespace mealy::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_input_error = 2,
  exit_inconclusive = 3,
  exit_resource_cap = 4,
};

struct LoadedFile {
  std::string path;
  std::string digest;
  WreathSystem system;
};

inline std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline LoadedFile load_source(std::string path, const std::string& text) {
  return LoadedFile{std::move(path), fnv1a_digest(text), parse_automaton_file(text)};
}

inline LoadedFile load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_source(path, buf.str());
}

struct CommandResult {
  json document;
  std::string text;
  int exit_code = exit_ok;
};

namespace detail {

inline json envelope(const std::string& command, const LoadedFile& file, json parameters) {
  json doc;
  doc["format"] = 1;
  doc["command"] = command;
  doc["input"] = {{"path", file.path}, {"digest", file.digest}};
  doc["parameters"] = std::move(parameters);
  return doc;
}

inline std::string resolve_state(const LoadedFile& file, const std::optional<std::string>& state) {
  std::string name = state ? *state : file.system.default_name();
  file.system.at(name);  // throws UnknownStateName
  return name;
}

inline json growth_json(const GrowthClass& g) {
  if (const auto* p = std::get_if<Polynomial>(&g)) {
    return {{"kind", "polynomial"}, {"degree", p->degree}, {"label", describe(g)}};
  }
  const auto& e = std::get<Exponential>(g);
  return {{"kind", "exponential"}, {"lambda", e.lambda}, {"rate", e.rate}, {"label", describe(g)}};
}

template <typename F>
CommandResult timed(F&& body) {
  auto start = std::chrono::steady_clock::now();
  CommandResult r = body();
  auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  r.document["timings"] = {{"elapsed_ms", elapsed.count()}};
  return r;
}

}  // namespace detail

struct ClassifyParams {
  std::optional<std::string> state;
  double precision = default_precision;
  std::size_t max_subsets = default_max_subsets;
};

inline CommandResult cmd_classify(const LoadedFile& file, const ClassifyParams& params) {
  return detail::timed([&] {
    std::string name = detail::resolve_state(file, params.state);
    const Transformation& t = file.system.at(name);
    auto c = classify_detailed(det_out(t, params.max_subsets), params.precision);
    CommandResult r;
    r.document = detail::envelope(
        "classify", file,
        {{"state", name}, {"precision", params.precision}, {"max_subsets", params.max_subsets}});
    r.document["result"] = {{"class", detail::growth_json(c.growth)},
                            {"detout",
                             {{"subsets", c.stats.subsets},
                              {"reachable", c.stats.reachable},
                              {"sccs", c.stats.sccs},
                              {"cyclic_sccs", c.stats.cyclic_sccs}}}};
    std::ostringstream out;
    out << describe(c.growth) << "\n";
    out << "detout: subsets=" << c.stats.subsets << " reachable=" << c.stats.reachable
        << " sccs=" << c.stats.sccs << " cyclic=" << c.stats.cyclic_sccs << "\n";
    r.text = out.str();
    return r;
  });
}

struct ActivityParams {
  std::optional<std::string> state;
  std::size_t upto = 8;
  bool oracle = false;
  std::uint64_t budget = default_enumeration_budget;
  std::size_t max_subsets = default_max_subsets;
};

inline CommandResult cmd_activity(const LoadedFile& file, const ActivityParams& params) {
  return detail::timed([&] {
    std::string name = detail::resolve_state(file, params.state);
    const Transformation& t = file.system.at(name);
    auto series = activity_series(det_out(t, params.max_subsets), params.upto);
    CommandResult r;
    r.document = detail::envelope("activity", file,
                                  {{"state", name},
                                   {"upto", params.upto},
                                   {"oracle", params.oracle},
                                   {"budget", params.budget}});
    json values = json::array();
    std::ostringstream out;
    for (std::size_t n = 1; n <= params.upto; ++n) {
      values.push_back(to_string(series[n]));
      out << (n > 1 ? " " : "") << series[n];
    }
    out << "\n";
    r.document["result"] = {{"activity", values}};
    if (params.oracle) {
      json brute = json::array();
      bool agrees = true;
      out << "oracle:";
      for (std::size_t n = 1; n <= params.upto; ++n) {
        BigInt b = brute_force_activity(t, n, params.budget);
        agrees = agrees && b == series[n];
        brute.push_back(to_string(b));
        out << " " << b;
      }
      out << "\n" << (agrees ? "oracle agrees" : "ORACLE MISMATCH") << "\n";
      r.document["result"]["oracle"] = brute;
      r.document["result"]["oracle_agrees"] = agrees;
      if (!agrees) r.exit_code = exit_failure;
    }
    r.text = out.str();
    return r;
  });
}

struct OrderParams {
  std::optional<std::string> state;
  std::size_t max_vertices = default_max_vertices;
  bool exact = true;
};

inline CommandResult cmd_order(const LoadedFile& file, const OrderParams& params) {
  return detail::timed([&] {
    std::string name = detail::resolve_state(file, params.state);
    const Transformation& t = file.system.at(name);
    OrderOptions options;
    options.max_vertices = params.max_vertices;
    options.exact_index = params.exact;
    OrderDecision d = decide_order(t, options);

    CommandResult r;
    r.document = detail::envelope(
        "order", file, {{"state", name}, {"max_vertices", params.max_vertices}, {"exact", params.exact}});
    json verdict;
    if (const auto* inf = std::get_if<Infinite>(&d.verdict)) {
      verdict = {{"kind", "infinite"},
                 {"witness",
                  {{"from", inf->witness.from},
                   {"letter", inf->witness.letter},
                   {"m", inf->witness.m},
                   {"ell", inf->witness.ell},
                   {"to", inf->witness.to}}}};
    } else if (const auto* fin = std::get_if<Finite>(&d.verdict)) {
      verdict = {{"kind", "finite"},
                 {"period", to_string(fin->period)},
                 {"index_lower", to_string(fin->index_lower)},
                 {"index_upper", to_string(fin->index_upper)},
                 {"exact_index", fin->exact_index ? json(to_string(*fin->exact_index)) : json(nullptr)},
                 {"oracle_period", fin->oracle_period ? json(to_string(*fin->oracle_period)) : json(nullptr)},
                 {"costs",
                  {{"i_minus", to_string(fin->costs.i_minus)},
                   {"i_plus", to_string(fin->costs.i_plus)},
                   {"p", to_string(fin->costs.p)}}}};
    } else {
      verdict = {{"kind", "inconclusive"},
                 {"vertices_explored", std::get<Inconclusive>(d.verdict).vertices_explored},
                 {"cap", std::get<Inconclusive>(d.verdict).component_cap ? "component_states" : "vertices"}};
      r.exit_code = exit_inconclusive;
    }
    r.document["result"] = {
        {"verdict", verdict},
        {"graph", {{"vertices", d.vertices}, {"edges", d.edges}, {"complete", d.graph_complete}}},
        {"growth", d.growth ? json(describe(*d.growth)) : json(nullptr)},
        {"finite_graph_guaranteed", d.finite_graph_guaranteed}};
    std::ostringstream out;
    out << describe(d.verdict) << "\n";
    out << "graph: vertices=" << d.vertices << " edges=" << d.edges
        << " complete=" << (d.graph_complete ? "yes" : "no") << "\n";
    r.text = out.str();
    return r;
  });
}

struct ExportParams {
  std::optional<std::string> state;
  std::string what = "mealy";  // mealy | out | detout | osg
  std::size_t max_vertices = default_max_vertices;
  std::size_t max_subsets = default_max_subsets;
};

// The DOT text is returned in `text`; the tool writes it to --dot PATH or stdout.
inline CommandResult cmd_export(const LoadedFile& file, const ExportParams& params) {
  return detail::timed([&] {
    std::string name = detail::resolve_state(file, params.state);
    const Transformation& t = file.system.at(name);
    CommandResult r;
    std::size_t nodes = 0;
    if (params.what == "mealy") {
      r.text = mealy_to_dot(t);
      nodes = t.num_states();
    } else if (params.what == "out") {
      auto nfa = pruned_output(t);
      r.text = pruned_output_to_dot(nfa, t);
      nodes = nfa.states().size();
    } else if (params.what == "detout") {
      auto det = det_out(t, params.max_subsets);
      r.text = det_out_to_dot(det, t);
      nodes = det.size();
    } else if (params.what == "osg") {
      auto g = build_osg(t, params.max_vertices);
      r.text = osg_to_dot(g);
      nodes = g.size();
      if (!g.complete) r.exit_code = exit_inconclusive;
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown export kind '" + params.what + "'");
    }
    r.document = detail::envelope("export", file, {{"state", name}, {"what", params.what}});
    r.document["result"] = {{"nodes", nodes}, {"dot", r.text}};
    return r;
  });
}

// Left-to-right product: the first name is applied first. The printed recursion
// is structural only, so equal products print identically.
inline CommandResult cmd_compose(const LoadedFile& file, const std::vector<std::string>& word) {
  return detail::timed([&] {
    if (word.empty()) throw Error(ErrorKind::invalid_argument, "empty composition word");
    Transformation product = file.system.at(word.front());
    for (std::size_t i = 1; i < word.size(); ++i) product = compose(product, file.system.at(word[i]));
    CommandResult r;
    r.document = detail::envelope("compose", file, {{"word", word}});
    r.text = print_wreath(product, "q0", false);
    r.document["result"] = {{"name", product.name()},
                            {"states", product.num_states()},
                            {"identity", product.is_identity()},
                            {"serialization", product.serialization()},
                            {"wreath", r.text}};
    return r;
  });
}

inline int exit_code_for(const Error& e) {
  return e.is_resource_cap() ? exit_resource_cap : exit_input_error;
}

}  // namespace mealy::cli
