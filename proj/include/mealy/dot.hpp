#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "mealy/activity.hpp"
#include "mealy/orbit.hpp"
#include "mealy/transformation.hpp"

// Graphviz export. Nodes are emitted in canonical order so output is stable.
namespace mealy {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

inline std::string mealy_to_dot(const Transformation& t) {
  std::ostringstream out;
  out << "digraph mealy {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (State q = 0; q < t.num_states(); ++q) {
    out << "  n" << q << " [label=" << detail::dot_quote(t.state_name(q)) << "];\n";
  }
  for (State q = 0; q < t.num_states(); ++q) {
    for (Letter x = 1; x <= t.alphabet_size(); ++x) {
      out << "  n" << q << " -> n" << t.machine().target(q, x) << " [label=\"" << x << "|"
          << t.machine().output(q, x) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline std::string pruned_output_to_dot(const PrunedOutputNfa& nfa, const Transformation& t) {
  std::ostringstream out;
  out << "digraph out {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (State q : nfa.states()) {
    out << "  n" << q << " [label=" << detail::dot_quote(t.state_name(q)) << "];\n";
  }
  for (const auto& tr : nfa.transitions()) {
    out << "  n" << tr.from << " -> n" << tr.to << " [label=\"" << tr.label << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

// Member names sorted lexicographically, e.g. {t0,t0^2}.
inline std::string subset_label(const std::vector<State>& subset, const Transformation& t) {
  std::vector<std::string> names;
  for (State q : subset) names.push_back(t.state_name(q));
  std::sort(names.begin(), names.end());
  std::string s = "{";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) s += ',';
    s += names[i];
  }
  return s + "}";
}

inline std::string det_out_to_dot(const DetOut& det, const Transformation& t) {
  std::ostringstream out;
  out << "digraph detout {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < det.size(); ++i) {
    out << "  s" << i << " [label=" << detail::dot_quote(subset_label(det.subset(i), t)) << "];\n";
  }
  for (std::size_t i = 0; i < det.size(); ++i) {
    for (Letter y = 1; y <= det.alphabet_size(); ++y) {
      if (auto j = det.next(i, y)) out << "  s" << i << " -> s" << *j << " [label=\"" << y << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline std::string osg_to_dot(const OsgGraph& g) {
  std::ostringstream out;
  out << "digraph osg {\n  node [shape=box, style=rounded];\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << "  v" << v << " [label=" << detail::dot_quote(g.vertices[v].label()) << "];\n";
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& e : g.edges[v]) {
      out << "  v" << e.from << " -> v" << e.to << " [label=\"" << e.letter << " (" << e.m << "," << e.ell
          << ")\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace mealy
