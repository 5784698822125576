#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace mealy {

// Strongly connected components of a graph on nodes 0..n-1.
//
// Component ids come out in Tarjan completion order, which is a reverse
// topological order of the condensation: for every edge u -> v,
// component[u] >= component[v], with equality iff u and v share a component.
struct SccDecomposition {
  std::vector<std::size_t> component;             // node -> component id
  std::vector<std::vector<std::size_t>> members;  // component id -> nodes

  std::size_t size() const noexcept { return members.size(); }
};

// `successors(v, fn)` must call fn(w) for each edge v -> w. Iterative, so deep
// graphs do not exhaust the call stack.
template <typename SuccessorFn>
SccDecomposition strongly_connected_components(std::size_t n, SuccessorFn&& successors) {
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  SccDecomposition out;
  out.component.assign(n, unvisited);

  std::vector<std::size_t> number(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> adjacency(n);
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  std::vector<Frame> frames;

  for (std::size_t start = 0; start < n; ++start) {
    if (number[start] != unvisited) continue;
    frames.push_back({start, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      std::size_t v = f.node;
      if (f.next_edge == 0 && number[v] == unvisited) {
        number[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        successors(v, [&](std::size_t w) { adjacency[v].push_back(w); });
      }
      if (f.next_edge < adjacency[v].size()) {
        std::size_t w = adjacency[v][f.next_edge++];
        if (number[w] == unvisited) {
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], number[w]);
        }
        continue;
      }
      if (low[v] == number[v]) {
        std::vector<std::size_t> scc;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component[w] = out.members.size();
          scc.push_back(w);
        } while (w != v);
        std::sort(scc.begin(), scc.end());
        out.members.push_back(std::move(scc));
      }
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return out;
}

}  // namespace mealy
