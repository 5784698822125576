#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mealy/bigint.hpp"
#include "mealy/scc.hpp"
#include "mealy/transformation.hpp"

namespace mealy {

struct NfaTransition {
  State from;
  Letter label;
  State to;
  std::size_t multiplicity;  // number of input letters producing this edge

  bool operator==(const NfaTransition&) const = default;
};

// Output automaton of a canonical machine restricted to its nontrivial states:
// p --y--> q whenever the machine has p --x|y--> q for some x. States keep the
// machine's canonical indices.
class PrunedOutputNfa {
 public:
  std::size_t alphabet_size() const noexcept { return k_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<NfaTransition>& transitions() const noexcept { return transitions_; }
  bool contains(State q) const { return q < present_.size() && present_[q]; }

  // Sorted, duplicate-free targets of q under output y.
  const std::vector<State>& successors(State q, Letter y) const { return succ_[q * k_ + (y - 1)]; }

 private:
  friend PrunedOutputNfa pruned_output(const Transformation& t);

  std::size_t k_ = 0;
  std::vector<State> states_;
  std::vector<bool> present_;
  std::vector<NfaTransition> transitions_;
  std::vector<std::vector<State>> succ_;
};

inline PrunedOutputNfa pruned_output(const Transformation& t) {
  const std::size_t k = t.alphabet_size();
  const std::size_t n = t.num_states();
  PrunedOutputNfa nfa;
  nfa.k_ = k;
  nfa.present_.assign(n, false);
  nfa.succ_.assign(n * k, {});
  for (State q = 0; q < n; ++q) {
    if (t.is_trivial(q)) continue;
    nfa.states_.push_back(q);
    nfa.present_[q] = true;
  }
  std::map<std::tuple<State, Letter, State>, std::size_t> counts;
  for (State p : nfa.states_) {
    for (Letter x = 1; x <= k; ++x) {
      State q = t.machine().target(p, x);
      if (t.is_trivial(q)) continue;
      ++counts[{p, t.machine().output(p, x), q}];
    }
  }
  for (const auto& [key, mult] : counts) {
    auto [p, y, q] = key;
    nfa.transitions_.push_back({p, y, q, mult});
    nfa.succ_[p * k + (y - 1)].push_back(q);
  }
  return nfa;
}

// Accessible Rabin-Scott determinization of a pruned output automaton. It is
// explored from the root singleton first and then from every other singleton
// {q}, so one DetOut serves every state of the machine. Empty subsets are never
// stored; missing transitions are reported as std::nullopt.
class DetOut {
 public:
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::size_t alphabet_size() const noexcept { return k_; }
  std::size_t size() const noexcept { return subsets_.size(); }
  bool empty() const noexcept { return subsets_.empty(); }

  // Index of the root subset {t}; absent when t is the identity.
  std::optional<std::size_t> root() const noexcept { return root_; }

  const std::vector<State>& subset(std::size_t i) const { return subsets_[i]; }
  const std::vector<std::vector<State>>& subsets() const noexcept { return subsets_; }

  std::optional<std::size_t> next(std::size_t i, Letter y) const {
    std::size_t j = table_[i * k_ + (y - 1)];
    if (j == none) return std::nullopt;
    return j;
  }

  std::optional<std::size_t> find(const std::vector<State>& subset) const {
    auto it = index_.find(subset);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Subsets reachable from the root, in BFS order.
  std::vector<std::size_t> reachable_from_root() const {
    std::vector<std::size_t> order;
    if (!root_) return order;
    std::vector<bool> seen(size(), false);
    order.push_back(*root_);
    seen[*root_] = true;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (Letter y = 1; y <= k_; ++y) {
        if (auto j = next(order[i], y); j && !seen[*j]) {
          seen[*j] = true;
          order.push_back(*j);
        }
      }
    }
    return order;
  }

 private:
  friend DetOut determinize(const PrunedOutputNfa& nfa, State root_state, std::size_t max_subsets);

  std::size_t k_ = 0;
  std::optional<std::size_t> root_;
  std::vector<std::vector<State>> subsets_;
  std::vector<std::size_t> table_;
  std::map<std::vector<State>, std::size_t> index_;
};

inline constexpr std::size_t default_max_subsets = 1'000'000;

inline DetOut determinize(const PrunedOutputNfa& nfa, State root_state,
                          std::size_t max_subsets = default_max_subsets) {
  const std::size_t k = nfa.alphabet_size();
  DetOut det;
  det.k_ = k;
  if (!nfa.contains(root_state)) return det;

  auto intern = [&](std::vector<State> subset) -> std::size_t {
    auto [it, fresh] = det.index_.try_emplace(subset, det.subsets_.size());
    if (fresh) {
      if (det.subsets_.size() >= max_subsets) {
        throw Error(ErrorKind::subset_blowup,
                    "determinization exceeded " + std::to_string(max_subsets) + " subsets");
      }
      det.subsets_.push_back(std::move(subset));
      det.table_.resize(det.subsets_.size() * k, DetOut::none);
    }
    return it->second;
  };

  std::vector<State> seeds{root_state};
  for (State q : nfa.states()) {
    if (q != root_state) seeds.push_back(q);
  }
  std::size_t processed = 0;
  for (State seed : seeds) {
    std::size_t id = intern({seed});
    if (seed == root_state) det.root_ = id;
    // Subsets are interned in discovery order, so the worklist is a cursor.
    for (; processed < det.subsets_.size(); ++processed) {
      for (Letter y = 1; y <= k; ++y) {
        std::vector<State> target;
        for (State p : det.subsets_[processed]) {
          const auto& succ = nfa.successors(p, y);
          target.insert(target.end(), succ.begin(), succ.end());
        }
        if (target.empty()) continue;
        std::sort(target.begin(), target.end());
        target.erase(std::unique(target.begin(), target.end()), target.end());
        std::size_t j = intern(std::move(target));
        det.table_[processed * k + (y - 1)] = j;
      }
    }
  }
  return det;
}

inline DetOut det_out(const Transformation& t, std::size_t max_subsets = default_max_subsets) {
  return determinize(pruned_output(t), t.root(), max_subsets);
}

// α(0..upto): number of paths of each length starting at the root subset.
inline std::vector<BigInt> activity_series(const DetOut& det, std::size_t upto) {
  std::vector<BigInt> series(upto + 1, 0);
  if (!det.root()) return series;
  const std::size_t k = det.alphabet_size();
  // paths[i] = number of paths of the current length starting at subset i.
  std::vector<BigInt> paths(det.size(), 1), next(det.size());
  series[0] = 1;
  for (std::size_t n = 1; n <= upto; ++n) {
    for (std::size_t i = 0; i < det.size(); ++i) {
      BigInt sum = 0;
      for (Letter y = 1; y <= k; ++y) {
        if (auto j = det.next(i, y)) sum += paths[*j];
      }
      next[i] = std::move(sum);
    }
    std::swap(paths, next);
    series[n] = paths[*det.root()];
  }
  return series;
}

inline BigInt activity(const DetOut& det, std::size_t n) { return activity_series(det, n)[n]; }

inline BigInt activity(const Transformation& t, std::size_t n,
                       std::size_t max_subsets = default_max_subsets) {
  return activity(det_out(t, max_subsets), n);
}

inline constexpr std::uint64_t default_enumeration_budget = 1'000'000;

// Counts output words of length n reachable with a nontrivial section by
// enumerating all k^n input words.
inline BigInt brute_force_activity(const Transformation& t, std::size_t n,
                                   std::uint64_t budget = default_enumeration_budget) {
  const std::uint64_t k = t.alphabet_size();
  std::uint64_t words = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (words > budget / k) {
      throw Error(ErrorKind::budget_exceeded, std::to_string(k) + "^" + std::to_string(n) +
                                                  " words exceed the enumeration budget of " +
                                                  std::to_string(budget));
    }
    words *= k;
  }
  std::unordered_set<std::uint64_t> images;
  struct Frame {
    State q;
    std::uint64_t code;
    std::size_t depth;
  };
  std::vector<Frame> stack{{t.root(), 0, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.depth == n) {
      if (!t.is_trivial(f.q)) images.insert(f.code);
      continue;
    }
    for (Letter x = 1; x <= k; ++x) {
      std::uint64_t code = f.code * k + (t.machine().output(f.q, x) - 1);
      stack.push_back({t.machine().target(f.q, x), code, f.depth + 1});
    }
  }
  return BigInt(images.size());
}

struct Polynomial {
  int degree = -1;

  bool operator==(const Polynomial&) const = default;
};

struct Exponential {
  double lambda = 1.0;
  double rate = 0.0;  // natural log of lambda
};

using GrowthClass = std::variant<Polynomial, Exponential>;

struct GrowthRate {
  double lambda = 1.0;
  double rate = 0.0;
};

struct DetOutStats {
  std::size_t subsets = 0;
  std::size_t reachable = 0;
  std::size_t sccs = 0;
  std::size_t cyclic_sccs = 0;
};

struct Classification {
  GrowthClass growth;
  DetOutStats stats;
};

namespace detail {

// SCC structure of the part of DetOut reachable from the root.
struct ReachableSccs {
  std::vector<std::size_t> nodes;  // local index -> subset id
  SccDecomposition scc;
  std::vector<std::size_t> internal_edges;  // per component, counted per letter
};

inline ReachableSccs reachable_sccs(const DetOut& det) {
  ReachableSccs r;
  r.nodes = det.reachable_from_root();
  std::vector<std::size_t> local(det.size(), DetOut::none);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) local[r.nodes[i]] = i;
  const std::size_t k = det.alphabet_size();
  r.scc = strongly_connected_components(r.nodes.size(), [&](std::size_t v, auto&& emit) {
    for (Letter y = 1; y <= k; ++y) {
      if (auto j = det.next(r.nodes[v], y)) emit(local[*j]);
    }
  });
  r.internal_edges.assign(r.scc.size(), 0);
  for (std::size_t v = 0; v < r.nodes.size(); ++v) {
    for (Letter y = 1; y <= k; ++y) {
      if (auto j = det.next(r.nodes[v], y); j && r.scc.component[local[*j]] == r.scc.component[v]) {
        ++r.internal_edges[r.scc.component[v]];
      }
    }
  }
  return r;
}

// Perron root of one strongly connected block, by power iteration on A + I
// (primitive, so the iteration converges) with a Collatz-Wielandt bracket
// min (Bx)_i/x_i <= rho(B) <= max (Bx)_i/x_i as the stopping rule.
inline double block_spectral_radius(const DetOut& det, const std::vector<std::size_t>& block,
                                    double precision, std::size_t max_iterations) {
  const std::size_t k = det.alphabet_size();
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < block.size(); ++i) local.emplace(block[i], i);
  std::vector<std::vector<std::size_t>> adj(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    for (Letter y = 1; y <= k; ++y) {
      if (auto j = det.next(block[i], y)) {
        if (auto it = local.find(*j); it != local.end()) adj[i].push_back(it->second);
      }
    }
  }
  std::vector<double> x(block.size(), 1.0), y(block.size());
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      double sum = x[i];
      for (std::size_t j : adj[i]) sum += x[j];
      y[i] = sum;
      lo = std::min(lo, sum / x[i]);
      hi = std::max(hi, sum / x[i]);
      top = std::max(top, sum);
    }
    if (hi - lo <= precision * lo) return 0.5 * (lo + hi) - 1.0;
    for (std::size_t i = 0; i < block.size(); ++i) x[i] = y[i] / top;
  }
  throw Error(ErrorKind::no_convergence, "power iteration did not converge after " +
                                             std::to_string(max_iterations) +
                                             " iterations; lambda in [" + std::to_string(lo - 1.0) +
                                             ", " + std::to_string(hi - 1.0) + "]");
}

}  // namespace detail

inline constexpr double default_precision = 1e-9;
inline constexpr std::size_t default_max_iterations = 100'000;

// Perron eigenvalue of the root-reachable part of DetOut. Polynomial activity
// (including the identity) reports lambda = 1.
inline GrowthRate growth_rate(const DetOut& det, double precision = default_precision,
                              std::size_t max_iterations = default_max_iterations) {
  auto r = detail::reachable_sccs(det);
  double lambda = 1.0;
  for (std::size_t c = 0; c < r.scc.size(); ++c) {
    const auto& members = r.scc.members[c];
    if (r.internal_edges[c] <= members.size()) continue;  // acyclic or a simple cycle
    std::vector<std::size_t> block;
    for (std::size_t v : members) block.push_back(r.nodes[v]);
    lambda = std::max(lambda, detail::block_spectral_radius(det, block, precision, max_iterations));
  }
  return {lambda, std::log(lambda)};
}

inline GrowthRate growth_rate(const Transformation& t, double precision = default_precision,
                              std::size_t max_subsets = default_max_subsets,
                              std::size_t max_iterations = default_max_iterations) {
  return growth_rate(det_out(t, max_subsets), precision, max_iterations);
}

inline Classification classify_detailed(const DetOut& det, double precision = default_precision,
                                        std::size_t max_iterations = default_max_iterations) {
  auto r = detail::reachable_sccs(det);
  Classification out;
  out.stats.subsets = det.size();
  out.stats.reachable = r.nodes.size();
  out.stats.sccs = r.scc.size();
  bool exponential = false;
  std::vector<bool> cyclic(r.scc.size(), false);
  for (std::size_t c = 0; c < r.scc.size(); ++c) {
    cyclic[c] = r.internal_edges[c] > 0;
    if (cyclic[c]) ++out.stats.cyclic_sccs;
    if (r.internal_edges[c] > r.scc.members[c].size()) exponential = true;
  }
  if (exponential) {
    auto g = growth_rate(det, precision, max_iterations);
    out.growth = Exponential{g.lambda, g.rate};
    return out;
  }
  if (r.nodes.empty()) {
    out.growth = Polynomial{-1};
    return out;
  }
  // Longest chain of cyclic components; ids are sinks-first.
  const std::size_t k = det.alphabet_size();
  std::vector<std::size_t> local(det.size(), DetOut::none);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) local[r.nodes[i]] = i;
  std::vector<int> chain(r.scc.size(), 0);
  for (std::size_t c = 0; c < r.scc.size(); ++c) {
    int best = 0;
    for (std::size_t v : r.scc.members[c]) {
      for (Letter y = 1; y <= k; ++y) {
        if (auto j = det.next(r.nodes[v], y)) {
          std::size_t d = r.scc.component[local[*j]];
          if (d != c) best = std::max(best, chain[d]);
        }
      }
    }
    chain[c] = best + (cyclic[c] ? 1 : 0);
  }
  out.growth = Polynomial{chain[r.scc.component[0]] - 1};
  return out;
}

inline Classification classify_detailed(const Transformation& t, double precision = default_precision,
                                        std::size_t max_subsets = default_max_subsets) {
  return classify_detailed(det_out(t, max_subsets), precision);
}

inline GrowthClass classify(const Transformation& t, double precision = default_precision,
                            std::size_t max_subsets = default_max_subsets) {
  return classify_detailed(t, precision, max_subsets).growth;
}

inline std::string describe(const GrowthClass& g) {
  if (const auto* p = std::get_if<Polynomial>(&g)) return "SPol(" + std::to_string(p->degree) + ")";
  const auto& e = std::get<Exponential>(g);
  char buf[96];
  std::snprintf(buf, sizeof buf, "SExp(rate=%.6f, lambda=%.6f)", e.rate, e.lambda);
  return buf;
}

}  // namespace mealy
