#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "mealy/activity.hpp"
#include "mealy/bigint.hpp"
#include "mealy/scc.hpp"
#include "mealy/transformation.hpp"

namespace mealy {

// Vertex (s, t) of the orbit signalizer graph.
struct OsgVertex {
  Transformation s;
  Transformation t;

  std::string key() const { return s.serialization() + '|' + t.serialization(); }
  std::string label() const { return "(" + s.name() + ", " + t.name() + ")"; }

  friend bool operator==(const OsgVertex& a, const OsgVertex& b) { return a.s == b.s && a.t == b.t; }
};

// Edge at letter x: m and ell are the index and period of the orbit of x under
// s t^ω, i.e. of the letter sequence y_i = σ_t^i(s(x)).
struct OsgEdge {
  std::size_t from = 0;
  Letter letter = 1;
  std::size_t m = 0;
  std::size_t ell = 1;
  std::size_t to = 0;

  // Edges that make a cycle through them costly.
  bool costly() const noexcept { return m > 0 || ell > 1; }
};

struct LetterTransition {
  std::size_t m = 0;
  std::size_t ell = 1;
  OsgVertex target;
};

namespace detail {

// Lazily computed t^1..t^k for one vertex.
class PowerCache {
 public:
  explicit PowerCache(const Transformation& t,
                      std::size_t max_pairs = std::numeric_limits<std::size_t>::max())
      : t_(t), max_pairs_(max_pairs), powers_{t} {}

  const Transformation& get(std::size_t n) {
    while (powers_.size() < n) powers_.push_back(compose(powers_.back(), t_, max_pairs_));
    return powers_[n - 1];
  }

  std::size_t max_pairs() const noexcept { return max_pairs_; }

 private:
  const Transformation& t_;
  std::size_t max_pairs_;
  std::vector<Transformation> powers_;
};

inline LetterTransition letter_transition(const Transformation& s, const Transformation& t, Letter x,
                                          PowerCache& powers) {
  const std::size_t k = t.alphabet_size();
  std::vector<std::size_t> first_seen(k + 1, 0);  // 1 + position, 0 = unseen
  std::vector<Letter> orbit;
  Letter y = s.output(x);
  while (first_seen[y] == 0) {
    first_seen[y] = orbit.size() + 1;
    orbit.push_back(y);
    y = t.output(y);
  }
  LetterTransition out;
  out.m = first_seen[y] - 1;
  out.ell = orbit.size() - out.m;
  Transformation r = out.m == 0 ? s : compose(s, powers.get(out.m), powers.max_pairs());
  out.target = OsgVertex{section(r, x), section(powers.get(out.ell), orbit[out.m])};
  return out;
}

}  // namespace detail

inline LetterTransition letter_transition(const OsgVertex& v, Letter x) {
  if (v.s.alphabet_size() != v.t.alphabet_size()) {
    throw Error(ErrorKind::alphabet_mismatch, "vertex components use different alphabets");
  }
  check_letter(v.t.alphabet_size(), x);
  detail::PowerCache powers(v.t);
  return detail::letter_transition(v.s, v.t, x, powers);
}

struct OsgGraph {
  std::vector<OsgVertex> vertices;            // vertex 0 is the source (1, t)
  std::vector<std::vector<OsgEdge>> edges;    // per vertex, letters ascending; empty if unexpanded
  std::vector<bool> expanded;
  bool complete = false;
  bool stopped_at_costly_cycle = false;
  bool stopped_at_state_cap = false;  // a vertex component outgrew max_component_states

  static constexpr std::size_t root() noexcept { return 0; }
  std::size_t size() const noexcept { return vertices.size(); }

  std::size_t num_edges() const {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.size();
    return n;
  }
};

struct OsgComponent {
  std::vector<std::size_t> vertices;
  bool cyclic = false;
  bool costly = false;
  std::optional<OsgEdge> witness;  // an internal edge with m > 0 or ell > 1
};

// SCCs of the explored part of the graph, sinks first.
inline std::vector<OsgComponent> cycle_flags(const OsgGraph& g) {
  auto scc = strongly_connected_components(g.size(), [&](std::size_t v, auto&& emit) {
    for (const auto& e : g.edges[v]) emit(e.to);
  });
  std::vector<OsgComponent> out(scc.size());
  for (std::size_t c = 0; c < scc.size(); ++c) out[c].vertices = scc.members[c];
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& e : g.edges[v]) {
      std::size_t c = scc.component[v];
      if (scc.component[e.to] != c) continue;
      out[c].cyclic = true;
      if (e.costly() && !out[c].costly) {
        out[c].costly = true;
        out[c].witness = e;
      }
    }
  }
  return out;
}

inline bool has_costly_cycle(const OsgGraph& g) {
  auto flags = cycle_flags(g);
  return std::any_of(flags.begin(), flags.end(), [](const OsgComponent& c) { return c.costly; });
}

inline constexpr std::size_t default_max_vertices = 10'000;
inline constexpr std::size_t default_max_component_states = 20'000;

struct OsgOptions {
  std::size_t max_vertices = default_max_vertices;
  // Largest canonical state count allowed for s, t or the powers of t at a vertex.
  std::size_t max_component_states = default_max_component_states;
  // Stop as soon as a costly cycle has closed inside the expanded region.
  bool stop_at_costly_cycle = false;
};

// Breadth-first exploration from (1, t), letters ascending. Exploration stops
// before the vertex count would exceed max_vertices, or when a vertex would need
// a transformation larger than max_component_states; the vertex being expanded
// at that point keeps no edges and `complete` stays false.
inline OsgGraph build_osg(const Transformation& t, const OsgOptions& options = {}) {
  const std::size_t k = t.alphabet_size();
  OsgGraph g;
  std::unordered_map<std::string, std::size_t> index;
  auto add_vertex = [&](OsgVertex v) {
    index.emplace(v.key(), g.vertices.size());
    g.vertices.push_back(std::move(v));
    g.edges.emplace_back();
    g.expanded.push_back(false);
  };
  add_vertex(OsgVertex{identity_transformation(k), t});

  std::size_t next_check = 8;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const OsgVertex current = g.vertices[v];
    // Products are bounded before minimization too, so one oversized power
    // cannot exhaust memory.
    detail::PowerCache powers(current.t, options.max_component_states * 8);
    auto too_big = [&](const Transformation& x) { return x.num_states() > options.max_component_states; };
    std::vector<LetterTransition> moves;
    std::vector<std::string> keys;
    std::size_t fresh = 0;
    for (Letter x = 1; x <= k; ++x) {
      try {
        moves.push_back(detail::letter_transition(current.s, current.t, x, powers));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::state_blowup) throw;
        g.stopped_at_state_cap = true;
        return g;
      }
      keys.push_back(moves.back().target.key());
      bool seen_before = index.count(keys.back()) != 0 ||
                         std::find(keys.begin(), keys.end() - 1, keys.back()) != keys.end() - 1;
      if (!seen_before) ++fresh;
    }
    if (g.vertices.size() + fresh > options.max_vertices) return g;
    for (const auto& move : moves) {
      if (too_big(move.target.s) || too_big(move.target.t)) {
        g.stopped_at_state_cap = true;
        return g;
      }
    }

    for (Letter x = 1; x <= k; ++x) {
      auto& move = moves[x - 1];
      auto it = index.find(keys[x - 1]);
      std::size_t to;
      if (it == index.end()) {
        to = g.vertices.size();
        add_vertex(std::move(move.target));
      } else {
        to = it->second;
      }
      g.edges[v].push_back(OsgEdge{v, x, move.m, move.ell, to});
    }
    g.expanded[v] = true;

    if (options.stop_at_costly_cycle && v + 1 == next_check) {
      next_check *= 2;
      if (has_costly_cycle(g)) {
        g.stopped_at_costly_cycle = true;
        return g;
      }
    }
  }
  g.complete = true;
  return g;
}

inline OsgGraph build_osg(const Transformation& t, std::size_t max_vertices) {
  OsgOptions options;
  options.max_vertices = max_vertices;
  return build_osg(t, options);
}

// Aggregated walk costs over the graph: i_minus <= i_plus, p >= 1.
struct WalkCost {
  BigInt i_minus = 0;
  BigInt i_plus = 0;
  BigInt p = 1;
};

// Walk costs of a graph with no costly cycle. Cycle edges then carry
// (m, ell) = (0, 1) and contribute nothing, so suprema are taken over paths in
// the condensation, which is acyclic.
inline WalkCost walk_costs(const OsgGraph& g) {
  auto scc = strongly_connected_components(g.size(), [&](std::size_t v, auto&& emit) {
    for (const auto& e : g.edges[v]) emit(e.to);
  });
  std::vector<std::vector<OsgEdge>> outgoing(scc.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& e : g.edges[v]) {
      std::size_t c = scc.component[v];
      if (scc.component[e.to] == c) {
        if (e.costly()) {
          throw Error(ErrorKind::infinite_costs,
                      "cycle through vertex " + std::to_string(v) + " carries letter " +
                          std::to_string(e.letter) + " with (m, ell) = (" + std::to_string(e.m) + ", " +
                          std::to_string(e.ell) + ")");
        }
        continue;
      }
      outgoing[c].push_back(e);
    }
  }

  // Component ids are sinks-first, so successors are finished before their sources.
  //   i+(C) = max(0, max_e m_e + ell_e i+(target))
  //   L(C)  = lcm(1, lcm_e ell_e L(target))
  std::vector<BigInt> i_plus(scc.size(), 0), period(scc.size(), 1);
  for (std::size_t c = 0; c < scc.size(); ++c) {
    for (const auto& e : outgoing[c]) {
      std::size_t d = scc.component[e.to];
      BigInt candidate = BigInt(e.m) + BigInt(e.ell) * i_plus[d];
      if (candidate > i_plus[c]) i_plus[c] = candidate;
      period[c] = lcm(period[c], BigInt(e.ell) * period[d]);
    }
  }

  // i- does not factor through a single value per vertex because each term adds
  // an unscaled +1; it depends on the product P of the periods read so far:
  //   f(C, P) = max(0, max_e [m_e > 0]((m_e - 1) P + 1) + f(target, P ell_e)).
  std::map<std::pair<std::size_t, BigInt>, BigInt> memo;
  auto inf_index = [&](auto&& self, std::size_t c, const BigInt& prefix) -> BigInt {
    auto key = std::make_pair(c, prefix);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    BigInt best = 0;
    for (const auto& e : outgoing[c]) {
      BigInt term = e.m > 0 ? BigInt(e.m - 1) * prefix + 1 : BigInt(0);
      BigInt candidate = term + self(self, scc.component[e.to], prefix * e.ell);
      if (candidate > best) best = candidate;
    }
    memo.emplace(std::move(key), best);
    return best;
  };

  WalkCost out;
  if (g.size() == 0) return out;
  std::size_t root = scc.component[OsgGraph::root()];
  out.i_plus = i_plus[root];
  out.p = period[root];
  out.i_minus = inf_index(inf_index, root, BigInt(1));
  return out;
}

struct IndexPeriod {
  std::size_t index = 1;
  std::size_t period = 1;

  bool operator==(const IndexPeriod&) const = default;
};

inline constexpr std::size_t default_power_state_cap = 100'000;

namespace detail {

inline void check_power_size(const Transformation& t, std::size_t exponent, std::size_t state_cap) {
  if (t.num_states() > state_cap) {
    throw Error(ErrorKind::state_blowup, "power " + std::to_string(exponent) + " has " +
                                             std::to_string(t.num_states()) + " states (cap " +
                                             std::to_string(state_cap) + ")");
  }
}

}  // namespace detail

// Minimal i in 1..max_index with t^i = t^(i+period_hint), together with the least
// q >= 1 such that t^i = t^(i+q). Returns std::nullopt if no such i exists.
inline std::optional<IndexPeriod> power_oracle(const Transformation& t, std::size_t period_hint,
                                               std::size_t max_index,
                                               std::size_t state_cap = default_power_state_cap) {
  if (period_hint == 0) throw Error(ErrorKind::invalid_argument, "period hint must be at least 1");
  std::vector<Transformation> powers{t};  // powers[j] = t^(j+1)
  detail::check_power_size(t, 1, state_cap);
  auto get = [&](std::size_t n) -> const Transformation& {
    while (powers.size() < n) {
      powers.push_back(compose(powers.back(), t));
      detail::check_power_size(powers.back(), powers.size(), state_cap);
    }
    return powers[n - 1];
  };
  for (std::size_t i = 1; i <= max_index; ++i) {
    if (get(i) == get(i + period_hint)) {
      for (std::size_t q = 1; q <= period_hint; ++q) {
        if (get(i) == get(i + q)) return IndexPeriod{i, q};
      }
    }
  }
  return std::nullopt;
}

// First repetition among t, t^2, ..., t^max_powers: t^index = t^(index+period).
inline std::optional<IndexPeriod> direct_index_period(const Transformation& t, std::size_t max_powers,
                                                      std::size_t state_cap = default_power_state_cap) {
  std::unordered_map<std::string, std::size_t> seen;
  Transformation current = t;
  for (std::size_t j = 1; j <= max_powers; ++j) {
    if (j > 1) current = compose(current, t);
    detail::check_power_size(current, j, state_cap);
    auto [it, fresh] = seen.emplace(current.serialization(), j);
    if (!fresh) return IndexPeriod{it->second, j - it->second};
  }
  return std::nullopt;
}

struct Infinite {
  OsgEdge witness;
};

struct Finite {
  BigInt period = 1;
  BigInt index_lower = 0;
  BigInt index_upper = 1;
  std::optional<BigInt> exact_index;
  std::optional<BigInt> oracle_period;  // minimal period seen by the power oracle
  WalkCost costs;
};

struct Inconclusive {
  std::size_t vertices_explored = 0;
  bool component_cap = false;  // stopped by max_component_states rather than max_vertices
};

using OrderVerdict = std::variant<Infinite, Finite, Inconclusive>;

struct OrderDecision {
  OrderVerdict verdict;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  bool graph_complete = false;
  std::optional<GrowthClass> growth;   // absent if classification hit a cap
  bool finite_graph_guaranteed = false;  // bounded activity: SPol(0) or SPol(-1)
};

struct OrderOptions {
  std::size_t max_vertices = default_max_vertices;
  bool exact_index = true;
  std::size_t max_component_states = default_max_component_states;
  std::size_t power_state_cap = default_power_state_cap;
  std::size_t max_subsets = default_max_subsets;
};

// Index convention: the exact index is the least i >= 1 with t^i = t^(i+p).
// The walk bound i+ uses the monoid convention (t^0 = 1), so the reported upper
// bound is max(i+, 1).
inline OrderDecision decide_order(const Transformation& t, const OrderOptions& options = {}) {
  OrderDecision out;
  try {
    out.growth = classify(t, default_precision, options.max_subsets);
    if (const auto* p = std::get_if<Polynomial>(&*out.growth)) out.finite_graph_guaranteed = p->degree <= 0;
  } catch (const Error& e) {
    if (!e.is_resource_cap()) throw;
  }

  OsgOptions osg;
  osg.max_vertices = options.max_vertices;
  osg.max_component_states = options.max_component_states;
  osg.stop_at_costly_cycle = true;
  OsgGraph g = build_osg(t, osg);
  out.vertices = g.size();
  out.edges = g.num_edges();
  out.graph_complete = g.complete;

  for (const auto& c : cycle_flags(g)) {
    if (c.costly) {
      out.verdict = Infinite{*c.witness};
      return out;
    }
  }
  if (!g.complete) {
    out.verdict = Inconclusive{g.size(), g.stopped_at_state_cap};
    return out;
  }

  Finite f;
  f.costs = walk_costs(g);
  f.period = f.costs.p;
  f.index_lower = f.costs.i_minus;
  f.index_upper = f.costs.i_plus > 1 ? f.costs.i_plus : BigInt(1);
  if (options.exact_index) {
    BigInt bound = f.index_upper + f.period;
    if (bound <= BigInt(std::numeric_limits<std::size_t>::max() / 2)) {
      try {
        auto found = power_oracle(t, static_cast<std::size_t>(f.period), static_cast<std::size_t>(bound),
                                  options.power_state_cap);
        if (found) {
          f.exact_index = BigInt(found->index);
          f.oracle_period = BigInt(found->period);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::state_blowup) throw;
      }
    }
  }
  out.verdict = std::move(f);
  return out;
}

inline std::string describe(const OrderVerdict& v) {
  if (const auto* inf = std::get_if<Infinite>(&v)) {
    return "Infinite (cycle edge at vertex " + std::to_string(inf->witness.from) + ", letter " +
           std::to_string(inf->witness.letter) + ", (m,ell)=(" + std::to_string(inf->witness.m) + "," +
           std::to_string(inf->witness.ell) + "))";
  }
  if (const auto* fin = std::get_if<Finite>(&v)) {
    std::string s = "Finite{";
    if (fin->exact_index) s += "index " + to_string(*fin->exact_index) + ", ";
    s += "period " + to_string(fin->period) + ", lower " + to_string(fin->index_lower) + ", upper " +
         to_string(fin->index_upper) + "}";
    return s;
  }
  return "Inconclusive{vertices " + std::to_string(std::get<Inconclusive>(v).vertices_explored) + "}";
}

}  // namespace mealy
