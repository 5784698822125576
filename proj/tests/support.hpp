#pragma once

// Test-only oracles and generators. Nothing here goes through canonical forms,
// determinization or the orbit graph: words are pushed through raw machine
// tables directly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mealy/activity.hpp"
#include "mealy/orbit.hpp"
#include "mealy/transformation.hpp"
#include "mealy/wreath.hpp"

namespace mealy::testing {

// All words of length n over 1..k, in lexicographic order.
inline std::vector<Word> words_of_length(std::size_t k, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    next.reserve(out.size() * k);
    for (const auto& w : out) {
      for (Letter x = 1; x <= k; ++x) {
        Word v = w;
        v.push_back(x);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<Word> words_up_to(std::size_t k, std::size_t max_len) {
  std::vector<Word> out;
  for (std::size_t n = 0; n <= max_len; ++n) {
    auto w = words_of_length(k, n);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

// Runs u through a raw machine table from `root`.
inline Word run(const MealyMachine& m, State root, const Word& u) {
  Word v;
  State q = root;
  for (Letter x : u) {
    v.push_back(m.output(q, x));
    q = m.target(q, x);
  }
  return v;
}

inline State run_state(const MealyMachine& m, State root, const Word& u) {
  State q = root;
  for (Letter x : u) q = m.target(q, x);
  return q;
}

// Whether (m, q) acts as the identity, decided by exploring reachable states
// without minimization: every reachable state must output its input letter.
inline bool acts_trivially(const MealyMachine& m, State q) {
  std::vector<bool> seen(m.num_states(), false);
  std::vector<State> todo{q};
  seen[q] = true;
  while (!todo.empty()) {
    State p = todo.back();
    todo.pop_back();
    for (Letter x = 1; x <= m.alphabet_size(); ++x) {
      if (m.output(p, x) != x) return false;
      State r = m.target(p, x);
      if (!seen[r]) {
        seen[r] = true;
        todo.push_back(r);
      }
    }
  }
  return true;
}

// Activity by definition on a raw (non-canonical) machine.
inline std::size_t activity_by_definition(const MealyMachine& m, State root, std::size_t n) {
  std::set<Word> images;
  for (const auto& u : words_of_length(m.alphabet_size(), n)) {
    if (!acts_trivially(m, run_state(m, root, u))) images.insert(run(m, root, u));
  }
  return images.size();
}

struct RandomMachine {
  MealyMachine machine;
  State root = 0;
};

inline RandomMachine random_machine(std::mt19937_64& rng, std::size_t max_states, std::size_t max_k,
                                    std::size_t min_k = 1) {
  std::uniform_int_distribution<std::size_t> k_dist(min_k, max_k), n_dist(1, max_states);
  std::size_t k = k_dist(rng), n = n_dist(rng);
  std::uniform_int_distribution<std::size_t> state_dist(0, n - 1), letter_dist(1, k);
  RandomMachine r{MealyMachine(k, n), 0};
  for (State q = 0; q < n; ++q) {
    for (Letter x = 1; x <= k; ++x) {
      r.machine.set_transition(q, x, static_cast<Letter>(letter_dist(rng)),
                               static_cast<State>(state_dist(rng)));
    }
    r.machine.set_label(q, StateLabel{Factor{"g" + std::to_string(q), 1}});
  }
  r.root = static_cast<State>(state_dist(rng));
  return r;
}

inline Transformation random_transformation(std::mt19937_64& rng, std::size_t max_states, std::size_t k) {
  auto r = random_machine(rng, max_states, k, k);
  return canonicalize(r.machine, r.root);
}

// Shortest input on which s and t differ, searching lengths up to max_len.
inline std::optional<Word> distinguishing_word(const Transformation& s, const Transformation& t,
                                               std::size_t max_len) {
  for (std::size_t n = 0; n <= max_len; ++n) {
    for (const auto& u : words_of_length(s.alphabet_size(), n)) {
      if (run(s.machine(), s.root(), u) != run(t.machine(), t.root(), u)) return u;
    }
  }
  return std::nullopt;
}

// Set of nontrivial states reached by an input whose image is w.
inline std::vector<State> states_with_output(const Transformation& t, const Word& w) {
  std::set<State> out;
  for (const auto& u : words_of_length(t.alphabet_size(), w.size())) {
    if (run(t.machine(), t.root(), u) != w) continue;
    State q = run_state(t.machine(), t.root(), u);
    if (!t.is_trivial(q)) out.insert(q);
  }
  return {out.begin(), out.end()};
}

// t^n applied to u by iterating the machine n times.
inline Word apply_power(const Transformation& t, std::size_t n, Word u) {
  for (std::size_t i = 0; i < n; ++i) u = run(t.machine(), t.root(), u);
  return u;
}

// For every output word w of length n: the nontrivial states reached by inputs
// whose image is w. Words with no such state are absent.
inline std::map<Word, std::vector<State>> output_state_sets(const Transformation& t, std::size_t n) {
  std::map<Word, std::set<State>> sets;
  for (const auto& u : words_of_length(t.alphabet_size(), n)) {
    State q = run_state(t.machine(), t.root(), u);
    if (!t.is_trivial(q)) sets[run(t.machine(), t.root(), u)].insert(q);
  }
  std::map<Word, std::vector<State>> out;
  for (auto& [w, qs] : sets) out.emplace(w, std::vector<State>(qs.begin(), qs.end()));
  return out;
}

}  // namespace mealy::testing
