#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mealy/machine.hpp"

namespace mealy {

class Transformation;
Transformation canonicalize(const MealyMachine& machine, State root);

// A finite-state transformation of Σ*, always held in canonical form:
//  - the root is state 0 and every state is reachable from it,
//  - no two states induce the same transformation,
//  - states are numbered in BFS discovery order from the root, letters ascending.
// Two transformations are equal iff their serializations are byte-identical.
// Instances are immutable once built.
class Transformation {
 public:
  // The identity over a one-letter alphabet; mostly useful as a placeholder.
  Transformation() : Transformation(canonicalize(MealyMachine(1, 1), 0)) {}

  const MealyMachine& machine() const noexcept { return machine_; }
  std::size_t alphabet_size() const noexcept { return machine_.alphabet_size(); }
  std::size_t num_states() const noexcept { return machine_.num_states(); }
  static constexpr State root() noexcept { return 0; }

  // The state acting as the identity, if one is reachable.
  std::optional<State> identity_state() const noexcept { return identity_; }
  bool is_trivial(State q) const noexcept { return identity_ && *identity_ == q; }
  bool is_identity() const noexcept { return is_trivial(root()); }

  Letter output(Letter x) const { return machine_.output(root(), x); }

  // Fixed textual form:
  //   k=<k>
  //   state <i>: out=[y1,...,yk] to=[q1,...,qk]
  const std::string& serialization() const noexcept { return serialization_; }

  std::string state_name(State q) const { return format_label(machine_.label(q)); }
  std::string name() const { return state_name(root()); }

  friend bool operator==(const Transformation& a, const Transformation& b) {
    return a.serialization_ == b.serialization_;
  }

 private:
  friend Transformation canonicalize(const MealyMachine& machine, State root);

  Transformation(MealyMachine machine, std::optional<State> identity, std::string serialization)
      : machine_(std::move(machine)),
        identity_(identity),
        serialization_(std::move(serialization)) {}

  MealyMachine machine_;
  std::optional<State> identity_;
  std::string serialization_;
};

namespace detail {

inline std::string serialize_machine(const MealyMachine& m) {
  std::string s = "k=" + std::to_string(m.alphabet_size()) + "\n";
  for (State q = 0; q < m.num_states(); ++q) {
    s += "state " + std::to_string(q) + ": out=[";
    for (Letter x = 1; x <= m.alphabet_size(); ++x) {
      if (x > 1) s += ',';
      s += std::to_string(m.output(q, x));
    }
    s += "] to=[";
    for (Letter x = 1; x <= m.alphabet_size(); ++x) {
      if (x > 1) s += ',';
      s += std::to_string(m.target(q, x));
    }
    s += "]\n";
  }
  return s;
}

}  // namespace detail

// Moore partition refinement followed by BFS renumbering from the root.
inline Transformation canonicalize(const MealyMachine& machine, State root) {
  machine.validate();
  machine.check_state(root);
  const std::size_t k = machine.alphabet_size();

  // Restrict to states reachable from the root.
  std::vector<State> reach{root};
  std::vector<std::int64_t> compact(machine.num_states(), -1);
  compact[root] = 0;
  for (std::size_t i = 0; i < reach.size(); ++i) {
    for (Letter x = 1; x <= k; ++x) {
      State q = machine.target(reach[i], x);
      if (compact[q] < 0) {
        compact[q] = static_cast<std::int64_t>(reach.size());
        reach.push_back(q);
      }
    }
  }
  const std::size_t n = reach.size();

  // Initial partition by output rows, then refine by successor classes until the
  // class count is stable. Classes are numbered by sorting signature rows.
  std::vector<std::uint32_t> cls(n);
  std::vector<std::uint32_t> rows;
  std::vector<std::uint32_t> by_row(n);
  auto number_rows = [&](std::size_t width) {
    std::iota(by_row.begin(), by_row.end(), 0U);
    auto row = [&](std::uint32_t i) { return rows.begin() + static_cast<std::ptrdiff_t>(i * width); };
    std::sort(by_row.begin(), by_row.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(width), row(b),
                                          row(b) + static_cast<std::ptrdiff_t>(width));
    });
    std::uint32_t id = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && !std::equal(row(by_row[i - 1]), row(by_row[i - 1]) + static_cast<std::ptrdiff_t>(width),
                               row(by_row[i]))) {
        ++id;
      }
      cls[by_row[i]] = id;
    }
    return static_cast<std::size_t>(id) + 1;
  };
  rows.resize(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (Letter x = 1; x <= k; ++x) rows[i * k + (x - 1)] = machine.output(reach[i], x);
  }
  std::size_t num_classes = number_rows(k);
  rows.resize(n * (k + 1));
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      rows[i * (k + 1)] = cls[i];
      for (Letter x = 1; x <= k; ++x) {
        rows[i * (k + 1) + x] = cls[static_cast<std::size_t>(compact[machine.target(reach[i], x)])];
      }
    }
    std::size_t refined = number_rows(k + 1);
    if (refined == num_classes) break;
    num_classes = refined;
  }

  // Representative member per class and the best presentation label.
  std::vector<std::int64_t> rep(num_classes, -1);
  std::vector<const StateLabel*> best(num_classes, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = cls[i];
    if (rep[c] < 0) rep[c] = static_cast<std::int64_t>(i);
    const StateLabel& l = machine.label(reach[i]);
    if (l.empty()) continue;
    if (best[c] == nullptr || label_length(l) < label_length(*best[c])) best[c] = &l;
  }

  // BFS over classes from the root's class.
  std::vector<std::int64_t> number(num_classes, -1);
  std::vector<std::uint32_t> order{cls[0]};
  number[cls[0]] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    State member = reach[static_cast<std::size_t>(rep[order[i]])];
    for (Letter x = 1; x <= k; ++x) {
      auto c = cls[static_cast<std::size_t>(compact[machine.target(member, x)])];
      if (number[c] < 0) {
        number[c] = static_cast<std::int64_t>(order.size());
        order.push_back(c);
      }
    }
  }

  MealyMachine out(k, order.size());
  std::optional<State> identity;
  for (State q = 0; q < order.size(); ++q) {
    State member = reach[static_cast<std::size_t>(rep[order[q]])];
    for (Letter x = 1; x <= k; ++x) {
      auto c = cls[static_cast<std::size_t>(compact[machine.target(member, x)])];
      out.set_transition(q, x, machine.output(member, x), static_cast<State>(number[c]));
    }
  }
  for (State q = 0; q < order.size(); ++q) {
    if (out.is_identity_row(q)) {
      identity = q;
    } else if (best[order[q]] != nullptr) {
      out.set_label(q, *best[order[q]]);
    } else {
      out.set_label(q, StateLabel{Factor{"q" + std::to_string(q), 1}});
    }
  }
  std::string serialization = detail::serialize_machine(out);
  return Transformation(std::move(out), identity, std::move(serialization));
}

inline Transformation identity_transformation(std::size_t alphabet_size) {
  return canonicalize(MealyMachine(alphabet_size, 1), 0);
}

inline Word apply(const Transformation& t, const Word& u) {
  check_word(t.alphabet_size(), u);
  Word v;
  v.reserve(u.size());
  State q = t.root();
  for (Letter x : u) {
    v.push_back(t.machine().output(q, x));
    q = t.machine().target(q, x);
  }
  return v;
}

inline Letter apply(const Transformation& t, Letter x) {
  check_letter(t.alphabet_size(), x);
  return t.output(x);
}

// The transformation acting on suffixes once t has read u.
inline Transformation section(const Transformation& t, const Word& u) {
  check_word(t.alphabet_size(), u);
  if (u.empty()) return t;
  State q = t.root();
  for (Letter x : u) q = t.machine().target(q, x);
  return canonicalize(t.machine(), q);
}

inline Transformation section(const Transformation& t, Letter x) {
  return section(t, Word{x});
}

// Product applying s first, then t. `max_pairs` bounds the product before
// minimization; exceeding it throws StateBlowup.
inline Transformation compose(const Transformation& s, const Transformation& t,
                              std::size_t max_pairs = std::numeric_limits<std::size_t>::max()) {
  const std::size_t k = s.alphabet_size();
  if (t.alphabet_size() != k) {
    throw Error(ErrorKind::alphabet_mismatch, "cannot compose transformations over alphabets of size " +
                                                  std::to_string(k) + " and " +
                                                  std::to_string(t.alphabet_size()));
  }
  const std::size_t nt = t.num_states();
  const std::size_t grid = s.num_states() * nt;
  // Dense pair index for small products, hashed otherwise.
  std::vector<std::int64_t> dense(grid <= (std::size_t{1} << 22) ? grid : 0, -1);
  std::unordered_map<std::uint64_t, State> sparse;
  std::vector<std::pair<State, State>> pairs;
  auto slot_of = [&](State qs, State qt) -> State {
    const std::uint64_t key = static_cast<std::uint64_t>(qs) * nt + qt;
    if (!dense.empty()) {
      auto& slot = dense[key];
      if (slot < 0) {
        slot = static_cast<std::int64_t>(pairs.size());
        pairs.emplace_back(qs, qt);
      }
      return static_cast<State>(slot);
    }
    auto [it, fresh] = sparse.try_emplace(key, static_cast<State>(pairs.size()));
    if (fresh) pairs.emplace_back(qs, qt);
    return it->second;
  };
  auto check_size = [&] {
    if (pairs.size() > max_pairs) {
      throw Error(ErrorKind::state_blowup,
                  "product exceeds " + std::to_string(max_pairs) + " state pairs before minimization");
    }
  };
  slot_of(s.root(), t.root());
  std::vector<Letter> outs;
  std::vector<State> targets;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [qs, qt] = pairs[i];
    for (Letter x = 1; x <= k; ++x) {
      Letter mid = s.machine().output(qs, x);
      State to = slot_of(s.machine().target(qs, x), t.machine().target(qt, mid));
      outs.push_back(t.machine().output(qt, mid));
      targets.push_back(to);
    }
    check_size();
  }
  MealyMachine product(k, pairs.size());
  for (State q = 0; q < pairs.size(); ++q) {
    for (Letter x = 1; x <= k; ++x) {
      product.set_transition(q, x, outs[q * k + (x - 1)], targets[q * k + (x - 1)]);
    }
    auto [qs, qt] = pairs[q];
    StateLabel left = s.is_trivial(qs) ? StateLabel{} : s.machine().label(qs);
    StateLabel right = t.is_trivial(qt) ? StateLabel{} : t.machine().label(qt);
    product.set_label(q, concat_labels(left, right));
  }
  return canonicalize(product, 0);
}

// t^n for n >= 1, minimizing after every multiplication.
inline Transformation power(const Transformation& t, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "power exponent must be at least 1");
  std::optional<Transformation> result;
  Transformation base = t;
  while (true) {
    if (n & 1U) result = result ? compose(*result, base) : base;
    n >>= 1U;
    if (n == 0) break;
    base = compose(base, base);
  }
  return *result;
}

inline bool is_identity(const Transformation& t) { return t.is_identity(); }

inline bool equal(const Transformation& s, const Transformation& t) {
  if (s.alphabet_size() != t.alphabet_size()) {
    throw Error(ErrorKind::alphabet_mismatch, "cannot compare transformations over different alphabets");
  }
  return s == t;
}

}  // namespace mealy

template <>
struct std::hash<mealy::Transformation> {
  std::size_t operator()(const mealy::Transformation& t) const noexcept {
    return std::hash<std::string>{}(t.serialization());
  }
};
