#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mealy/error.hpp"

namespace mealy {

// Letters are 1-based (1..k); state indices are 0-based.
using Letter = std::uint32_t;
using State = std::uint32_t;
using Word = std::vector<Letter>;

// One factor of a presentation label, e.g. `t0^2` is {"t0", 2}.
struct Factor {
  std::string name;
  std::size_t exponent = 1;

  bool operator==(const Factor&) const = default;
};

// Human-readable name of a state as a product of generator names, kept only for
// printing. The empty label denotes the identity and prints as `1`.
using StateLabel = std::vector<Factor>;

inline void append_factor(StateLabel& label, const Factor& factor) {
  if (factor.exponent == 0) return;
  if (!label.empty() && label.back().name == factor.name) {
    label.back().exponent += factor.exponent;
  } else {
    label.push_back(factor);
  }
}

inline StateLabel concat_labels(const StateLabel& left, const StateLabel& right) {
  StateLabel out = left;
  for (const auto& f : right) append_factor(out, f);
  return out;
}

inline std::size_t label_length(const StateLabel& label) {
  std::size_t n = 0;
  for (const auto& f : label) n += f.exponent;
  return n;
}

inline std::string format_label(const StateLabel& label) {
  if (label.empty()) return "1";
  bool single_chars = true;
  for (const auto& f : label) single_chars = single_chars && f.name.size() == 1;
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i > 0 && !single_chars) out += '*';
    out += label[i].name;
    if (label[i].exponent > 1) out += '^' + std::to_string(label[i].exponent);
  }
  return out;
}

inline void check_letter(std::size_t alphabet_size, Letter x) {
  if (x < 1 || x > alphabet_size) {
    throw Error(ErrorKind::letter_out_of_range,
                "letter " + std::to_string(x) + " outside 1.." + std::to_string(alphabet_size));
  }
}

inline void check_word(std::size_t alphabet_size, const Word& u) {
  for (Letter x : u) check_letter(alphabet_size, x);
}

// Complete deterministic letter-to-letter transducer. Every (state, letter) pair
// has exactly one output letter and one target; a fresh machine starts with
// every state acting as the identity.
class MealyMachine {
 public:
  MealyMachine() = default;

  MealyMachine(std::size_t alphabet_size, std::size_t num_states)
      : k_(alphabet_size),
        n_(num_states),
        out_(alphabet_size * num_states),
        to_(alphabet_size * num_states),
        labels_(num_states) {
    if (alphabet_size == 0) {
      throw Error(ErrorKind::invalid_argument, "alphabet size must be at least 1");
    }
    for (std::size_t q = 0; q < n_; ++q) {
      for (std::size_t x = 0; x < k_; ++x) {
        out_[q * k_ + x] = static_cast<Letter>(x + 1);
        to_[q * k_ + x] = static_cast<State>(q);
      }
    }
  }

  std::size_t alphabet_size() const noexcept { return k_; }
  std::size_t num_states() const noexcept { return n_; }

  Letter output(State q, Letter x) const { return out_[q * k_ + (x - 1)]; }
  State target(State q, Letter x) const { return to_[q * k_ + (x - 1)]; }

  void set_transition(State q, Letter x, Letter y, State to) {
    check_state(q);
    check_state(to);
    check_letter(k_, x);
    check_letter(k_, y);
    out_[q * k_ + (x - 1)] = y;
    to_[q * k_ + (x - 1)] = to;
  }

  const StateLabel& label(State q) const { return labels_[q]; }
  void set_label(State q, StateLabel label) {
    check_state(q);
    labels_[q] = std::move(label);
  }

  // True iff q outputs every letter unchanged and loops on itself.
  bool is_identity_row(State q) const {
    for (Letter x = 1; x <= k_; ++x) {
      if (output(q, x) != x || target(q, x) != q) return false;
    }
    return true;
  }

  void check_state(State q) const {
    if (q >= n_) {
      throw Error(ErrorKind::invalid_state_index,
                  "state " + std::to_string(q) + " out of range (machine has " +
                      std::to_string(n_) + " states)");
    }
  }

  void validate() const {
    if (k_ == 0) throw Error(ErrorKind::invalid_argument, "alphabet size must be at least 1");
    for (std::size_t i = 0; i < out_.size(); ++i) {
      check_letter(k_, out_[i]);
      check_state(to_[i]);
    }
  }

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::vector<Letter> out_;
  std::vector<State> to_;
  std::vector<StateLabel> labels_;
};

}  // namespace mealy
