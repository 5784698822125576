#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mealy/transformation.hpp"

namespace mealy {

// Transformations declared by a system of wreath recursions, e.g.
//
//   alphabet = 2
//   t0 = (1, t0)[2,2]
//   main = t0
//
// The reserved name `1` denotes the identity and needs no equation.
struct WreathSystem {
  std::size_t alphabet_size = 0;
  std::vector<std::string> names;  // declaration order
  std::map<std::string, Transformation> transformations;
  std::optional<std::string> main;
  MealyMachine machine;  // all declared states, in declaration order (plus `1` if used)

  bool contains(const std::string& name) const { return transformations.count(name) != 0; }

  const Transformation& at(const std::string& name) const {
    auto it = transformations.find(name);
    if (it == transformations.end()) {
      throw Error(ErrorKind::unknown_state_name, "no state named '" + name + "'");
    }
    return it->second;
  }

  // --state NAME if given, otherwise `main`, otherwise the first declaration.
  const std::string& default_name() const {
    if (main) return *main;
    return names.front();
  }
};

namespace detail {

class WreathLexer {
 public:
  WreathLexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  // Identifier or the reserved identity name `1`.
  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '1' &&
        (pos_ + 1 == text_.size() || !is_name_char(text_[pos_ + 1]))) {
      ++pos_;
      return "1";
    }
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      fail("expected a state name");
    }
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    try {
      return std::stoull(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      fail("number too large");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::syntax, what + " at column " + std::to_string(pos_ + 1), line_);
  }

  std::size_t line() const { return line_; }

 private:
  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '^';
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct Equation {
  std::string name;
  std::vector<std::string> sections;
  std::vector<std::size_t> outputs;  // empty: identity output
  std::size_t line = 0;
};

}  // namespace detail

// Parses a system of wreath recursions. Statements are separated by newlines or
// `;`, and `#` starts a comment. With `require_alphabet` the first statement must
// be `alphabet = k`; otherwise a missing declaration is inferred from the arity
// of the first equation.
inline WreathSystem parse_wreath(std::string_view source, bool require_alphabet = false) {
  struct Statement {
    std::string text;
    std::size_t line;
  };
  std::vector<Statement> statements;
  {
    std::size_t line = 1;
    std::string current;
    bool comment = false;
    for (char c : source) {
      if (c == '\n') {
        statements.push_back({current, line});
        current.clear();
        comment = false;
        ++line;
      } else if (comment) {
        continue;
      } else if (c == '#') {
        comment = true;
      } else if (c == ';') {
        statements.push_back({current, line});
        current.clear();
      } else {
        current += c;
      }
    }
    statements.push_back({current, line});
  }

  WreathSystem sys;
  std::optional<std::size_t> alphabet;
  std::vector<detail::Equation> equations;
  std::optional<std::pair<std::string, std::size_t>> main_decl;
  bool seen_statement = false;

  for (const auto& st : statements) {
    detail::WreathLexer lex(st.text, st.line);
    if (lex.at_end()) continue;
    std::string head = lex.name();
    lex.expect('=');
    if (head == "alphabet") {
      if (seen_statement) lex.fail("'alphabet' must be the first declaration");
      std::size_t k = lex.number();
      if (k == 0) throw Error(ErrorKind::syntax, "alphabet size must be at least 1", st.line);
      alphabet = k;
    } else if (head == "main") {
      if (main_decl) throw Error(ErrorKind::duplicate_definition, "'main' declared twice", st.line);
      main_decl = std::make_pair(lex.name(), st.line);
    } else {
      if (head == "1") lex.fail("the name '1' is reserved for the identity");
      if (require_alphabet && !alphabet) {
        throw Error(ErrorKind::syntax, "expected 'alphabet = k' as the first declaration", st.line);
      }
      detail::Equation eq{head, {}, {}, st.line};
      lex.expect('(');
      do {
        eq.sections.push_back(lex.name());
      } while (lex.accept(','));
      lex.expect(')');
      if (lex.accept('[')) {
        do {
          eq.outputs.push_back(lex.number());
        } while (lex.accept(','));
        lex.expect(']');
      }
      if (!lex.at_end()) lex.fail("unexpected trailing input");
      equations.push_back(std::move(eq));
    }
    if (!lex.at_end()) lex.fail("unexpected trailing input");
    seen_statement = true;
  }

  if (!alphabet) {
    if (require_alphabet || equations.empty()) {
      throw Error(ErrorKind::syntax, "missing 'alphabet = k' declaration", 1);
    }
    alphabet = equations.front().sections.size();
  }
  if (equations.empty()) throw Error(ErrorKind::syntax, "no equations", 1);
  const std::size_t k = *alphabet;
  sys.alphabet_size = k;

  std::map<std::string, State> index;
  for (const auto& eq : equations) {
    if (index.count(eq.name) != 0) {
      throw Error(ErrorKind::duplicate_definition, "state '" + eq.name + "' defined twice", eq.line);
    }
    index.emplace(eq.name, static_cast<State>(sys.names.size()));
    sys.names.push_back(eq.name);
  }
  bool uses_identity = false;
  for (const auto& eq : equations) {
    if (eq.sections.size() != k) {
      throw Error(ErrorKind::syntax,
                  "state '" + eq.name + "' has " + std::to_string(eq.sections.size()) +
                      " sections, expected " + std::to_string(k),
                  eq.line);
    }
    if (!eq.outputs.empty() && eq.outputs.size() != k) {
      throw Error(ErrorKind::syntax,
                  "state '" + eq.name + "' has " + std::to_string(eq.outputs.size()) +
                      " outputs, expected " + std::to_string(k),
                  eq.line);
    }
    for (const auto& s : eq.sections) {
      if (s == "1") {
        uses_identity = true;
      } else if (index.count(s) == 0) {
        throw Error(ErrorKind::missing_definition, "section '" + s + "' of '" + eq.name + "' has no equation",
                    eq.line);
      }
    }
    for (std::size_t y : eq.outputs) {
      if (y < 1 || y > k) {
        throw Error(ErrorKind::letter_out_of_range,
                    "output letter " + std::to_string(y) + " of '" + eq.name + "' outside 1.." + std::to_string(k),
                    eq.line);
      }
    }
  }

  const std::size_t n = equations.size() + (uses_identity ? 1 : 0);
  const State identity = static_cast<State>(equations.size());
  MealyMachine m(k, n);
  for (State q = 0; q < equations.size(); ++q) {
    const auto& eq = equations[q];
    for (Letter x = 1; x <= k; ++x) {
      const std::string& s = eq.sections[x - 1];
      State to = s == "1" ? identity : index.at(s);
      Letter y = eq.outputs.empty() ? x : static_cast<Letter>(eq.outputs[x - 1]);
      m.set_transition(q, x, y, to);
    }
    m.set_label(q, StateLabel{Factor{eq.name, 1}});
  }
  for (State q = 0; q < equations.size(); ++q) {
    sys.transformations.emplace(equations[q].name, canonicalize(m, q));
  }
  if (main_decl) {
    if (main_decl->first != "1" && index.count(main_decl->first) == 0) {
      throw Error(ErrorKind::unknown_state_name, "main refers to unknown state '" + main_decl->first + "'",
                  main_decl->second);
    }
    if (main_decl->first == "1") {
      sys.transformations.emplace("1", identity_transformation(k));
    }
    sys.main = main_decl->first;
  }
  sys.machine = std::move(m);
  return sys;
}

// Parses an automaton file: like parse_wreath, but `alphabet = k` is mandatory.
inline WreathSystem parse_automaton_file(std::string_view source) { return parse_wreath(source, true); }

// Prints t as a wreath recursion that parse_automaton_file reads back to an equal
// transformation. States are named q0, q1, ... in canonical order; the identity
// state is written `1`. Presentation names go in trailing comments unless
// `names` is false.
inline std::string print_wreath(const Transformation& t, const std::string& root_name = "q0",
                                bool names = true) {
  const std::size_t k = t.alphabet_size();
  auto name_of = [&](State q) -> std::string {
    if (t.is_trivial(q) && !t.is_identity()) return "1";
    if (q == t.root()) return root_name;
    return "q" + std::to_string(q);
  };
  std::ostringstream out;
  out << "alphabet = " << k << "\n";
  out << "main = " << root_name << "\n";
  for (State q = 0; q < t.num_states(); ++q) {
    if (t.is_trivial(q) && !t.is_identity()) continue;
    out << name_of(q) << " = (";
    bool identity_output = true;
    for (Letter x = 1; x <= k; ++x) {
      if (x > 1) out << ", ";
      out << name_of(t.machine().target(q, x));
      identity_output = identity_output && t.machine().output(q, x) == x;
    }
    out << ")";
    if (!identity_output) {
      out << "[";
      for (Letter x = 1; x <= k; ++x) {
        if (x > 1) out << ",";
        out << t.machine().output(q, x);
      }
      out << "]";
    }
    if (names) out << "  # " << t.state_name(q);
    out << "\n";
  }
  return out.str();
}

}  // namespace mealy
