#ifndef WCD_KNOWLEDGE_HPP
#define WCD_KNOWLEDGE_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wcd/errors.hpp"
#include "wcd/table.hpp"

namespace wcd {

/// t_p[S] = s
struct Atom {
  std::string person;
  std::string value;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// (A_0 & ... & A_{m-1}) -> (B_0 | ... | B_{n-1}), m, n >= 1.
struct BasicImplication {
  std::vector<Atom> antecedent;
  std::vector<Atom> consequent;

  friend auto operator<=>(const BasicImplication&, const BasicImplication&) = default;
};

/// A -> B
struct SimpleImplication {
  Atom antecedent;
  Atom consequent;

  BasicImplication as_basic() const { return {{antecedent}, {consequent}}; }

  friend auto operator<=>(const SimpleImplication&, const SimpleImplication&) = default;
};

/// Conjunction of basic implications. Empty means no background knowledge.
struct Knowledge {
  std::vector<BasicImplication> implications;

  std::size_t size() const noexcept { return implications.size(); }
  bool empty() const noexcept { return implications.empty(); }

  Knowledge& add(BasicImplication imp) {
    implications.push_back(std::move(imp));
    return *this;
  }
  Knowledge& add(const SimpleImplication& imp) { return add(imp.as_basic()); }

  Knowledge conjoin(const Knowledge& other) const {
    Knowledge out = *this;
    out.implications.insert(out.implications.end(), other.implications.begin(), other.implications.end());
    return out;
  }

  friend bool operator==(const Knowledge&, const Knowledge&) = default;
};

// ---------------------------------------------------------------------------
// Parsing and formatting
// ---------------------------------------------------------------------------

namespace detail {

class KnowledgeLineParser {
 public:
  KnowledgeLineParser(std::string_view line, std::size_t lineno) : line_(line), lineno_(lineno) {}

  /// Returns false for blank and comment-only lines.
  bool parse(BasicImplication& out) {
    skip_space();
    if (at_end()) return false;
    expect('(');
    out.antecedent = atoms("&", "AND");
    expect(')');
    skip_space();
    if (line_.substr(pos_, 2) != "->") fail("expected '->'");
    pos_ += 2;
    skip_space();
    expect('(');
    out.consequent = atoms("|", "OR");
    expect(')');
    skip_space();
    if (!at_end()) fail("unexpected trailing text");
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, lineno_, pos_ + 1); }

  bool at_end() const { return pos_ >= line_.size() || line_[pos_] == '#'; }

  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == '=' || c == '&' || c == '|' || c == '"' || c == '#';
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

  /// A quoted string, or a run of text up to a delimiter or a spaced AND/OR keyword.
  std::string token(const char* what) {
    skip_space();
    if (pos_ < line_.size() && line_[pos_] == '"') {
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= line_.size()) fail("unterminated quoted string");
        char c = line_[pos_++];
        if (c == '"') break;
        if (c == '\\' && pos_ < line_.size()) c = line_[pos_++];
        out.push_back(c);
      }
      if (out.empty()) fail(std::string("empty ") + what);
      return out;
    }
    std::size_t start = pos_;
    std::size_t stop = start;
    while (stop < line_.size() && !is_delimiter(line_[stop])) ++stop;
    // cut at the first whitespace-delimited AND / OR keyword
    for (std::size_t i = start; i < stop; ++i) {
      if (i > start && !is_space(line_[i - 1])) continue;
      for (std::string_view kw : {std::string_view("AND"), std::string_view("OR")}) {
        if (line_.substr(i, kw.size()) == kw && (i + kw.size() == stop || is_space(line_[i + kw.size()]))) {
          stop = i;
          break;
        }
      }
    }
    std::size_t end = stop;
    while (end > start && is_space(line_[end - 1])) --end;
    if (end == start) fail(std::string("expected ") + what);
    pos_ = end;
    return std::string(line_.substr(start, end - start));
  }

  Atom atom() {
    Atom a;
    a.person = token("person");
    expect('=');
    a.value = token("value");
    return a;
  }

  std::vector<Atom> atoms(std::string_view symbol, std::string_view keyword) {
    std::vector<Atom> out;
    out.push_back(atom());
    while (true) {
      skip_space();
      if (line_.substr(pos_, symbol.size()) == symbol) {
        pos_ += symbol.size();
      } else if (line_.substr(pos_, keyword.size()) == keyword) {
        pos_ += keyword.size();
      } else {
        break;
      }
      out.push_back(atom());
    }
    return out;
  }

  std::string_view line_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

inline bool is_space_edge(const std::string& s) {
  auto sp = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  return !s.empty() && (sp(s.front()) || sp(s.back()));
}

inline std::string quote_token(const std::string& s) {
  bool plain = !s.empty() && !is_space_edge(s) && s.find_first_of("()=&|\"#\\") == std::string::npos &&
               s.find(" AND ") == std::string::npos && s.find(" OR ") == std::string::npos &&
               s.rfind("AND ", 0) != 0 && s.rfind("OR ", 0) != 0 && s != "AND" && s != "OR";
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace detail

/// Parses the knowledge-file grammar: one basic implication per line,
/// `#` starts a comment.
///
///   impl := '(' conj ')' '->' '(' disj ')'
///   conj := atom (('&' | 'AND') atom)*
///   disj := atom (('|' | 'OR') atom)*
///   atom := ident '=' value
inline Knowledge parse_knowledge(std::string_view text) {
  Knowledge k;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++lineno;
    BasicImplication imp;
    if (detail::KnowledgeLineParser(line, lineno).parse(imp)) k.add(std::move(imp));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return k;
}

inline std::string format_atom(const Atom& a) {
  return detail::quote_token(a.person) + "=" + detail::quote_token(a.value);
}

inline std::string format_implication(const BasicImplication& imp) {
  std::string out = "(";
  for (std::size_t i = 0; i < imp.antecedent.size(); ++i) out += (i ? " & " : "") + format_atom(imp.antecedent[i]);
  out += ") -> (";
  for (std::size_t i = 0; i < imp.consequent.size(); ++i) out += (i ? " | " : "") + format_atom(imp.consequent[i]);
  return out + ")";
}

/// Renders knowledge in the same grammar `parse_knowledge` accepts.
inline std::string format_knowledge(const Knowledge& k) {
  std::string out;
  for (const auto& imp : k.implications) out += format_implication(imp) + "\n";
  return out;
}

/// Parses `person=value`.
inline Atom parse_atom(std::string_view text) {
  Knowledge k = parse_knowledge("(" + std::string(text) + ") -> (" + std::string(text) + ")");
  if (k.size() != 1 || k.implications[0].antecedent.size() != 1)
    throw ValidationError("expected a single atom: '" + std::string(text) + "'");
  return k.implications[0].antecedent[0];
}

// ---------------------------------------------------------------------------
// Validation and semantics
// ---------------------------------------------------------------------------

/// Any table-like context exposing person and value lookups (Table, Bucketization).
template <typename Context>
concept AtomContext = requires(const Context& c, std::string_view s) {
  { c.person_index(s) } -> std::same_as<std::optional<std::size_t>>;
  { c.value_index(s) } -> std::same_as<std::optional<std::size_t>>;
};

template <AtomContext Context>
void validate(const Atom& a, const Context& ctx) {
  if (!ctx.person_index(a.person)) throw ValidationError("unknown person '" + a.person + "'");
  if (!ctx.value_index(a.value)) throw ValidationError("unknown sensitive value '" + a.value + "'");
}

template <AtomContext Context>
void validate(const Knowledge& k, const Context& ctx) {
  for (const auto& imp : k.implications) {
    if (imp.antecedent.empty() || imp.consequent.empty())
      throw ValidationError("basic implication needs at least one antecedent and one consequent atom");
    for (const auto& a : imp.antecedent) validate(a, ctx);
    for (const auto& a : imp.consequent) validate(a, ctx);
  }
}

inline bool atom_holds(const Table& table, const Atom& a) {
  auto idx = table.person_index(a.person);
  if (!idx) throw ValidationError("unknown person '" + a.person + "'");
  return table.record(*idx).sensitive == a.value;
}

inline bool holds(const Table& table, const BasicImplication& imp) {
  bool all = std::all_of(imp.antecedent.begin(), imp.antecedent.end(), [&](const Atom& a) { return atom_holds(table, a); });
  bool any = std::any_of(imp.consequent.begin(), imp.consequent.end(), [&](const Atom& a) { return atom_holds(table, a); });
  return !all || any;
}

/// True iff the table satisfies every implication.
inline bool holds(const Table& table, const Knowledge& k) {
  // evaluate all implications so that unknown persons are always reported
  bool ok = true;
  for (const auto& imp : k.implications) ok = holds(table, imp) && ok;
  return ok;
}

/// Encodes not(p=s) as (p=s) -> (p=s') with s' the least domain value other than s.
/// `domain` must be sorted.
inline SimpleImplication negation_as_implication(const Atom& a, const std::vector<std::string>& domain) {
  if (domain.size() < 2)
    throw ValidationError("cannot express the negation of '" + format_atom(a) + "' over a one-value domain");
  const auto& other = domain[0] != a.value ? domain[0] : domain[1];
  return {a, {a.person, other}};
}

}  // namespace wcd

#endif  // WCD_KNOWLEDGE_HPP
