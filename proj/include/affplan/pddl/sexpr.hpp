#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace affplan::pddl {

struct SourceLocation {
  std::size_t line = 0;  // 1-based; 0 when unknown
  std::size_t column = 0;
};

// Any lexical, syntactic or semantic PDDL error. Carries the location of
// the offending token when one is known.
class PddlError : public std::runtime_error {
 public:
  PddlError(const std::string& message, SourceLocation where = {})
      : std::runtime_error(format(message, where)), message_(message), where_(where) {}

  const std::string& message() const noexcept { return message_; }
  SourceLocation where() const noexcept { return where_; }

 private:
  static std::string format(const std::string& message, SourceLocation where) {
    if (where.line == 0) return message;
    return "line " + std::to_string(where.line) + ", column " + std::to_string(where.column) +
           ": " + message;
  }

  std::string message_;
  SourceLocation where_;
};

class UnsupportedFeature : public PddlError {
 public:
  UnsupportedFeature(const std::string& feature, SourceLocation where = {})
      : PddlError("unsupported feature " + feature, where), feature_(feature) {}
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

// Parsed s-expression. Symbols are lower-cased; PDDL is case-insensitive.
struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  SourceLocation where;

  bool is_symbol() const noexcept { return !is_list; }
  bool is_symbol(std::string_view s) const noexcept { return !is_list && symbol == s; }
  std::size_t size() const noexcept { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items[i]; }

  // Head symbol of a list, or "" for an empty list / a symbol.
  std::string_view head() const noexcept {
    if (!is_list || items.empty() || items[0].is_list) return {};
    return items[0].symbol;
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  SourceLocation here() const { return {line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw PddlError("unexpected end of input, expected expression", here());
    const char c = text_[pos_];
    if (c == ')') throw PddlError("unexpected ')'", here());
    if (c == '(') {
      SExpr list;
      list.is_list = true;
      list.where = here();
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) {
          throw PddlError("unbalanced parenthesis: '(' opened here is never closed, expected ')'",
                          list.where);
        }
        if (text_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(read());
      }
    }
    SExpr sym;
    sym.where = here();
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      sym.symbol.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return sym;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace detail

inline std::vector<SExpr> read_sexprs(std::string_view text) {
  return detail::Reader(text).read_all();
}

// Reads exactly one top-level expression.
inline SExpr read_sexpr(std::string_view text) {
  auto all = read_sexprs(text);
  if (all.empty()) throw PddlError("empty input, expected '('", {1, 1});
  if (all.size() > 1) throw PddlError("trailing input after expression", all[1].where);
  return std::move(all.front());
}

}  // namespace affplan::pddl
