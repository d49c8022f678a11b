// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/program_dsl.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "progcheck/errors.hpp"
#include "progcheck/text.hpp"

namespace progcheck::dsl {

std::optional<std::size_t> atomic_arity(std::string_view fn) {
  if (fn == "retrieve") return 1;
  if (fn == "question" || fn == "verify") return 2;
  return std::nullopt;
}

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

// --- extraction --------------------------------------------------------------

ProgramSource extract_program(std::string_view llm_output) {
  struct Fence {
    std::string tag;
    std::string body;
  };
  std::vector<Fence> fences;
  auto lines = text::split_lines(llm_output);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto head = text::trim(lines[i]);
    if (head.substr(0, 3) != "```") continue;
    Fence fence{text::to_lower(text::trim(head.substr(3))), {}};
    std::vector<std::string> body;
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      if (text::trim(lines[j]) == "```") break;
      body.push_back(lines[j]);
    }
    fence.body = text::join(body, "\n");
    fences.push_back(std::move(fence));
    i = j;
  }
  ProgramSource src{std::string(llm_output), {}};
  auto python = std::find_if(fences.begin(), fences.end(), [](const Fence& f) { return f.tag == "python"; });
  if (python != fences.end()) {
    src.code = python->body;
  } else if (!fences.empty()) {
    src.code = fences.front().body;
  } else {
    src.code = std::string(llm_output);
  }
  return src;
}

// --- lexer -------------------------------------------------------------------

namespace {

enum class Tok { name, string, fstring, assign, plus_assign, plus, lparen, rparen, comma, newline, comment, eof };

struct Token {
  Tok kind;
  std::string text;            // name, decoded string value, or comment body
  std::vector<FmtPart> parts;  // fstring pieces
  std::size_t line = 0;
  bool line_start = false;     // comment occupying its own line
};

const std::set<std::string, std::less<>> kForbiddenKeywords = {
    "for",  "while", "if",     "elif",   "else",   "def",    "class",  "import", "from",
    "return", "lambda", "try", "except", "finally", "with",  "yield",  "async",  "await",
    "global", "nonlocal", "del", "pass", "assert", "raise", "in",     "is",     "None",
    "break", "continue"};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string decode_escapes(std::string_view raw, std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c != '\\' || i + 1 >= raw.size()) {
      out += c;
      continue;
    }
    char e = raw[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '0': out += '\0'; break;
      case '\\': out += '\\'; break;
      case '\'': out += '\''; break;
      case '"': out += '"'; break;
      case '\n': break;
      case 'x':
      case 'u': {
        std::size_t digits = e == 'x' ? 2 : 4;
        unsigned cp = 0;
        for (std::size_t k = 1; k <= digits; ++k) {
          int h = i + k < raw.size() ? hex_value(raw[i + k]) : -1;
          if (h < 0) throw ParseError(line, "invalid escape sequence");
          cp = cp * 16 + static_cast<unsigned>(h);
        }
        i += digits;
        if (e == 'x') {
          out += static_cast<char>(cp);
        } else {
          append_utf8(out, cp);
        }
        break;
      }
      default:
        out += '\\';
        out += e;
    }
  }
  return out;
}

void push_literal(std::vector<FmtPart>& parts, std::string s) {
  if (s.empty()) return;
  if (!parts.empty() && !parts.back().is_var) {
    parts.back().text += s;
  } else {
    parts.push_back({false, std::move(s)});
  }
}

std::vector<FmtPart> split_fstring(std::string_view raw, bool is_raw, std::size_t line) {
  std::vector<FmtPart> parts;
  std::string literal;
  auto flush = [&] {
    push_literal(parts, is_raw ? literal : decode_escapes(literal, line));
    literal.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '{') {
      if (i + 1 < raw.size() && raw[i + 1] == '{') {
        flush();
        push_literal(parts, "{");
        ++i;
        continue;
      }
      auto close = raw.find('}', i + 1);
      if (close == std::string_view::npos) throw ParseError(line, "unterminated f-string placeholder");
      auto name = text::trim(raw.substr(i + 1, close - i - 1));
      bool ok = !name.empty() && is_ident_start(name.front()) &&
                std::all_of(name.begin(), name.end(), is_ident_char);
      if (!ok) throw ParseError(line, "unsupported f-string expression {" + std::string(name) + "}");
      flush();
      parts.push_back({true, std::string(name)});
      i = close;
    } else if (c == '}') {
      if (i + 1 < raw.size() && raw[i + 1] == '}') {
        flush();
        push_literal(parts, "}");
        ++i;
        continue;
      }
      throw ParseError(line, "single '}' in f-string");
    } else {
      literal += c;
    }
  }
  flush();
  return parts;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool at_line_start = true;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (at_line_start && depth_ == 0) {
        // Indentation is only tolerated on blank or comment-only lines.
        std::size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) ++p;
        bool blank = p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#';
        if (p != pos_ && !blank) throw ParseError(line_, "unexpected indent");
        pos_ = p;
        at_line_start = false;
        if (pos_ >= src_.size()) break;
        c = src_[pos_];
        if (c == '#') {
          out.push_back(comment(true));
          continue;
        }
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        if (depth_ == 0) {
          if (!out.empty() && out.back().kind != Tok::newline) out.push_back({Tok::newline, {}, {}, line_});
          at_line_start = true;
        }
        ++line_;
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
      } else if (c == '#') {
        auto t = comment(false);
        if (depth_ == 0) out.push_back(std::move(t));
      } else if (is_ident_start(c)) {
        auto prefix_end = pos_;
        while (prefix_end < src_.size() && is_ident_char(src_[prefix_end])) ++prefix_end;
        auto word = src_.substr(pos_, prefix_end - pos_);
        if (prefix_end < src_.size() && (src_[prefix_end] == '"' || src_[prefix_end] == '\'') && is_prefix(word)) {
          out.push_back(string_literal(word));
        } else {
          if (kForbiddenKeywords.count(word)) {
            throw ParseError(line_, "unsupported construct `" + std::string(word) + "`");
          }
          out.push_back({Tok::name, std::string(word), {}, line_});
          pos_ = prefix_end;
        }
      } else if (c == '"' || c == '\'') {
        out.push_back(string_literal({}));
      } else if (c == '=') {
        if (peek(1) == '=') throw ParseError(line_, "comparison operators are not supported");
        out.push_back({Tok::assign, "=", {}, line_});
        ++pos_;
      } else if (c == '+') {
        if (peek(1) == '=') {
          out.push_back({Tok::plus_assign, "+=", {}, line_});
          pos_ += 2;
        } else {
          out.push_back({Tok::plus, "+", {}, line_});
          ++pos_;
        }
      } else if (c == '(') {
        ++depth_;
        out.push_back({Tok::lparen, "(", {}, line_});
        ++pos_;
      } else if (c == ')') {
        if (depth_ == 0) throw ParseError(line_, "unbalanced ')'");
        --depth_;
        out.push_back({Tok::rparen, ")", {}, line_});
        ++pos_;
      } else if (c == ',') {
        out.push_back({Tok::comma, ",", {}, line_});
        ++pos_;
      } else {
        throw ParseError(line_, describe_unsupported(c));
      }
    }
    if (depth_ != 0) throw ParseError(line_, "unclosed '('");
    if (!out.empty() && out.back().kind != Tok::newline) out.push_back({Tok::newline, {}, {}, line_});
    out.push_back({Tok::eof, {}, {}, line_});
    return out;
  }

 private:
  char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  static bool is_prefix(std::string_view w) {
    if (w.empty() || w.size() > 2) return false;
    return std::all_of(w.begin(), w.end(), [](char c) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return c == 'r' || c == 'f' || c == 'b' || c == 'u';
    });
  }

  static std::string describe_unsupported(char c) {
    if (c >= '0' && c <= '9') return "numeric literals are not supported";
    switch (c) {
      case '[':
      case ']': return "subscripts and lists are not supported";
      case '{':
      case '}': return "dict and set literals are not supported";
      case '.': return "attribute access is not supported";
      case ':': return "blocks and annotations are not supported";
      case ';': return "semicolons are not supported";
      case '-':
      case '*':
      case '/':
      case '%': return "arithmetic is not supported";
      case '<':
      case '>':
      case '!': return "comparison operators are not supported";
      default: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "unexpected character 0x%02x", static_cast<unsigned char>(c));
        return buf;
      }
    }
  }

  Token comment(bool own_line) {
    auto start = pos_ + 1;
    auto end = src_.find('\n', start);
    if (end == std::string_view::npos) end = src_.size();
    auto body = src_.substr(start, end - start);
    while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t')) body.remove_suffix(1);
    pos_ = end;
    Token t{Tok::comment, std::string(body), {}, line_};
    t.line_start = own_line;
    return t;
  }

  Token string_literal(std::string_view prefix) {
    bool is_f = false;
    bool is_raw = false;
    for (char c : prefix) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (c == 'b') throw ParseError(line_, "bytes literals are not supported");
      if (c == 'f') is_f = true;
      if (c == 'r') is_raw = true;
    }
    pos_ += prefix.size();
    const std::size_t start_line = line_;
    const char q = src_[pos_];
    const bool triple = peek(1) == q && peek(2) == q;
    pos_ += triple ? 3 : 1;
    std::string raw;
    for (;;) {
      if (pos_ >= src_.size()) throw ParseError(start_line, "unterminated string literal");
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        raw += c;
        raw += src_[pos_ + 1];
        if (src_[pos_ + 1] == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (peek(1) == q && peek(2) == q) {
          pos_ += 3;
          break;
        }
      }
      if (c == '\n') {
        if (!triple) throw ParseError(start_line, "unterminated string literal");
        ++line_;
      }
      raw += c;
      ++pos_;
    }
    Token t{is_f ? Tok::fstring : Tok::string, {}, {}, start_line};
    if (is_f) {
      t.parts = split_fstring(raw, is_raw, start_line);
    } else {
      t.text = is_raw ? raw : decode_escapes(raw, start_line);
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  int depth_ = 0;
};

// --- parser ------------------------------------------------------------------

constexpr int kMaxDepth = 100;  // parentheses, `not`s and calls

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program program;
    while (cur().kind != Tok::eof) {
      if (cur().kind == Tok::newline) {
        ++i_;
        continue;
      }
      program.statements.push_back(statement());
    }
    return program;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
  Token take() { return toks_[i_++]; }

  [[noreturn]] void fail(const std::string& why) const { throw ParseError(cur().line, why); }

  void expect(Tok kind, const char* what) {
    if (cur().kind != kind) fail(std::string("expected ") + what);
    ++i_;
  }

  Statement statement() {
    Statement st;
    st.line = cur().line;
    if (cur().kind == Tok::comment) {
      st.node = Comment{take().text};
      end_of_statement(st, false);
      return st;
    }
    if (cur().kind == Tok::name && ahead(1).kind == Tok::assign) {
      auto target = take().text;
      ++i_;
      check_target(target);
      st.node = Assign{target, expr()};
    } else if (cur().kind == Tok::name && ahead(1).kind == Tok::plus_assign) {
      auto target = take().text;
      ++i_;
      check_target(target);
      Concat c;
      c.operands.push_back(Expr{Var{target}});
      c.operands.push_back(expr());
      st.node = Assign{target, Expr{std::move(c)}};
    } else {
      st.node = ExprStmt{expr()};
    }
    end_of_statement(st, true);
    return st;
  }

  void check_target(const std::string& target) const {
    if (target == "and" || target == "or" || target == "not" || target == "True" || target == "False") {
      throw ParseError(cur().line, "cannot assign to keyword `" + target + "`");
    }
  }

  void end_of_statement(Statement& st, bool allow_trailing) {
    if (allow_trailing && cur().kind == Tok::comment) st.trailing_comment = take().text;
    if (cur().kind == Tok::assign) fail("chained or non-name assignment is not supported");
    if (cur().kind == Tok::comma) fail("tuples are not supported");
    if (cur().kind != Tok::newline && cur().kind != Tok::eof) fail("unexpected token after statement");
    if (cur().kind == Tok::newline) ++i_;
  }

  struct DepthGuard {
    int& d;
    std::size_t line;
    DepthGuard(int& depth, std::size_t l) : d(depth), line(l) {
      if (++d > kMaxDepth) throw ParseError(line, "expression nesting too deep");
    }
    ~DepthGuard() { --d; }
  };

  Expr expr() { return or_expr(); }

  Expr bool_chain(BoolOperator op, const char* word, Expr (Parser::*next)()) {
    Expr first = (this->*next)();
    if (!(cur().kind == Tok::name && cur().text == word)) return first;
    BoolOp b{op, {}};
    b.operands.push_back(std::move(first));
    while (cur().kind == Tok::name && cur().text == word) {
      ++i_;
      b.operands.push_back((this->*next)());
    }
    return Expr{std::move(b)};
  }

  Expr or_expr() { return bool_chain(BoolOperator::or_, "or", &Parser::and_expr); }
  Expr and_expr() { return bool_chain(BoolOperator::and_, "and", &Parser::not_expr); }

  Expr not_expr() {
    if (cur().kind == Tok::name && cur().text == "not") {
      DepthGuard g(depth_, cur().line);
      ++i_;
      return Expr{Not{not_expr()}};
    }
    return sum();
  }

  Expr sum() {
    Expr first = primary();
    if (cur().kind != Tok::plus) return first;
    Concat c;
    c.operands.push_back(std::move(first));
    while (cur().kind == Tok::plus) {
      ++i_;
      c.operands.push_back(primary());
    }
    return Expr{std::move(c)};
  }

  Expr primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::string:
      case Tok::fstring: return string_run();
      case Tok::lparen: {
        DepthGuard g(depth_, cur().line);
        ++i_;
        Expr inner = expr();
        if (cur().kind == Tok::comma) fail("tuples are not supported");
        expect(Tok::rparen, "')'");
        if (cur().kind == Tok::lparen) fail("calling a parenthesized expression is not supported");
        return inner;
      }
      case Tok::name: {
        if (t.text == "True" || t.text == "False") {
          ++i_;
          return Expr{BoolLit{t.text == "True"}};
        }
        if (t.text == "and" || t.text == "or" || t.text == "not") fail("unexpected `" + t.text + "`");
        auto name = take().text;
        if (cur().kind == Tok::lparen) return call(std::move(name));
        return Expr{Var{std::move(name)}};
      }
      case Tok::eof:
      case Tok::newline: fail("unexpected end of statement");
      default: fail("unexpected `" + t.text + "`");
    }
  }

  // Adjacent literals concatenate at parse time, as in Python.
  Expr string_run() {
    bool any_f = false;
    std::vector<FmtPart> parts;
    while (cur().kind == Tok::string || cur().kind == Tok::fstring) {
      Token t = take();
      if (t.kind == Tok::fstring) {
        any_f = true;
        for (auto& p : t.parts) {
          if (p.is_var) {
            parts.push_back(std::move(p));
          } else {
            push_literal(parts, std::move(p.text));
          }
        }
      } else {
        push_literal(parts, std::move(t.text));
      }
    }
    if (any_f) return Expr{FmtStr{std::move(parts)}};
    return Expr{StrLit{parts.empty() ? std::string{} : parts.front().text}};
  }

  Expr call(std::string fn) {
    const std::size_t line = cur().line;
    DepthGuard g(depth_, line);
    expect(Tok::lparen, "'('");
    std::vector<std::optional<Expr>> slots;
    std::size_t positional = 0;
    bool seen_keyword = false;
    while (cur().kind != Tok::rparen) {
      if (cur().kind == Tok::name && ahead(1).kind == Tok::assign) {
        auto key = take().text;
        ++i_;
        auto idx = keyword_index(fn, key, line);
        if (slots.size() <= idx) slots.resize(idx + 1);
        if (slots[idx]) throw ParseError(line, "argument `" + key + "` given twice");
        slots[idx] = expr();
        seen_keyword = true;
      } else {
        if (seen_keyword) fail("positional argument after keyword argument");
        if (slots.size() <= positional) slots.resize(positional + 1);
        slots[positional++] = expr();
      }
      if (cur().kind == Tok::comma) {
        ++i_;
      } else if (cur().kind != Tok::rparen) {
        fail("expected ',' or ')' in call");
      }
    }
    ++i_;
    Call c{std::move(fn), {}};
    for (auto& s : slots) {
      if (!s) throw ParseError(line, "missing argument in call to " + c.fn);
      c.args.push_back(std::move(*s));
    }
    if (cur().kind == Tok::lparen) fail("calling a call result is not supported");
    return Expr{std::move(c)};
  }

  static std::size_t keyword_index(const std::string& fn, const std::string& key, std::size_t line) {
    static const std::map<std::string, std::vector<std::string>> params = {
        {"retrieve", {"query"}},
        {"question", {"question", "evidence"}},
        {"verify", {"claim", "evidence"}},
    };
    auto it = params.find(fn);
    if (it == params.end()) throw ParseError(line, "keyword arguments to unknown function " + fn);
    auto pos = std::find(it->second.begin(), it->second.end(), key);
    if (pos == it->second.end()) throw ParseError(line, "unknown keyword argument `" + key + "` for " + fn);
    return static_cast<std::size_t>(pos - it->second.begin());
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int depth_ = 0;
};

}  // namespace

Program parse(std::string_view code) {
  auto normalized = text::dedent(code);
  return Parser(Lexer(normalized).run()).run();
}

// --- printer -----------------------------------------------------------------

namespace {

enum Prec { kOr = 1, kAnd = 2, kNot = 3, kConcat = 4, kAtom = 5 };

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BoolOp>) return n.op == BoolOperator::or_ ? kOr : kAnd;
        if constexpr (std::is_same_v<T, Not>) return kNot;
        if constexpr (std::is_same_v<T, Concat>) return kConcat;
        return kAtom;
      },
      e.node);
}

void escape_into(std::string& out, std::string_view s, bool braces) {
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '{': out += braces ? "{{" : "{"; break;
      case '}': out += braces ? "}}" : "}"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
}

void print_expr(std::string& out, const Expr& e);

void print_operand(std::string& out, const Expr& child, bool wrap) {
  if (wrap) out += '(';
  print_expr(out, child);
  if (wrap) out += ')';
}

void print_expr(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Call>) {
          out += n.fn;
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print_expr(out, n.args[i]);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, StrLit>) {
          out += '"';
          escape_into(out, n.value, false);
          out += '"';
        } else if constexpr (std::is_same_v<T, FmtStr>) {
          out += "f\"";
          for (const auto& p : n.parts) {
            if (p.is_var) {
              out += '{';
              out += p.text;
              out += '}';
            } else {
              escape_into(out, p.text, true);
            }
          }
          out += '"';
        } else if constexpr (std::is_same_v<T, Concat>) {
          for (std::size_t i = 0; i < n.operands.size(); ++i) {
            if (i) out += " + ";
            print_operand(out, n.operands[i], precedence(n.operands[i]) <= kConcat);
          }
        } else if constexpr (std::is_same_v<T, BoolOp>) {
          const int mine = n.op == BoolOperator::or_ ? kOr : kAnd;
          for (std::size_t i = 0; i < n.operands.size(); ++i) {
            if (i) out += n.op == BoolOperator::or_ ? " or " : " and ";
            print_operand(out, n.operands[i], precedence(n.operands[i]) <= mine);
          }
        } else if constexpr (std::is_same_v<T, Not>) {
          out += "not ";
          print_operand(out, *n.operand, precedence(*n.operand) < kNot);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += n.value ? "True" : "False";
        }
      },
      e.node);
}

}  // namespace

std::string print(const Expr& expr) {
  std::string out;
  print_expr(out, expr);
  return out;
}

std::string print(const Program& program) {
  std::string out;
  for (const auto& st : program.statements) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Comment>) {
            out += '#';
            out += n.text;
          } else if constexpr (std::is_same_v<T, Assign>) {
            out += n.target;
            out += " = ";
            print_expr(out, n.value);
          } else {
            print_expr(out, n.expr);
          }
        },
        st.node);
    if (st.trailing_comment) {
      out += "  #";
      out += *st.trailing_comment;
    }
    out += '\n';
  }
  return out;
}

// --- validation --------------------------------------------------------------

namespace {

enum class Type { str, boolean };

const char* type_name(Type t) { return t == Type::str ? "str" : "bool"; }

class Validator {
 public:
  ValidationReport run(const Program& program) {
    std::size_t final_assignments = 0;
    for (const auto& st : program.statements) {
      line_ = st.line;
      if (const auto* a = std::get_if<Assign>(&st.node)) {
        auto t = infer(a->value);
        if (atomic_arity(a->target)) {
          add("redefine-function", "assignment rebinds atomic function `" + a->target + "`");
        }
        if (t) {
          auto it = env_.find(a->target);
          if (it != env_.end() && it->second != *t) {
            add("type-change", "`" + a->target + "` changes type from " + type_name(it->second) + " to " +
                                   type_name(*t));
          }
          env_[a->target] = *t;
        } else {
          poisoned_.insert(a->target);
        }
        if (a->target == kFinalPrediction) {
          ++final_assignments;
          if (final_assignments > 1) add("multiple-final-prediction", "`final_prediction` assigned more than once");
          if (t && *t != Type::boolean) add("final-prediction-not-boolean", "`final_prediction` must be boolean");
        }
      } else if (const auto* e = std::get_if<ExprStmt>(&st.node)) {
        infer(e->expr);
      }
    }
    if (final_assignments == 0) {
      line_ = 0;
      add("missing-final-prediction", "no assignment to `final_prediction`");
    }
    return std::move(report_);
  }

 private:
  void add(std::string rule, std::string message) {
    report_.violations.push_back({std::move(rule), std::move(message), line_});
  }

  std::optional<Type> lookup(const std::string& name) {
    auto it = env_.find(name);
    if (it != env_.end()) return it->second;
    if (!poisoned_.count(name)) add("read-before-assign", "`" + name + "` is read before it is assigned");
    return std::nullopt;
  }

  std::optional<Type> infer(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::optional<Type> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Call>) {
            std::vector<std::optional<Type>> args;
            for (const auto& a : n.args) args.push_back(infer(a));
            auto arity = atomic_arity(n.fn);
            if (!arity) {
              add("unknown-function", "call to unknown function `" + n.fn + "`");
              return std::nullopt;
            }
            if (args.size() != *arity) {
              add("arity", "`" + n.fn + "` takes " + std::to_string(*arity) + " arguments, got " +
                               std::to_string(args.size()));
            }
            for (const auto& t : args) {
              if (t && *t != Type::str) add("type-mismatch", "`" + n.fn + "` arguments must be strings");
            }
            return n.fn == "verify" ? Type::boolean : Type::str;
          } else if constexpr (std::is_same_v<T, Var>) {
            return lookup(n.name);
          } else if constexpr (std::is_same_v<T, StrLit>) {
            return Type::str;
          } else if constexpr (std::is_same_v<T, FmtStr>) {
            for (const auto& p : n.parts) {
              if (p.is_var) lookup(p.text);
            }
            return Type::str;
          } else if constexpr (std::is_same_v<T, Concat>) {
            bool ok = true;
            for (const auto& o : n.operands) {
              auto t = infer(o);
              if (t && *t != Type::str) {
                add("type-mismatch", "`+` concatenation needs string operands");
                ok = false;
              }
            }
            return ok ? std::optional<Type>(Type::str) : std::nullopt;
          } else if constexpr (std::is_same_v<T, BoolOp>) {
            bool ok = true;
            for (const auto& o : n.operands) {
              auto t = infer(o);
              if (t && *t != Type::boolean) {
                add("type-mismatch", std::string("`") + (n.op == BoolOperator::and_ ? "and" : "or") +
                                         "` needs boolean operands");
                ok = false;
              }
            }
            return ok ? std::optional<Type>(Type::boolean) : std::nullopt;
          } else if constexpr (std::is_same_v<T, Not>) {
            auto t = infer(*n.operand);
            if (t && *t != Type::boolean) {
              add("type-mismatch", "`not` needs a boolean operand");
              return std::nullopt;
            }
            return Type::boolean;
          } else {
            return Type::boolean;
          }
        },
        e.node);
  }

  std::map<std::string, Type> env_;
  std::set<std::string> poisoned_;  // assigned from an ill-typed expression
  ValidationReport report_;
  std::size_t line_ = 0;
};

}  // namespace

ValidationReport validate(const Program& program) { return Validator().run(program); }

}  // namespace progcheck::dsl
