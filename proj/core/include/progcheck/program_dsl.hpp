// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

// The reasoning-program language: a small Python-like subset consisting of
// assignments, calls to retrieve/question/verify, string literals, f-strings
// with bare-name placeholders, `+` concatenation, and/or/not, True/False and
// comments. Anything else (loops, conditionals, imports, def, numbers,
// subscripts, attribute access) is rejected with ParseError.

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace progcheck::dsl {

/// Deep-copying owner for a single recursive child.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

struct Call {
  std::string fn;
  std::vector<Expr> args;
  friend bool operator==(const Call&, const Call&) = default;
};

struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};

struct StrLit {
  std::string value;
  friend bool operator==(const StrLit&, const StrLit&) = default;
};

struct FmtPart {
  bool is_var = false;
  std::string text;  // literal text, or the variable name
  friend bool operator==(const FmtPart&, const FmtPart&) = default;
};

struct FmtStr {
  std::vector<FmtPart> parts;
  friend bool operator==(const FmtStr&, const FmtStr&) = default;
};

struct Concat {
  std::vector<Expr> operands;
  friend bool operator==(const Concat&, const Concat&) = default;
};

enum class BoolOperator { and_, or_ };

struct BoolOp {
  BoolOperator op = BoolOperator::and_;
  std::vector<Expr> operands;
  friend bool operator==(const BoolOp&, const BoolOp&) = default;
};

struct Not {
  Box<Expr> operand;
  friend bool operator==(const Not&, const Not&) = default;
};

struct BoolLit {
  bool value = false;
  friend bool operator==(const BoolLit&, const BoolLit&) = default;
};

struct Expr {
  std::variant<Call, Var, StrLit, FmtStr, Concat, BoolOp, Not, BoolLit> node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Assign {
  std::string target;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct ExprStmt {
  Expr expr;
  friend bool operator==(const ExprStmt&, const ExprStmt&) = default;
};

struct Comment {
  std::string text;  // everything after '#'
  friend bool operator==(const Comment&, const Comment&) = default;
};

struct Statement {
  std::variant<Assign, ExprStmt, Comment> node;
  std::optional<std::string> trailing_comment;
  std::size_t line = 0;

  /// Structural equality; `line` is source metadata and not compared.
  friend bool operator==(const Statement& a, const Statement& b) {
    return a.node == b.node && a.trailing_comment == b.trailing_comment;
  }
};

struct Program {
  std::vector<Statement> statements;
  friend bool operator==(const Program&, const Program&) = default;
};

inline constexpr std::array<std::string_view, 3> kAtomicFunctions = {"retrieve", "question", "verify"};
inline constexpr std::string_view kFinalPrediction = "final_prediction";

/// Number of arguments an atomic function takes; nullopt for other names.
std::optional<std::size_t> atomic_arity(std::string_view fn);

struct ProgramSource {
  std::string raw_llm_output;
  std::string code;  // fence-stripped
};

/// Content of the first ```python fenced block; failing that the first fenced
/// block of any tag; failing that the whole output.
ProgramSource extract_program(std::string_view llm_output);

/// Throws ParseError(line, reason) on any construct outside the grammar.
/// Never returns a partial program.
Program parse(std::string_view code);
inline Program parse(const ProgramSource& source) { return parse(source.code); }

/// Canonical source: one statement per line, double-quoted strings, minimal
/// parentheses. parse(print(p)) == p for every parsed p.
std::string print(const Program& program);
std::string print(const Expr& expr);

struct Violation {
  std::string rule;
  std::string message;
  std::size_t line = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view rule) const;
};

/// Static checks: known functions with correct arity, no read before
/// assignment, string/boolean typing, a variable's type never changes,
/// atomic names are never rebound, exactly one boolean `final_prediction`.
ValidationReport validate(const Program& program);

}  // namespace progcheck::dsl
