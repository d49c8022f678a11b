// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace progcheck {

/// Base for every error raised by the library. The category drives the CLI
/// exit code: config errors exit 1, data errors 2, transport errors 3.
class Error : public std::runtime_error {
 public:
  enum class Category { config, data, transport, logic };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

// corpus_index
class DuplicateDocId : public DataError {
 public:
  explicit DuplicateDocId(const std::string& id)
      : DataError("duplicate document id: " + id), doc_id_(id) {}
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

class EmptyQuery : public DataError {
 public:
  EmptyQuery() : DataError("query has no indexable tokens") {}
};

class EmptyGold : public DataError {
 public:
  EmptyGold() : DataError("gold evidence set is empty") {}
};

class IndexFormatError : public DataError {
 public:
  explicit IndexFormatError(const std::string& what) : DataError("index artifact: " + what) {}
};

// llm_gateway
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(Category::transport, what) {}
};

/// Failure worth retrying: connection errors, HTTP 429 and 5xx responses.
class TransientTransportError : public TransportError {
 public:
  explicit TransientTransportError(const std::string& what) : TransportError(what) {}
};

class BackendUnconfigured : public ConfigError {
 public:
  explicit BackendUnconfigured(const std::string& role)
      : ConfigError("no backend configured for role " + role) {}
};

// atomic_functions
class UnparseableVerdict : public DataError {
 public:
  explicit UnparseableVerdict(const std::string& response)
      : DataError("no True/False verification result in model output"), response_(response) {}
  const std::string& response() const noexcept { return response_; }

 private:
  std::string response_;
};

// program_dsl
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

// program_executor (runtime)
class TypeMismatch : public DataError {
 public:
  explicit TypeMismatch(const std::string& what) : DataError("TypeMismatch: " + what) {}
};

class UnboundVariable : public DataError {
 public:
  explicit UnboundVariable(const std::string& name)
      : DataError("UnboundVariable: " + name) {}
};

class UnknownFunction : public DataError {
 public:
  explicit UnknownFunction(const std::string& name) : DataError("UnknownFunction: " + name) {}
};

// strategy_engine
class MissingDemonstrations : public ConfigError {
 public:
  MissingDemonstrations() : ConfigError("few-shot prompting requires a non-empty demonstration set") {}
};

// bootstrap_optimizer
class InsufficientData : public DataError {
 public:
  InsufficientData(std::size_t have, std::size_t need)
      : DataError("need " + std::to_string(need) + " claims, have " + std::to_string(have)) {}
};

class CritiqueParseError : public DataError {
 public:
  CritiqueParseError() : DataError("critique response has no <suggestions> block") {}
};

class RefineParseError : public DataError {
 public:
  explicit RefineParseError(const std::string& what) : DataError("refine response: " + what) {}
};

class EmptySetAfterFiltering : public DataError {
 public:
  EmptySetAfterFiltering() : DataError("no valid demonstrations remained after filtering") {}
};

// eval_harness
class SchemaError : public DataError {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LengthMismatch : public DataError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class SingleClassGold : public DataError {
 public:
  SingleClassGold() : DataError("balanced accuracy needs both classes in the gold labels") {}
};

}  // namespace progcheck
