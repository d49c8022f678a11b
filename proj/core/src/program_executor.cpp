// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/program_executor.hpp"

#include <set>

#include "progcheck/errors.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

std::string_view to_string(AtomicFn fn) {
  switch (fn) {
    case AtomicFn::retrieve: return "retrieve";
    case AtomicFn::question: return "question";
    case AtomicFn::verify: return "verify";
  }
  return "unknown";
}

std::string_view to_string(FailureStage stage) {
  switch (stage) {
    case FailureStage::extract: return "extract";
    case FailureStage::parse: return "parse";
    case FailureStage::validate: return "validate";
    case FailureStage::run: return "run";
  }
  return "unknown";
}

namespace {

AtomicFn parse_fn(const std::string& s) {
  if (s == "retrieve") return AtomicFn::retrieve;
  if (s == "question") return AtomicFn::question;
  if (s == "verify") return AtomicFn::verify;
  throw DataError("unknown trace function " + s);
}

FailureStage parse_stage(const std::string& s) {
  for (auto st : {FailureStage::extract, FailureStage::parse, FailureStage::validate, FailureStage::run}) {
    if (to_string(st) == s) return st;
  }
  throw DataError("unknown failure stage " + s);
}

const char* type_name(const Value& v) { return std::holds_alternative<bool>(v) ? "bool" : "str"; }

std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace

std::vector<std::string> ExecutionTrace::retrieved_doc_ids() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries) {
    for (const auto& id : e.doc_ids) {
      if (seen.insert(id).second) out.push_back(id);
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const TraceEntry& entry) {
  nlohmann::ordered_json j;
  j["step"] = entry.step;
  j["fn"] = std::string(to_string(entry.fn));
  j["inputs"] = entry.inputs;
  if (const auto* b = std::get_if<bool>(&entry.output)) {
    j["output"] = *b;
  } else {
    j["output"] = std::get<std::string>(entry.output);
  }
  j["rationale"] = entry.rationale ? nlohmann::ordered_json(*entry.rationale) : nlohmann::ordered_json(nullptr);
  if (entry.anomaly) j["anomaly"] = *entry.anomaly;
  if (entry.fn == AtomicFn::retrieve) j["doc_ids"] = entry.doc_ids;
  return j;
}

nlohmann::ordered_json to_json(const ExecutionTrace& trace) {
  nlohmann::ordered_json j;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : trace.entries) j["entries"].push_back(to_json(e));
  j["final_prediction"] =
      trace.final_prediction ? nlohmann::ordered_json(*trace.final_prediction) : nlohmann::ordered_json(nullptr);
  if (trace.failure) {
    j["failure"] = {{"stage", std::string(to_string(trace.failure->stage))}, {"reason", trace.failure->reason}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

ExecutionTrace trace_from_json(const nlohmann::json& j) {
  ExecutionTrace t;
  try {
    for (const auto& e : j.at("entries")) {
      TraceEntry entry;
      entry.step = e.at("step").get<std::size_t>();
      entry.fn = parse_fn(e.at("fn").get<std::string>());
      entry.inputs = e.at("inputs").get<std::vector<std::string>>();
      const auto& out = e.at("output");
      if (out.is_boolean()) {
        entry.output = out.get<bool>();
      } else {
        entry.output = out.get<std::string>();
      }
      if (e.contains("rationale") && !e["rationale"].is_null()) entry.rationale = e["rationale"].get<std::string>();
      if (e.contains("anomaly")) entry.anomaly = e["anomaly"].get<std::string>();
      if (e.contains("doc_ids")) entry.doc_ids = e["doc_ids"].get<std::vector<std::string>>();
      t.entries.push_back(std::move(entry));
    }
    if (j.contains("final_prediction") && !j["final_prediction"].is_null()) {
      t.final_prediction = j["final_prediction"].get<bool>();
    }
    if (j.contains("failure") && !j["failure"].is_null()) {
      t.failure = ExecutionFailure{parse_stage(j["failure"].at("stage").get<std::string>()),
                                   j["failure"].at("reason").get<std::string>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed trace JSON: ") + e.what());
  }
  return t;
}

std::string render_trace(const ExecutionTrace& trace) {
  std::string out;
  for (const auto& e : trace.entries) {
    out += "[" + std::to_string(e.step) + "] " + std::string(to_string(e.fn)) + "(";
    for (std::size_t i = 0; i < e.inputs.size(); ++i) {
      if (i) out += ", ";
      out += quote(e.inputs[i]);
    }
    out += ") -> ";
    if (const auto* b = std::get_if<bool>(&e.output)) {
      out += *b ? "True" : "False";
    } else {
      out += quote(std::get<std::string>(e.output));
    }
    out += '\n';
    if (e.rationale) out += "    rationale: " + *e.rationale + "\n";
    if (e.anomaly) out += "    anomaly: " + *e.anomaly + "\n";
  }
  if (trace.failure) {
    out += "execution failed at " + std::string(to_string(trace.failure->stage)) + ": " + trace.failure->reason + "\n";
  }
  if (out.empty()) out = "(no function calls)\n";
  return out;
}

void Environment::bind(const std::string& name, Value value) {
  auto it = bindings_.find(name);
  if (it != bindings_.end()) {
    if (it->second.index() != value.index()) {
      throw TypeMismatch("`" + name + "` was " + type_name(it->second) + ", cannot rebind to " + type_name(value));
    }
    it->second = std::move(value);
  } else {
    bindings_.emplace(name, std::move(value));
  }
}

const Value& Environment::lookup(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) throw UnboundVariable(name);
  return it->second;
}

// --- interpreter -------------------------------------------------------------

namespace {

class Interpreter {
 public:
  Interpreter(const AtomicFunctions& fns, ExecutionTrace& trace) : fns_(fns), trace_(trace) {}

  void run(const dsl::Program& program) {
    for (const auto& st : program.statements) {
      if (const auto* a = std::get_if<dsl::Assign>(&st.node)) {
        env_.bind(a->target, eval(a->value));
      } else if (const auto* e = std::get_if<dsl::ExprStmt>(&st.node)) {
        eval(e->expr);
      }
    }
    const auto& result = env_.lookup(std::string(dsl::kFinalPrediction));
    const auto* b = std::get_if<bool>(&result);
    if (!b) throw TypeMismatch("final_prediction is not a boolean");
    trace_.final_prediction = *b;
  }

 private:
  std::string as_string(const Value& v, const char* ctx) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw TypeMismatch(std::string(ctx) + " needs a string, got bool");
  }

  bool as_bool(const Value& v, const char* ctx) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw TypeMismatch(std::string(ctx) + " needs a bool, got str");
  }

  Value eval(const dsl::Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, dsl::Call>) {
            return call(n);
          } else if constexpr (std::is_same_v<T, dsl::Var>) {
            return env_.lookup(n.name);
          } else if constexpr (std::is_same_v<T, dsl::StrLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, dsl::FmtStr>) {
            std::string out;
            for (const auto& p : n.parts) {
              if (!p.is_var) {
                out += p.text;
                continue;
              }
              const auto& v = env_.lookup(p.text);
              if (const auto* b = std::get_if<bool>(&v)) {
                out += *b ? "True" : "False";
              } else {
                out += std::get<std::string>(v);
              }
            }
            return out;
          } else if constexpr (std::is_same_v<T, dsl::Concat>) {
            std::string out;
            for (const auto& o : n.operands) out += as_string(eval(o), "`+`");
            return out;
          } else if constexpr (std::is_same_v<T, dsl::BoolOp>) {
            // All operands run so every verification lands in the trace.
            const bool is_and = n.op == dsl::BoolOperator::and_;
            bool acc = is_and;
            for (const auto& o : n.operands) {
              bool v = as_bool(eval(o), is_and ? "`and`" : "`or`");
              acc = is_and ? (acc && v) : (acc || v);
            }
            return acc;
          } else if constexpr (std::is_same_v<T, dsl::Not>) {
            return !as_bool(eval(*n.operand), "`not`");
          } else {
            return n.value;
          }
        },
        e.node);
  }

  Value call(const dsl::Call& c) {
    auto arity = dsl::atomic_arity(c.fn);
    if (!arity) throw UnknownFunction(c.fn);
    std::vector<std::string> args;
    for (const auto& a : c.args) args.push_back(as_string(eval(a), c.fn.c_str()));
    if (args.size() != *arity) {
      throw TypeMismatch(c.fn + " takes " + std::to_string(*arity) + " arguments, got " + std::to_string(args.size()));
    }

    TraceEntry entry;
    entry.step = trace_.entries.size() + 1;
    entry.inputs = args;
    Value result;
    if (c.fn == "retrieve") {
      entry.fn = AtomicFn::retrieve;
      auto blob = fns_.retrieve(args[0]);
      entry.doc_ids = blob.doc_ids;
      result = blob.text;
    } else if (c.fn == "question") {
      entry.fn = AtomicFn::question;
      result = fns_.question(args[0], args[1]);
    } else {
      entry.fn = AtomicFn::verify;
      try {
        auto verdict = fns_.verify(args[0], args[1]);
        entry.rationale = verdict.rationale;
        result = verdict.label;
      } catch (const UnparseableVerdict&) {
        entry.anomaly = "unparseable verdict; coerced to False";
        result = false;
      }
    }
    entry.output = result;
    trace_.entries.push_back(std::move(entry));
    return result;
  }

  const AtomicFunctions& fns_;
  ExecutionTrace& trace_;
  Environment env_;
};

}  // namespace

ProgramExecutor::ProgramExecutor(const AtomicFunctions& functions, LlmGateway& gateway)
    : functions_(functions), gateway_(gateway) {}

ExecutionTrace ProgramExecutor::execute(const dsl::Program& program) const {
  ExecutionTrace trace;
  try {
    Interpreter(functions_, trace).run(program);
  } catch (const TransportError&) {
    throw;
  } catch (const DataError& e) {
    trace.final_prediction.reset();
    trace.failure = ExecutionFailure{FailureStage::run, e.what()};
  }
  return trace;
}

ExecutionTrace ProgramExecutor::fallback_verify(std::string_view claim) const {
  ExecutionTrace trace;
  EvidenceBlob blob;
  try {
    blob = functions_.retrieve(claim);
  } catch (const EmptyQuery&) {
    // Nothing indexable in the claim: verify against empty evidence.
  }
  trace.entries.push_back(
      TraceEntry{1, AtomicFn::retrieve, {std::string(claim)}, blob.text, std::nullopt, std::nullopt, blob.doc_ids});

  TraceEntry v{2, AtomicFn::verify, {std::string(claim), blob.text}, false, std::nullopt, std::nullopt, {}};
  try {
    auto verdict = functions_.verify(claim, blob.text);
    v.output = verdict.label;
    v.rationale = verdict.rationale;
  } catch (const UnparseableVerdict&) {
    v.anomaly = "unparseable verdict; coerced to False";
  }
  trace.final_prediction = std::get<bool>(v.output);
  trace.entries.push_back(std::move(v));
  return trace;
}

ClaimRun ProgramExecutor::run_claim(std::string_view claim, std::string_view prompt) const {
  ClaimRun run;
  const auto response = gateway_.complete(ModelRole::generator, std::string(prompt));
  run.program = dsl::extract_program(response);

  if (text::trim(run.program.code).empty()) {
    run.trace.failure = ExecutionFailure{FailureStage::extract, "no program text in generator output"};
  } else {
    try {
      auto program = dsl::parse(run.program);
      auto report = dsl::validate(program);
      if (!report.ok()) {
        std::string why;
        for (const auto& v : report.violations) {
          if (!why.empty()) why += "; ";
          why += v.rule + " (line " + std::to_string(v.line) + "): " + v.message;
        }
        run.trace.failure = ExecutionFailure{FailureStage::validate, why};
      } else {
        run.trace = execute(program);
      }
    } catch (const ParseError& e) {
      run.trace.failure = ExecutionFailure{FailureStage::parse, e.what()};
    }
  }

  if (run.trace.final_prediction) {
    run.prediction = *run.trace.final_prediction;
  } else {
    run.used_fallback = true;
    run.fallback_trace = fallback_verify(claim);
    run.prediction = *run.fallback_trace->final_prediction;
  }
  return run;
}

}  // namespace progcheck
