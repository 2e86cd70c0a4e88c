// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace gar {

enum class Errc {
  // llm gateway
  UnknownTemplate,
  MissingSlot,
  BackendUnavailable,
  SchemaViolation,
  RateLimited,
  EmptyText,
  UnmatchedFixture,
  // ingest
  EmptyDocument,
  Io,
  MalformedLine,
  ScoreOutOfRange,
  MissingDecision,
  UnknownFigureId,
  // graph
  EmptyGraph,
  // persona
  InsufficientCorpus,
  EmptyList,
  // memory
  ZeroVector,
  ModelMismatch,
  EmptyIndex,
  EmptySet,
  EmptyStore,
  CorruptIndex,
  // novelty
  SourceUnavailable,
  EmptyQuery,
  // review / meta
  KZero,
  CommitteeSizeOutOfRange,
  EmptyCommittee,
  // eval
  EmptyLog,
  SelfMatch,
  LengthMismatch,
  Empty,
  ZeroVariance,
  KeyMismatch,
  // shared
  PreconditionViolation,
  InvalidConfig,
  Aggregate,
};

std::string_view to_string(Errc code);

/// Error carrying a machine-readable code plus optional structured details
/// (line numbers, field names, slot names). Every failure surfaced by the
/// library is one of these.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

  Errc code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const;

 private:
  Errc code_;
  nlohmann::json details_;
};

/// Collects non-fatal warnings from pipeline steps.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

inline void require(bool condition, std::string_view what) {
  if (!condition) throw Error(Errc::PreconditionViolation, std::string("precondition violated: ") + std::string(what));
}

}  // namespace gar
