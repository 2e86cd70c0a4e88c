// SPDX-License-Identifier: Apache-2.0

#include "gar/core/error.hpp"

namespace gar {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownTemplate: return "UnknownTemplate";
    case Errc::MissingSlot: return "MissingSlot";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::RateLimited: return "RateLimited";
    case Errc::EmptyText: return "EmptyText";
    case Errc::UnmatchedFixture: return "UnmatchedFixture";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::Io: return "Io";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::MissingDecision: return "MissingDecision";
    case Errc::UnknownFigureId: return "UnknownFigureId";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::InsufficientCorpus: return "InsufficientCorpus";
    case Errc::EmptyList: return "EmptyList";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::ModelMismatch: return "ModelMismatch";
    case Errc::EmptyIndex: return "EmptyIndex";
    case Errc::EmptySet: return "EmptySet";
    case Errc::EmptyStore: return "EmptyStore";
    case Errc::CorruptIndex: return "CorruptIndex";
    case Errc::SourceUnavailable: return "SourceUnavailable";
    case Errc::EmptyQuery: return "EmptyQuery";
    case Errc::KZero: return "KZero";
    case Errc::CommitteeSizeOutOfRange: return "CommitteeSizeOutOfRange";
    case Errc::EmptyCommittee: return "EmptyCommittee";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::SelfMatch: return "SelfMatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Empty: return "Empty";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::PreconditionViolation: return "PreconditionViolation";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Aggregate: return "Aggregate";
  }
  return "Unknown";
}

nlohmann::json Error::to_json() const {
  return {{"error", std::string(to_string(code_))}, {"message", what()}, {"details", details_}};
}

}  // namespace gar
