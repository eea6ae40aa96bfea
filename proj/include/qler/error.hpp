// Copyright 2026 The qler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qler {

/// Failure categories surfaced by the library. The CLI maps these onto process
/// exit codes; tests match on them.
enum class ErrorKind {
    UnknownInstruction,
    BadRecordReference,
    ArityError,
    NonCliffordOp,
    LocationOutOfRange,
    DuplicateLocation,
    NotMatchable,
    TooManyDefects,
    WeightOutOfRange,
    InsufficientData,
    FitDiverged,
    DomainError,
    UnsupportedDistance,
    NoErrorsAnywhere,
    FormatError,
    IoError,
    ConfigError,
    Internal,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownInstruction: return "UnknownInstruction";
        case ErrorKind::BadRecordReference: return "BadRecordReference";
        case ErrorKind::ArityError: return "ArityError";
        case ErrorKind::NonCliffordOp: return "NonCliffordOp";
        case ErrorKind::LocationOutOfRange: return "LocationOutOfRange";
        case ErrorKind::DuplicateLocation: return "DuplicateLocation";
        case ErrorKind::NotMatchable: return "NotMatchable";
        case ErrorKind::TooManyDefects: return "TooManyDefects";
        case ErrorKind::WeightOutOfRange: return "WeightOutOfRange";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::FitDiverged: return "FitDiverged";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::UnsupportedDistance: return "UnsupportedDistance";
        case ErrorKind::NoErrorsAnywhere: return "NoErrorsAnywhere";
        case ErrorKind::FormatError: return "FormatError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

/// Library-wide exception. `line` is 1-based when the error originates from a
/// parsed text file, -1 otherwise.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message, int line = -1)
        : std::runtime_error(format_message(kind, message, line)), kind_(kind), line_(line) {}

    ErrorKind kind() const { return kind_; }
    int line() const { return line_; }

  private:
    static std::string format_message(ErrorKind kind, const std::string& message, int line) {
        std::string out{error_kind_name(kind)};
        if (line >= 0) {
            out += " (line " + std::to_string(line) + ")";
        }
        out += ": ";
        out += message;
        return out;
    }

    ErrorKind kind_;
    int line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, int line = -1) {
    throw Error(kind, message, line);
}

inline void require(bool condition, ErrorKind kind, const std::string& message, int line = -1) {
    if (!condition) {
        fail(kind, message, line);
    }
}

}  // namespace qler
