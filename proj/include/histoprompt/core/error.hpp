#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace histoprompt {

enum class ErrorCode {
    IoFailure,
    InvalidFeatureSet,
    BadMagic,
    TruncatedFile,
    EmptySet,
    ManifestMismatch,
    UnsupportedImage,
    DecodeError,
    TooFewPoints,
    DegenerateData,
    CoincidentCentroids,
    DimensionMismatch,
    MissingCluster,
    MalformedPrompt,
    InsufficientPrompts,
    InsufficientExamples,
    CountMismatch,
    InsufficientData,
    EmptyCell,
    NotSymmetric,
    IncompleteResponses,
    SingleClassTruth,
    InvalidCounts,
    LengthMismatch,
    EmptyInput,
    EmptyGroup,
    DuplicateSession,
    UnknownSession,
    OutOfOrder,
    InvalidChoice,
    AlreadyAnswered,
    UnknownKey,
    TypeError,
    MissingDependency,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exit code convention of the command line tool: 2 validation, 3 missing
/// dependency, 4 runtime failure.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace histoprompt
