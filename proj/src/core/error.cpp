#include "histoprompt/core/error.hpp"

namespace histoprompt {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::InvalidFeatureSet: return "InvalidFeatureSet";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::ManifestMismatch: return "ManifestMismatch";
        case ErrorCode::UnsupportedImage: return "UnsupportedImage";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::CoincidentCentroids: return "CoincidentCentroids";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingCluster: return "MissingCluster";
        case ErrorCode::MalformedPrompt: return "MalformedPrompt";
        case ErrorCode::InsufficientPrompts: return "InsufficientPrompts";
        case ErrorCode::InsufficientExamples: return "InsufficientExamples";
        case ErrorCode::CountMismatch: return "CountMismatch";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::EmptyCell: return "EmptyCell";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::IncompleteResponses: return "IncompleteResponses";
        case ErrorCode::SingleClassTruth: return "SingleClassTruth";
        case ErrorCode::InvalidCounts: return "InvalidCounts";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::DuplicateSession: return "DuplicateSession";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::OutOfOrder: return "OutOfOrder";
        case ErrorCode::InvalidChoice: return "InvalidChoice";
        case ErrorCode::AlreadyAnswered: return "AlreadyAnswered";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::TypeError: return "TypeError";
        case ErrorCode::MissingDependency: return "MissingDependency";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingDependency:
            return 3;
        case ErrorCode::IoFailure:
        case ErrorCode::DegenerateData:
        case ErrorCode::CoincidentCentroids:
        case ErrorCode::NotSymmetric:
            return 4;
        default:
            return 2;
    }
}

}  // namespace histoprompt
