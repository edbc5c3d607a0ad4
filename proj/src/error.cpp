#include "gcops/error.hpp"

namespace gcops {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::RegionMismatch: return "RegionMismatch";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::WindowLargerThanImage: return "WindowLargerThanImage";
    case ErrorCode::NoScores: return "NoScores";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorCode::DegenerateHistogram: return "DegenerateHistogram";
    case ErrorCode::TooFewBlocks: return "TooFewBlocks";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gcops
