#pragma once

#include <stdexcept>

namespace vowelrec {

// Base for all recoverable errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// audio i/o
struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// synthesis / manifest
struct InvalidProfile : Error { using Error::Error; };
struct InvalidLayout : Error { using Error::Error; };
struct ManifestError : Error { using Error::Error; };

// segmentation
struct ClipTooShort : Error { using Error::Error; };
struct LeadTooShort : Error { using Error::Error; };
struct NoVowelFound : Error { using Error::Error; };
// An all-zero lead gives ceiling 0 and threshold 0, which every frame passes.
// Digital silence is still "no vowel", so this subtypes NoVowelFound.
struct DegenerateThreshold : NoVowelFound { using NoVowelFound::NoVowelFound; };

// mfcc front-end
struct NegativeFrequency : Error { using Error::Error; };
struct SegmentTooShort : Error { using Error::Error; };
struct TooFewBins : Error { using Error::Error; };
struct EmptyMatrix : Error { using Error::Error; };

// classifier
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct NonFiniteObjective : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct MalformedModelFile : Error { using Error::Error; };

// pipeline
struct UnknownSpeaker : Error { using Error::Error; };
struct EmptySplit : Error { using Error::Error; };
struct NoTrainableExamples : Error { using Error::Error; };
struct FeatureDimensionMismatch : Error { using Error::Error; };

}  // namespace vowelrec
