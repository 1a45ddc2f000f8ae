#pragma once

#include <cstdint>
#include <cstddef>

#include <vector>

#include "vowelrec/audio.hpp"

namespace vowelrec {

// Per-frame RMS amplitudes over rectangular windows.
struct IntensityTrack {
    std::vector<double> values;
    double frame_ms = 0.0;
    double hop_ms = 0.0;
    std::uint32_t sample_rate = 0;
    std::size_t frame_samples = 0;
    std::size_t hop_samples = 0;
};

struct SegmenterParams {
    double frame_ms = 10.0;
    double hop_ms = 5.0;
    double lead_s = 0.25;    // leading stretch assumed to be silence
    double pad_ms = 30.0;    // margin added on each side of the detected run
    double min_run_ms = 40.0;
};

// Detected vowel interval, in sample indices of the source clip.
struct VowelSegment {
    std::size_t start_sample = 0;
    std::size_t end_sample = 0;  // exclusive
    double noise_ceiling = 0.0;
    double threshold = 0.0;  // always exactly 2 * noise_ceiling
    std::uint32_t source_rate = 0;

    std::size_t length() const { return end_sample - start_sample; }
    double start_seconds() const {
        return static_cast<double>(start_sample) / source_rate;
    }
    double end_seconds() const { return static_cast<double>(end_sample) / source_rate; }
};

// value[i] = sqrt(mean of squared samples in window i). Throws ClipTooShort
// when the clip does not cover one full frame.
IntensityTrack frame_rms(const AudioClip& clip, double frame_ms = 10.0,
                         double hop_ms = 5.0);

// Max of the track values whose window lies entirely within the first
// lead_s seconds. Throws LeadTooShort when no window qualifies.
double noise_ceiling(const IntensityTrack& track, double lead_s = 0.25);

// Finds maximal runs of frames with RMS > 2 * noise ceiling, drops runs
// shorter than min_run_ms, picks the longest survivor (ties -> earliest),
// and pads by pad_ms on each side clamped to the clip. Throws NoVowelFound
// when nothing survives and DegenerateThreshold when the lead is digital
// silence (ceiling exactly 0).
VowelSegment extract_vowel(const AudioClip& clip, const SegmenterParams& params = {});

}  // namespace vowelrec
