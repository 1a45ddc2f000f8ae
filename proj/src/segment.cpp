#include "vowelrec/segment.hpp"

#include <cmath>
#include <string>

#include "vowelrec/errors.hpp"

namespace vowelrec {
namespace {

std::size_t samples_from_ms(double ms, std::uint32_t rate) {
    auto n = std::lround(ms * rate / 1000.0);
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

}  // namespace

IntensityTrack frame_rms(const AudioClip& clip, double frame_ms, double hop_ms) {
    if (hop_ms <= 0.0 || frame_ms < hop_ms)
        throw Error("frame_rms requires frame_ms >= hop_ms > 0");

    IntensityTrack track;
    track.frame_ms = frame_ms;
    track.hop_ms = hop_ms;
    track.sample_rate = clip.sample_rate;
    track.frame_samples = samples_from_ms(frame_ms, clip.sample_rate);
    track.hop_samples = samples_from_ms(hop_ms, clip.sample_rate);

    const std::size_t n = clip.samples.size();
    if (n < track.frame_samples)
        throw ClipTooShort("clip shorter than one analysis frame");

    const std::size_t count = (n - track.frame_samples) / track.hop_samples + 1;
    track.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t begin = i * track.hop_samples;
        double acc = 0.0;
        for (std::size_t k = begin; k < begin + track.frame_samples; ++k)
            acc += clip.samples[k] * clip.samples[k];
        track.values.push_back(std::sqrt(acc / static_cast<double>(track.frame_samples)));
    }
    return track;
}

double noise_ceiling(const IntensityTrack& track, double lead_s) {
    const auto lead_samples =
        static_cast<std::size_t>(std::lround(lead_s * track.sample_rate));
    const std::size_t covered = track.values.empty()
                                    ? 0
                                    : (track.values.size() - 1) * track.hop_samples +
                                          track.frame_samples;
    if (covered < lead_samples)
        throw LeadTooShort("clip does not cover the " + std::to_string(lead_s) +
                           "s lead window");
    double best = -1.0;
    for (std::size_t i = 0; i < track.values.size(); ++i) {
        if (i * track.hop_samples + track.frame_samples > lead_samples) break;
        best = std::max(best, track.values[i]);
    }
    if (best < 0.0)
        throw LeadTooShort("no analysis window fits inside the lead");
    return best;
}

VowelSegment extract_vowel(const AudioClip& clip, const SegmenterParams& params) {
    const IntensityTrack track = frame_rms(clip, params.frame_ms, params.hop_ms);
    const double ceiling = noise_ceiling(track, params.lead_s);
    if (ceiling == 0.0)
        throw DegenerateThreshold("lead is digital silence; threshold would be 0");
    const double threshold = 2.0 * ceiling;

    // maximal runs of frames strictly above threshold
    struct Run {
        std::size_t first, last;  // inclusive frame indices
    };
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < track.values.size()) {
        if (track.values[i] > threshold) {
            std::size_t j = i;
            while (j + 1 < track.values.size() && track.values[j + 1] > threshold) ++j;
            runs.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }

    const std::size_t min_run_samples = samples_from_ms(params.min_run_ms, clip.sample_rate);
    const Run* best = nullptr;
    std::size_t best_span = 0;
    for (const Run& run : runs) {
        const std::size_t span =
            (run.last - run.first) * track.hop_samples + track.frame_samples;
        if (span < min_run_samples) continue;
        if (best == nullptr || span > best_span) {  // ties keep the earliest
            best = &run;
            best_span = span;
        }
    }
    if (best == nullptr)
        throw NoVowelFound("no frame run above threshold survives the minimum length");

    const std::size_t pad = samples_from_ms(params.pad_ms, clip.sample_rate);
    const std::size_t raw_start = best->first * track.hop_samples;
    const std::size_t raw_end = best->last * track.hop_samples + track.frame_samples;

    VowelSegment seg;
    seg.start_sample = raw_start > pad ? raw_start - pad : 0;
    seg.end_sample = std::min(raw_end + pad, clip.samples.size());
    seg.noise_ceiling = ceiling;
    seg.threshold = threshold;
    seg.source_rate = clip.sample_rate;
    return seg;
}

}  // namespace vowelrec
