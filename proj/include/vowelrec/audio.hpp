#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vowelrec {

// Mono audio buffer. Samples are normalized amplitudes in [-1, 1]; all
// downstream processing is rate-agnostic and parameterized in milliseconds,
// so clips are kept at their native rate.
struct AudioClip {
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;

    std::size_t sample_count() const { return samples.size(); }
    double duration_seconds() const {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
    }
};

enum class WavBitDepth { Pcm16 = 16, Float32 = 32 };

// Reads a mono RIFF/WAVE file, PCM 16-bit or IEEE float 32-bit.
// 16-bit samples are scaled by 1/32768. Throws MalformedHeader on container
// problems, UnsupportedFormat on codecs/depths/channel counts outside that.
AudioClip read_wav(const std::filesystem::path& path);

// Writes a standards-conformant mono WAV. 16-bit output rounds to nearest
// and clamps at full scale. Identical clip + depth produce identical bytes.
void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               WavBitDepth depth = WavBitDepth::Pcm16);

}  // namespace vowelrec
