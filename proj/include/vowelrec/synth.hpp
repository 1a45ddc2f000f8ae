#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vowelrec/audio.hpp"
#include "vowelrec/labels.hpp"
#include "vowelrec/manifest.hpp"

namespace vowelrec {

struct FormantSpec {
    double center_hz = 0.0;
    double bandwidth_hz = 0.0;
    double amplitude = 1.0;  // relative, in (0, 1]
};

struct FormantProfile {
    double f0_hz = 120.0;
    std::vector<FormantSpec> formants;  // length >= 2
    Vowel label = Vowel::A;
};

// The six base vowel targets plus the reference f0, loaded from a config
// file so the targets stay tuning data instead of code.
struct VowelProfileSet {
    double base_f0 = 120.0;
    std::array<FormantProfile, kVowelCount> vowels;
};

VowelProfileSet load_vowel_profiles(const std::filesystem::path& json_path);

// One synthetic speaker: the base profiles with formant frequencies scaled
// per formant (within +/-8%) and a speaker-specific f0.
struct SpeakerVoice {
    std::string id;
    double f0_hz = 120.0;
    std::array<FormantProfile, kVowelCount> vowels;
};

SpeakerVoice make_speaker_voice(const VowelProfileSet& base, std::size_t speaker_index,
                                std::uint64_t corpus_seed);

// Voiced segment: impulse train at f0 through one two-pole resonator per
// formant (parallel, amplitude-weighted, summed), peak-normalized to 0.5,
// with 10ms raised-cosine fades. Deterministic in all arguments.
AudioClip synth_vowel(const FormantProfile& profile, double duration_s,
                      std::uint32_t sample_rate, std::uint64_t seed);

struct CvLayout {
    double duration_s = 2.0;
    double lead_silence_s = 0.30;  // must stay >= 0.25
    double speech_s = 0.50;        // consonant surrogate + vowel, approximate
    double noise_floor_amp = 0.0015;
};

struct CvSample {
    AudioClip clip;
    std::size_t vowel_start = 0;  // ground truth, sample indices
    std::size_t vowel_end = 0;
};

// Noise floor, then a consonant surrogate (band-limited burst + stop gap,
// 60-120ms, peak <= 0.25), then the vowel, then floor to the end.
CvSample synth_cv_sample(std::size_t consonant_id, const FormantProfile& profile,
                         const CvLayout& layout, std::uint32_t sample_rate,
                         std::uint64_t seed);

struct CorpusConfig {
    std::filesystem::path out_dir;
    std::size_t n_speakers = 4;
    std::uint64_t seed = 1;
    std::uint32_t sample_rate = 16000;
    CvLayout layout;
    VowelProfileSet profiles;
    std::vector<std::string> consonants;  // empty = full 23-consonant inventory
};

// Writes one WAV per (speaker, consonant, vowel) plus corpus.csv and
// corpus.json. Re-running with the same config + seed reproduces identical
// bytes.
Manifest generate_corpus(const CorpusConfig& config);

}  // namespace vowelrec
