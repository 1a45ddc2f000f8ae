#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "vowelrec/errors.hpp"
#include "vowelrec/fft.hpp"
#include "vowelrec/segment.hpp"
#include "vowelrec/synth.hpp"

using namespace vowelrec;
namespace fs = std::filesystem;

#ifndef VOWELREC_DATA_DIR
#define VOWELREC_DATA_DIR "data"
#endif

namespace {

fs::path temp_root() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("vowelrec_synth_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FormantProfile two_formant_profile() {
    FormantProfile p;
    p.f0_hz = 100.0;
    p.formants = {{700.0, 90.0, 1.0}, {1200.0, 110.0, 0.6}};
    return p;
}

// frequency of the strongest FFT bin within [lo, hi] over the steady state
double peak_frequency(const AudioClip& clip, double lo_hz, double hi_hz) {
    const std::size_t begin = clip.samples.size() / 5;
    const std::size_t len = clip.samples.size() * 3 / 5;
    const std::size_t n_fft = next_pow2(len);
    std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
    for (std::size_t i = 0; i < len; ++i) {
        const double hann =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (len - 1.0)));
        buf[i] = clip.samples[begin + i] * hann;
    }
    fft_radix2(buf);
    const double bin_hz = static_cast<double>(clip.sample_rate) / n_fft;
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t k = 0; k <= n_fft / 2; ++k) {
        const double f = k * bin_hz;
        if (f < lo_hz || f > hi_hz) continue;
        if (std::norm(buf[k]) > best_power) {
            best_power = std::norm(buf[k]);
            best = k;
        }
    }
    return best * bin_hz;
}

VowelProfileSet profiles() {
    return load_vowel_profiles(fs::path(VOWELREC_DATA_DIR) / "vowel_profiles.json");
}

}  // namespace

TEST_CASE("synth_vowel is deterministic and sized by duration * rate") {
    const auto p = two_formant_profile();
    const AudioClip a = synth_vowel(p, 0.3, 16000, 42);
    const AudioClip b = synth_vowel(p, 0.3, 16000, 42);
    CHECK(a.samples == b.samples);
    CHECK(a.samples.size() == 4800);

    const AudioClip c = synth_vowel(p, 0.3, 16000, 43);
    CHECK(a.samples != c.samples);  // seed matters (aspiration noise)
}

TEST_CASE("synth_vowel peaks at 0.5 after normalization") {
    const AudioClip clip = synth_vowel(two_formant_profile(), 0.3, 16000, 1);
    double peak = 0.0;
    for (double s : clip.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("spectral peaks land within 50 Hz of the formant targets") {
    const AudioClip clip = synth_vowel(two_formant_profile(), 0.3, 16000, 42);
    CHECK(std::abs(peak_frequency(clip, 450.0, 950.0) - 700.0) <= 50.0);
    CHECK(std::abs(peak_frequency(clip, 950.0, 1450.0) - 1200.0) <= 50.0);
}

TEST_CASE("every stock profile carries its first two formants") {
    // at f0 = 100 the strongest harmonic stays within half a harmonic step of
    // the resonance; allow FFT bin quantization on top
    const VowelProfileSet set = profiles();
    for (Vowel v : all_vowels()) {
        FormantProfile p = set.vowels[static_cast<std::size_t>(v)];
        p.f0_hz = 100.0;
        const AudioClip clip = synth_vowel(p, 0.4, 16000, 7);
        for (std::size_t f = 0; f < 2; ++f) {
            const double target = p.formants[f].center_hz;
            const double peak = peak_frequency(clip, target - 220.0, target + 220.0);
            CHECK(std::abs(peak - target) <= 60.0);
        }
    }
}

TEST_CASE("profiles beyond Nyquist are rejected") {
    FormantProfile p = two_formant_profile();
    p.formants[1].center_hz = 9000.0;  // >= 16k/2
    CHECK_THROWS_AS(synth_vowel(p, 0.1, 16000, 1), InvalidProfile);
}

TEST_CASE("CV sample layout") {
    const CvSample s = synth_cv_sample(3, two_formant_profile(), CvLayout{}, 16000, 5);

    SUBCASE("2s at 16 kHz is exactly 32000 samples") {
        CHECK(s.clip.samples.size() == 32000);
    }
    SUBCASE("the first 0.25s stays within the noise floor bound") {
        for (std::size_t i = 0; i < 4000; ++i)
            CHECK(std::abs(s.clip.samples[i]) <= 0.002);
    }
    SUBCASE("noise ceiling measured on the lead is within the floor bound") {
        CHECK(noise_ceiling(frame_rms(s.clip)) <= 0.002);
    }
    SUBCASE("ground truth interval is ordered and inside the clip") {
        CHECK(s.vowel_start < s.vowel_end);
        CHECK(s.vowel_end <= s.clip.samples.size());
    }
    SUBCASE("speech that cannot fit raises InvalidLayout") {
        CvLayout tight;
        tight.duration_s = 0.6;
        CHECK_THROWS_AS(synth_cv_sample(3, two_formant_profile(), tight, 16000, 5),
                        InvalidLayout);
    }
    SUBCASE("lead below 0.25s raises InvalidLayout") {
        CvLayout bad;
        bad.lead_silence_s = 0.1;
        CHECK_THROWS_AS(synth_cv_sample(3, two_formant_profile(), bad, 16000, 5),
                        InvalidLayout);
    }
}

TEST_CASE("corpus generation: counts, determinism, manifest round trip") {
    CorpusConfig cfg;
    cfg.profiles = profiles();
    cfg.seed = 77;

    SUBCASE("one speaker restricted to one consonant gives 6 entries") {
        cfg.out_dir = temp_root() / "six";
        cfg.n_speakers = 1;
        cfg.consonants = {"P"};
        const Manifest m = generate_corpus(cfg);
        REQUIRE(m.entries.size() == 6);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(m.entries[i].vowel == static_cast<Vowel>(i));
    }

    SUBCASE("full inventory gives 138 entries per speaker") {
        cfg.out_dir = temp_root() / "full2";
        cfg.n_speakers = 2;
        const Manifest m = generate_corpus(cfg);
        CHECK(m.entries.size() == 2 * 138);
        CHECK(m.speakers() == std::vector<std::string>{"s00", "s01"});

        // same config + seed reproduces identical bytes
        CorpusConfig again = cfg;
        again.out_dir = temp_root() / "full2_again";
        generate_corpus(again);
        CHECK(slurp(cfg.out_dir / "corpus.csv") == slurp(again.out_dir / "corpus.csv"));
        CHECK(slurp(cfg.out_dir / "corpus.json") == slurp(again.out_dir / "corpus.json"));
        for (const auto& e : m.entries)
            CHECK(slurp(cfg.out_dir / e.path) == slurp(again.out_dir / e.path));

        // manifest reload matches what the generator returned
        const Manifest loaded = read_manifest(cfg.out_dir / "corpus.csv");
        REQUIRE(loaded.entries.size() == m.entries.size());
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            CHECK(loaded.entries[i].path == m.entries[i].path);
            CHECK(loaded.entries[i].speaker == m.entries[i].speaker);
            CHECK(loaded.entries[i].consonant == m.entries[i].consonant);
            CHECK(loaded.entries[i].vowel == m.entries[i].vowel);
        }
        REQUIRE(loaded.meta.has_value());
        CHECK(loaded.meta->sample_rate == 16000);
        CHECK(loaded.meta->seed == 77);
    }

    SUBCASE("unknown consonant is rejected") {
        cfg.out_dir = temp_root() / "badc";
        cfg.consonants = {"Xx"};
        CHECK_THROWS_AS(generate_corpus(cfg), InvalidLayout);
    }
}

TEST_CASE("manifest parsing rejects duplicates and bad labels") {
    const fs::path dir = temp_root() / "manifests";
    fs::create_directories(dir);

    SUBCASE("duplicate path") {
        const fs::path csv = dir / "dup.csv";
        std::ofstream(csv) << "path,speaker,consonant,vowel\n"
                              "a.wav,s00,P,A\n"
                              "a.wav,s00,B,I\n";
        CHECK_THROWS_AS(read_manifest(csv), ManifestError);
    }
    SUBCASE("unknown vowel") {
        const fs::path csv = dir / "badv.csv";
        std::ofstream(csv) << "b.wav,s00,P,Q\n";
        CHECK_THROWS_AS(read_manifest(csv), ManifestError);
    }
    SUBCASE("display form of ae parses too") {
        const fs::path csv = dir / "ae.csv";
        std::ofstream(csv) << "c.wav,s00,P,\xc3\xa6\n";
        CHECK(read_manifest(csv).entries.at(0).vowel == Vowel::Ae);
    }
}

TEST_CASE("speaker voices perturb formants within 8% and vary f0") {
    const VowelProfileSet base = profiles();
    const SpeakerVoice v0 = make_speaker_voice(base, 0, 42);
    const SpeakerVoice v1 = make_speaker_voice(base, 1, 42);
    CHECK(v0.f0_hz != v1.f0_hz);
    for (std::size_t vi = 0; vi < kVowelCount; ++vi) {
        for (std::size_t f = 0; f < base.vowels[vi].formants.size(); ++f) {
            const double ratio = v0.vowels[vi].formants[f].center_hz /
                                 base.vowels[vi].formants[f].center_hz;
            CHECK(ratio >= 0.92);
            CHECK(ratio <= 1.08);
        }
    }
    // deterministic per (seed, index)
    const SpeakerVoice v0_again = make_speaker_voice(base, 0, 42);
    CHECK(v0.f0_hz == v0_again.f0_hz);
    CHECK(v0.vowels[0].formants[0].center_hz ==
          v0_again.vowels[0].formants[0].center_hz);
}
