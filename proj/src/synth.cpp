#include "vowelrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "vowelrec/errors.hpp"
#include "vowelrec/rng.hpp"

namespace vowelrec {
namespace {

constexpr const char* kGeneratorVersion = "vowelrec-corpus-1";

// Two-pole resonator with unit gain at its center frequency.
class Resonator {
public:
    Resonator(double center_hz, double bandwidth_hz, double gain, double sample_rate) {
        const double r = std::exp(-std::numbers::pi * bandwidth_hz / sample_rate);
        const double theta = 2.0 * std::numbers::pi * center_hz / sample_rate;
        b1_ = 2.0 * r * std::cos(theta);
        b2_ = -r * r;
        // normalize |H| to 1 at the center frequency
        const std::complex<double> z1 = std::polar(1.0, -theta);
        const std::complex<double> h = 1.0 / (1.0 - b1_ * z1 - b2_ * z1 * z1);
        g_ = gain / std::abs(h);
    }

    double step(double x) {
        const double y = g_ * x + b1_ * y1_ + b2_ * y2_;
        y2_ = y1_;
        y1_ = y;
        return y;
    }

private:
    double b1_, b2_, g_;
    double y1_ = 0.0, y2_ = 0.0;
};

void validate_profile(const FormantProfile& profile, std::uint32_t sample_rate) {
    if (profile.formants.size() < 2)
        throw InvalidProfile("profile needs at least two formants");
    if (profile.f0_hz <= 0.0) throw InvalidProfile("f0 must be positive");
    const double nyquist = sample_rate / 2.0;
    for (const auto& f : profile.formants) {
        if (f.center_hz <= 0.0 || f.center_hz >= nyquist)
            throw InvalidProfile("formant at " + std::to_string(f.center_hz) +
                                 " Hz is outside (0, Nyquist)");
        if (f.bandwidth_hz <= 0.0) throw InvalidProfile("bandwidth must be positive");
        if (f.amplitude <= 0.0 || f.amplitude > 1.0)
            throw InvalidProfile("relative amplitude must be in (0, 1]");
    }
}

void raised_cosine_fades(std::vector<double>& x, std::size_t fade_len) {
    fade_len = std::min(fade_len, x.size() / 2);
    for (std::size_t i = 0; i < fade_len; ++i) {
        const double g =
            0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(fade_len)));
        x[i] *= g;
        x[x.size() - 1 - i] *= g;
    }
}

void normalize_peak(std::vector<double>& x, double target) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0) return;
    const double s = target / peak;
    for (double& v : x) v *= s;
}

std::size_t samples_at(double seconds, std::uint32_t rate) {
    return static_cast<std::size_t>(std::lround(seconds * rate));
}

}  // namespace

VowelProfileSet load_vowel_profiles(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw IoFailure("cannot open vowel profiles: " + json_path.string());
    nlohmann::json j;
    try {
        in >> j;
        VowelProfileSet set;
        set.base_f0 = j.at("f0").get<double>();
        for (Vowel v : all_vowels()) {
            const auto& jv = j.at("vowels").at(std::string(vowel_name(v)));
            FormantProfile p;
            p.f0_hz = set.base_f0;
            p.label = v;
            for (const auto& jf : jv.at("formants"))
                p.formants.push_back({jf.at(0).get<double>(), jf.at(1).get<double>(),
                                      jf.at(2).get<double>()});
            set.vowels[static_cast<std::size_t>(v)] = std::move(p);
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidProfile("bad vowel profile file: " + std::string(e.what()));
    }
}

SpeakerVoice make_speaker_voice(const VowelProfileSet& base, std::size_t speaker_index,
                                std::uint64_t corpus_seed) {
    Rng rng(mix_seed(corpus_seed, 0xA11CEull, speaker_index));

    SpeakerVoice voice;
    char buf[8];
    std::snprintf(buf, sizeof buf, "s%02zu", speaker_index);
    voice.id = buf;
    // alternate low/high pitch registers across speakers
    voice.f0_hz = (speaker_index % 2 == 0) ? rng.uniform(100.0, 140.0)
                                           : rng.uniform(185.0, 230.0);

    // one vocal-tract length factor per speaker plus small per-formant jitter,
    // bounded to +/-8% overall
    const double tract = rng.uniform(0.94, 1.06);
    for (Vowel v : all_vowels()) {
        FormantProfile p = base.vowels[static_cast<std::size_t>(v)];
        p.f0_hz = voice.f0_hz;
        for (auto& f : p.formants) {
            const double scale =
                std::clamp(tract * rng.uniform(0.98, 1.02), 0.92, 1.08);
            f.center_hz *= scale;
            f.bandwidth_hz *= rng.uniform(0.9, 1.1);
        }
        voice.vowels[static_cast<std::size_t>(v)] = std::move(p);
    }
    return voice;
}

AudioClip synth_vowel(const FormantProfile& profile, double duration_s,
                      std::uint32_t sample_rate, std::uint64_t seed) {
    if (duration_s <= 0.0) throw InvalidProfile("duration must be positive");
    validate_profile(profile, sample_rate);

    const std::size_t n = std::max<std::size_t>(1, samples_at(duration_s, sample_rate));
    Rng rng(seed);

    // glottal excitation: impulse train plus a little aspiration noise
    std::vector<double> excitation(n);
    double phase = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.01 * rng.signed_unit();
        phase += profile.f0_hz / sample_rate;
        if (phase >= 1.0) {
            phase -= 1.0;
            e += 1.0;
        }
        excitation[i] = e;
    }

    std::vector<double> mix(n, 0.0);
    for (const auto& f : profile.formants) {
        Resonator res(f.center_hz, f.bandwidth_hz, f.amplitude, sample_rate);
        for (std::size_t i = 0; i < n; ++i) mix[i] += res.step(excitation[i]);
    }

    normalize_peak(mix, 0.5);
    raised_cosine_fades(mix, samples_at(0.010, sample_rate));

    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples = std::move(mix);
    return clip;
}

CvSample synth_cv_sample(std::size_t consonant_id, const FormantProfile& profile,
                         const CvLayout& layout, std::uint32_t sample_rate,
                         std::uint64_t seed) {
    if (layout.lead_silence_s < 0.25)
        throw InvalidLayout("lead silence must be at least 0.25s");
    if (layout.duration_s <= 0.0 || layout.speech_s <= 0.0)
        throw InvalidLayout("durations must be positive");
    if (layout.noise_floor_amp < 0.0 || layout.noise_floor_amp > 0.002)
        throw InvalidLayout("noise floor amplitude must stay within [0, 0.002]");

    Rng rng(mix_seed(seed, 0xCB5ull, consonant_id));

    const std::size_t n_total = samples_at(layout.duration_s, sample_rate);
    const double lead_s =
        std::max(0.25, layout.lead_silence_s + rng.uniform(-0.02, 0.03));
    const double burst_ms = rng.uniform(50.0, 80.0);
    const double gap_ms = 30.0;  // stop closure between burst and vowel
    const double vowel_ms =
        layout.speech_s * 1000.0 - burst_ms - gap_ms + rng.uniform(-15.0, 15.0);
    if (vowel_ms <= 0.0)
        throw InvalidLayout("speech window leaves no room for the vowel");

    const std::size_t lead_n = samples_at(lead_s, sample_rate);
    const std::size_t burst_n = samples_at(burst_ms / 1000.0, sample_rate);
    const std::size_t gap_n = samples_at(gap_ms / 1000.0, sample_rate);
    const std::size_t vowel_n = samples_at(vowel_ms / 1000.0, sample_rate);
    if (lead_n + burst_n + gap_n + vowel_n > n_total)
        throw InvalidLayout("speech does not fit into the clip duration");

    CvSample out;
    out.clip.sample_rate = sample_rate;
    out.clip.samples.resize(n_total);
    for (auto& s : out.clip.samples) s = layout.noise_floor_amp * rng.signed_unit();

    // consonant surrogate: band-limited noise burst, band picked per consonant
    {
        const double center = 400.0 + 170.0 * static_cast<double>(consonant_id % 23);
        Resonator res(std::min(center, sample_rate / 2.0 - 200.0), 600.0, 1.0,
                      sample_rate);
        std::vector<double> burst(burst_n);
        for (auto& s : burst) s = res.step(rng.signed_unit());
        normalize_peak(burst, rng.uniform(0.10, 0.20));
        raised_cosine_fades(burst, samples_at(0.003, sample_rate));
        for (std::size_t i = 0; i < burst_n; ++i) out.clip.samples[lead_n + i] += burst[i];
    }

    // vowel, with per-sample pitch jitter
    {
        FormantProfile jittered = profile;
        jittered.f0_hz *= rng.uniform(0.97, 1.03);
        const AudioClip vowel = synth_vowel(jittered, vowel_ms / 1000.0, sample_rate,
                                            mix_seed(seed, 0xF0ull));
        out.vowel_start = lead_n + burst_n + gap_n;
        out.vowel_end = out.vowel_start + vowel.samples.size();
        for (std::size_t i = 0; i < vowel.samples.size(); ++i)
            out.clip.samples[out.vowel_start + i] += vowel.samples[i];
    }

    for (auto& s : out.clip.samples) s = std::clamp(s, -1.0, 1.0);
    return out;
}

Manifest generate_corpus(const CorpusConfig& config) {
    if (config.n_speakers < 1) throw InvalidLayout("corpus needs at least one speaker");
    if (config.sample_rate == 0) throw InvalidLayout("sample rate must be positive");

    const auto& inventory = consonant_inventory();
    std::vector<std::string> consonants =
        config.consonants.empty() ? inventory : config.consonants;
    for (const auto& c : consonants) {
        if (std::find(inventory.begin(), inventory.end(), c) == inventory.end())
            throw InvalidLayout("unknown consonant: " + c);
    }

    std::filesystem::create_directories(config.out_dir);

    Manifest manifest;
    manifest.base_dir = config.out_dir;
    manifest.meta = CorpusMeta{config.sample_rate, config.layout.duration_s, config.seed,
                               kGeneratorVersion};

    for (std::size_t sp = 0; sp < config.n_speakers; ++sp) {
        const SpeakerVoice voice = make_speaker_voice(config.profiles, sp, config.seed);
        std::filesystem::create_directories(config.out_dir / voice.id);
        for (const auto& consonant : consonants) {
            const auto ci = static_cast<std::size_t>(
                std::find(inventory.begin(), inventory.end(), consonant) -
                inventory.begin());
            for (Vowel v : all_vowels()) {
                const auto vi = static_cast<std::size_t>(v);
                const std::uint64_t entry_seed = mix_seed(config.seed, sp, ci, vi);
                const CvSample sample = synth_cv_sample(
                    ci, voice.vowels[vi], config.layout, config.sample_rate, entry_seed);
                const std::string rel = voice.id + "/" + voice.id + "_" + consonant +
                                        "_" + std::string(vowel_name(v)) + ".wav";
                write_wav(sample.clip, config.out_dir / rel, WavBitDepth::Pcm16);
                manifest.entries.push_back({rel, voice.id, consonant, v});
            }
        }
    }

    write_manifest(manifest, config.out_dir / "corpus.csv");
    return manifest;
}

}  // namespace vowelrec
