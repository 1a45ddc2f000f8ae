#include "vowelrec/mfcc.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "vowelrec/errors.hpp"
#include "vowelrec/fft.hpp"

namespace vowelrec {
namespace {

std::size_t samples_from_ms(double ms, std::uint32_t rate) {
    auto n = std::lround(ms * rate / 1000.0);
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

std::vector<double> hamming_window(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length < 2) return w;
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                      static_cast<double>(length - 1));
    return w;
}

}  // namespace

double hz_to_mel(double f_hz) {
    if (f_hz < 0.0) throw NegativeFrequency("hz_to_mel: " + std::to_string(f_hz));
    return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
    if (mel < 0.0) throw NegativeFrequency("mel_to_hz: " + std::to_string(mel));
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const VowelSegment& segment,
                                              const MfccConfig& cfg) {
    const std::size_t frame = samples_from_ms(cfg.frame_ms, clip.sample_rate);
    const std::size_t hop = samples_from_ms(cfg.hop_ms, clip.sample_rate);
    const std::size_t seg_len = segment.end_sample - segment.start_sample;
    if (seg_len < frame) throw SegmentTooShort("segment shorter than one frame");

    std::vector<double> source(clip.samples.begin() + static_cast<std::ptrdiff_t>(segment.start_sample),
                               clip.samples.begin() + static_cast<std::ptrdiff_t>(segment.end_sample));
    if (cfg.preemphasis > 0.0) {
        for (std::size_t i = source.size(); i-- > 1;)
            source[i] -= cfg.preemphasis * source[i - 1];
    }

    const std::vector<double> window = hamming_window(frame);
    const std::size_t count = (seg_len - frame) / hop + 1;
    std::vector<std::vector<double>> frames;
    frames.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<double> f(frame);
        const std::size_t begin = t * hop;
        for (std::size_t k = 0; k < frame; ++k) f[k] = source[begin + k] * window[k];
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<double> power_spectrum(const std::vector<double>& windowed_frame) {
    if (windowed_frame.empty()) throw Error("power_spectrum: empty frame");
    const std::size_t n_fft = next_pow2(windowed_frame.size());
    std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
    for (std::size_t i = 0; i < windowed_frame.size(); ++i) buf[i] = windowed_frame[i];
    fft_radix2(buf);

    std::vector<double> power(n_fft / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
    return power;
}

MelFilterbank build_filterbank(const MfccConfig& cfg, std::size_t n_fft,
                               std::uint32_t sample_rate) {
    const std::size_t n_bins = n_fft / 2 + 1;
    if (n_bins < cfg.n_bands)
        throw TooFewBins(std::to_string(n_bins) + " FFT bins cannot carry " +
                         std::to_string(cfg.n_bands) + " mel bands");

    const double nyquist = sample_rate / 2.0;
    const double fmax = cfg.fmax_hz > 0.0 ? cfg.fmax_hz : nyquist;
    if (!(cfg.fmin_hz >= 0.0 && cfg.fmin_hz < fmax && fmax <= nyquist))
        throw Error("filterbank frequency range invalid for this sample rate");

    MelFilterbank bank;
    bank.n_bands = cfg.n_bands;
    bank.n_bins = n_bins;
    bank.edges_hz.resize(cfg.n_bands + 2);
    const double mel_lo = hz_to_mel(cfg.fmin_hz);
    const double mel_hi = hz_to_mel(fmax);
    for (std::size_t e = 0; e < bank.edges_hz.size(); ++e) {
        const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(e) /
                                        static_cast<double>(cfg.n_bands + 1);
        bank.edges_hz[e] = mel_to_hz(mel);
    }

    bank.weights.assign(cfg.n_bands * n_bins, 0.0);
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
    for (std::size_t b = 0; b < cfg.n_bands; ++b) {
        const double left = bank.edges_hz[b];
        const double center = bank.edges_hz[b + 1];
        const double right = bank.edges_hz[b + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f > left && f < center)
                w = (f - left) / (center - left);
            else if (f == center)
                w = 1.0;
            else if (f > center && f < right)
                w = (right - f) / (right - center);
            bank.weights[b * n_bins + k] = w;
        }
    }
    return bank;
}

std::vector<double> log_mel_energies(const std::vector<double>& spectrum,
                                     const MelFilterbank& bank, double log_floor) {
    if (spectrum.size() != bank.n_bins)
        throw Error("spectrum length does not match filterbank bins");
    std::vector<double> energies(bank.n_bands);
    for (std::size_t b = 0; b < bank.n_bands; ++b) {
        double acc = 0.0;
        const double* row = bank.weights.data() + b * bank.n_bins;
        for (std::size_t k = 0; k < bank.n_bins; ++k) acc += row[k] * spectrum[k];
        energies[b] = std::log(std::max(acc, log_floor));
    }
    return energies;
}

std::vector<double> dct_ii(const std::vector<double>& values, std::size_t n_coeffs) {
    const std::size_t n = values.size();
    if (n_coeffs > n) throw Error("dct_ii: more coefficients than inputs");
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double sk = std::sqrt(2.0 / static_cast<double>(n));
    std::vector<double> out(n_coeffs);
    for (std::size_t k = 0; k < n_coeffs; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += values[i] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                        (2.0 * static_cast<double>(i) + 1.0) /
                                        (2.0 * static_cast<double>(n)));
        out[k] = (k == 0 ? s0 : sk) * acc;
    }
    return out;
}

MfccMatrix mfcc(const AudioClip& clip, const VowelSegment& segment,
                const MfccConfig& cfg) {
    const auto frames = frame_signal(clip, segment, cfg);
    const std::size_t n_fft = next_pow2(frames.front().size());
    const MelFilterbank bank = build_filterbank(cfg, n_fft, clip.sample_rate);

    MfccMatrix m;
    m.n_frames = frames.size();
    m.n_coeffs = cfg.n_coeffs;
    m.config = cfg;
    m.sample_rate = clip.sample_rate;
    m.n_fft = n_fft;
    m.data.reserve(m.n_frames * m.n_coeffs);
    for (const auto& frame : frames) {
        const auto spectrum = power_spectrum(frame);
        const auto energies = log_mel_energies(spectrum, bank, cfg.log_floor);
        const auto coeffs = dct_ii(energies, cfg.n_coeffs);
        m.data.insert(m.data.end(), coeffs.begin(), coeffs.end());
    }
    return m;
}

FeatureVector pool_features(const MfccMatrix& matrix, PoolingMode mode) {
    if (matrix.n_frames == 0) throw EmptyMatrix("cannot pool an empty MFCC matrix");
    FeatureVector fv;
    fv.pooling = mode;
    fv.values.assign(matrix.n_coeffs, 0.0);
    for (std::size_t t = 0; t < matrix.n_frames; ++t)
        for (std::size_t c = 0; c < matrix.n_coeffs; ++c)
            fv.values[c] += matrix.at(t, c);
    for (double& v : fv.values) v /= static_cast<double>(matrix.n_frames);
    return fv;
}

}  // namespace vowelrec
