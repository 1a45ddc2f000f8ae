#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vowelrec/audio.hpp"
#include "vowelrec/segment.hpp"

namespace vowelrec {

struct MfccConfig {
    double frame_ms = 20.0;
    double hop_ms = 10.0;
    std::size_t n_bands = 100;
    std::size_t n_coeffs = 50;
    double fmin_hz = 0.0;
    double fmax_hz = 0.0;      // 0 = Nyquist of the clip at use time
    double log_floor = 1e-10;  // guards digital-silence frames
    double preemphasis = 0.0;  // 0 disables; 0.97 when experimenting
};

// Triangular filters spaced uniformly in mel, peak weight 1.
struct MelFilterbank {
    std::size_t n_bands = 0;
    std::size_t n_bins = 0;            // n_fft/2 + 1
    std::vector<double> weights;       // n_bands x n_bins, row-major
    std::vector<double> edges_hz;      // n_bands + 2 edge frequencies

    double weight(std::size_t band, std::size_t bin) const {
        return weights[band * n_bins + bin];
    }
    double center_hz(std::size_t band) const { return edges_hz[band + 1]; }
};

// Per-frame cepstral coefficients: n_frames rows x n_coeffs columns.
struct MfccMatrix {
    std::size_t n_frames = 0;
    std::size_t n_coeffs = 0;
    std::vector<double> data;  // row-major
    MfccConfig config;
    std::uint32_t sample_rate = 0;
    std::size_t n_fft = 0;

    double at(std::size_t frame, std::size_t coeff) const {
        return data[frame * n_coeffs + coeff];
    }
};

enum class PoolingMode { Mean };

// Fixed-length classifier input pooled from a variable-length MfccMatrix.
struct FeatureVector {
    std::vector<double> values;
    PoolingMode pooling = PoolingMode::Mean;
};

// mel = 2595 * log10(1 + f/700) and its exact inverse.
double hz_to_mel(double f_hz);
double mel_to_hz(double mel);

// Slices the segment into Hamming-windowed frames of frame_ms every hop_ms;
// the last partial frame is dropped. Throws SegmentTooShort.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const VowelSegment& segment,
                                              const MfccConfig& cfg);

// Zero-pads to the next power of two and returns |X[k]|^2 for
// k = 0..n_fft/2 under the unnormalized forward DFT.
std::vector<double> power_spectrum(const std::vector<double>& windowed_frame);

// n_bands + 2 edges uniform in mel between fmin and fmax; filter k is the
// triangle over edges (k, k+1, k+2) sampled at FFT bin centers.
MelFilterbank build_filterbank(const MfccConfig& cfg, std::size_t n_fft,
                               std::uint32_t sample_rate);

// e[b] = ln(max(row_b . spectrum, log_floor))
std::vector<double> log_mel_energies(const std::vector<double>& spectrum,
                                     const MelFilterbank& bank, double log_floor);

// Orthonormal DCT-II, first n_coeffs coefficients (c0 included).
std::vector<double> dct_ii(const std::vector<double>& values, std::size_t n_coeffs);

// The five steps composed per frame.
MfccMatrix mfcc(const AudioClip& clip, const VowelSegment& segment,
                const MfccConfig& cfg = {});

FeatureVector pool_features(const MfccMatrix& matrix,
                            PoolingMode mode = PoolingMode::Mean);

}  // namespace vowelrec
