#pragma once

#include <complex>
#include <string>
#include <vector>

#include "crynet/audio.hpp"

namespace crynet::dsp {

struct SpectrogramConfig {
    double window_ms = 30.0;
    double hop_ms = 10.0;
    int fft_size = 0;          // 0 = next power of two >= window samples
    double db_floor = -80.0;
    int out_height = 120;
    int out_width = 120;

    int window_samples(int sample_rate) const;
    int hop_samples(int sample_rate) const;
    int effective_fft_size(int sample_rate) const;
    void validate(int sample_rate) const;
    std::string canonical_string() const;
    std::string hash() const;  // sha256 of canonical_string, first 16 hex chars
};

// out_height x out_width grid of intensities in [0, 1]. Row 0 is the highest
// frequency; time runs left to right.
struct SpectrogramImage {
    int height = 0, width = 0;
    std::vector<double> pixels;  // row-major
    std::string source_id;
    std::string config_hash;

    double at(int r, int c) const { return pixels[size_t(r) * width + c]; }
};

enum class FeatureKind { Mfcc, Lpcc };

struct FeatureMatrix {
    int frames = 0, coeffs = 0;
    std::vector<double> values;  // row-major, frames x coeffs
    FeatureKind kind = FeatureKind::Mfcc;

    double at(int f, int c) const { return values[size_t(f) * coeffs + c]; }
    double& at(int f, int c) { return values[size_t(f) * coeffs + c]; }
};

// w[k] = 0.54 - 0.46 cos(2 pi k / (n-1)); n >= 2.
std::vector<double> hamming_window(int n);

// In-place radix-2 complex FFT; n must be a power of two.
void fft(std::vector<std::complex<double>>& a);

// frames x (fft/2 + 1) magnitudes of the windowed, zero-padded DFT.
// Frame t covers samples [t*hop, t*hop + win).
std::vector<std::vector<double>> stft_magnitude(const audio::AudioSignal& signal,
                                                const SpectrogramConfig& config);

// STFT -> dB (20 log10(m + 1e-10), floored) -> affine [0,1] -> flip so low
// frequencies sit at the bottom -> bilinear resize to the configured size.
SpectrogramImage render_spectrogram(const audio::AudioSignal& signal,
                                    const SpectrogramConfig& config);

struct MfccConfig {
    int n_coeffs = 13;
    int n_mels = 26;
    double window_ms = 30.0;
    double hop_ms = 10.0;
};

struct LpccConfig {
    int lpc_order = 12;
    int n_coeffs = 12;
    double window_ms = 32.0;
    double overlap_ms = 16.0;
};

FeatureMatrix mfcc(const audio::AudioSignal& signal, const MfccConfig& config = {});
FeatureMatrix lpcc(const audio::AudioSignal& signal, const LpccConfig& config = {});

// Autocorrelation-method LPC via Levinson-Durbin: returns a[1..order] in the
// x[n] ~ sum_k a[k] x[n-k] convention. Zero-energy input yields zeros.
std::vector<double> lpc_coefficients(const std::vector<double>& frame, int order);

// c[n] = a[n] + sum_{k=1}^{n-1} (k/n) c[k] a[n-k], a padded with zeros past order.
std::vector<double> lpc_to_cepstrum(const std::vector<double>& lpc, int n_coeffs);

// mel(f) = 2595 log10(1 + f/700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Constant-preserving bilinear resize (lerp form), half-pixel centers.
std::vector<double> resize_bilinear(const std::vector<double>& src, int src_h, int src_w,
                                    int dst_h, int dst_w);

}  // namespace crynet::dsp
