#include <algorithm>
#include <cmath>

#include "crynet/dsp.hpp"
#include "crynet/error.hpp"

namespace crynet::dsp {

namespace {

constexpr double kLogFloor = 1e-10;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

int frame_count(ptrdiff_t n, int win, int hop) { return int((n - win) / hop) + 1; }

// Triangular mel filterbank evaluated at FFT bin centers.
std::vector<std::vector<double>> mel_filterbank(int n_mels, int nfft, int sample_rate) {
    const int n_bins = nfft / 2 + 1;
    const double mel_hi = hz_to_mel(sample_rate / 2.0);
    std::vector<double> centers_hz(size_t(n_mels) + 2);
    for (int i = 0; i < n_mels + 2; ++i) {
        centers_hz[size_t(i)] = mel_to_hz(mel_hi * i / (n_mels + 1));
    }
    std::vector<std::vector<double>> bank(size_t(n_mels), std::vector<double>(size_t(n_bins), 0.0));
    for (int j = 0; j < n_mels; ++j) {
        double lo = centers_hz[size_t(j)];
        double mid = centers_hz[size_t(j) + 1];
        double hi = centers_hz[size_t(j) + 2];
        for (int b = 0; b < n_bins; ++b) {
            double f = double(b) * sample_rate / nfft;
            if (f > lo && f < mid) {
                bank[size_t(j)][size_t(b)] = (f - lo) / (mid - lo);
            } else if (f >= mid && f < hi) {
                bank[size_t(j)][size_t(b)] = (hi - f) / (hi - mid);
            }
        }
    }
    return bank;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

FeatureMatrix mfcc(const audio::AudioSignal& signal, const MfccConfig& config) {
    const int sr = signal.sample_rate;
    const int win = int(std::lround(config.window_ms * sr / 1000.0));
    const int hop = int(std::lround(config.hop_ms * sr / 1000.0));
    if (win < 2 || hop < 1) throw ValidationError("mfcc: window/hop too small");
    const auto n = ptrdiff_t(signal.samples.size());
    if (n < win) throw ValidationError("mfcc: signal shorter than one window");

    const int nfft = next_pow2(win);
    const int n_bins = nfft / 2 + 1;
    const int n_frames = frame_count(n, win, hop);
    const auto window = hamming_window(win);
    const auto bank = mel_filterbank(config.n_mels, nfft, sr);

    FeatureMatrix out;
    out.kind = FeatureKind::Mfcc;
    out.frames = n_frames;
    out.coeffs = config.n_coeffs;
    out.values.resize(size_t(n_frames) * config.n_coeffs);

    // orthonormal DCT-II basis
    const int m = config.n_mels;
    std::vector<double> dct(size_t(config.n_coeffs) * m);
    for (int i = 0; i < config.n_coeffs; ++i) {
        double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / m);
        for (int j = 0; j < m; ++j) {
            dct[size_t(i) * m + j] = scale * std::cos(M_PI * i * (j + 0.5) / m);
        }
    }

    std::vector<std::complex<double>> buf(size_t(nfft));
    std::vector<double> power(size_t(n_bins));
    std::vector<double> log_e(size_t(m));
    for (int t = 0; t < n_frames; ++t) {
        const double* seg = signal.samples.data() + ptrdiff_t(t) * hop;
        for (int k = 0; k < win; ++k) buf[size_t(k)] = seg[k] * window[size_t(k)];
        for (int k = win; k < nfft; ++k) buf[size_t(k)] = 0.0;
        fft(buf);
        for (int b = 0; b < n_bins; ++b) power[size_t(b)] = std::norm(buf[size_t(b)]);
        for (int j = 0; j < m; ++j) {
            double e = 0.0;
            const auto& f = bank[size_t(j)];
            for (int b = 0; b < n_bins; ++b) e += f[size_t(b)] * power[size_t(b)];
            log_e[size_t(j)] = std::log(std::max(e, kLogFloor));
        }
        for (int i = 0; i < config.n_coeffs; ++i) {
            double c = 0.0;
            for (int j = 0; j < m; ++j) c += dct[size_t(i) * m + j] * log_e[size_t(j)];
            out.at(t, i) = c;
        }
    }
    return out;
}

std::vector<double> lpc_coefficients(const std::vector<double>& frame, int order) {
    if (order < 1) throw ValidationError("lpc: order must be >= 1");
    const auto n = ptrdiff_t(frame.size());
    if (n <= order) throw ValidationError("lpc: frame shorter than order + 1");

    std::vector<double> r(size_t(order) + 1, 0.0);
    for (int lag = 0; lag <= order; ++lag) {
        double acc = 0.0;
        for (ptrdiff_t i = lag; i < n; ++i) acc += frame[size_t(i)] * frame[size_t(i) - lag];
        r[size_t(lag)] = acc;
    }
    std::vector<double> a(size_t(order) + 1, 0.0);  // a[1..order]
    if (r[0] < 1e-12) return a;

    double err = r[0];
    for (int i = 1; i <= order; ++i) {
        double acc = r[size_t(i)];
        for (int j = 1; j < i; ++j) acc -= a[size_t(j)] * r[size_t(i - j)];
        double k = acc / err;
        std::vector<double> prev(a.begin(), a.begin() + i);
        a[size_t(i)] = k;
        for (int j = 1; j < i; ++j) a[size_t(j)] = prev[size_t(j)] - k * prev[size_t(i - j)];
        err *= (1.0 - k * k);
        if (err <= 0.0) break;  // numerically singular; keep what we have
    }
    return a;
}

std::vector<double> lpc_to_cepstrum(const std::vector<double>& lpc, int n_coeffs) {
    // lpc is indexed a[0]=unused, a[1..order]
    const int order = int(lpc.size()) - 1;
    std::vector<double> c(size_t(n_coeffs) + 1, 0.0);
    for (int n = 1; n <= n_coeffs; ++n) {
        double an = n <= order ? lpc[size_t(n)] : 0.0;
        double acc = an;
        for (int k = 1; k < n; ++k) {
            double ank = (n - k) <= order ? lpc[size_t(n - k)] : 0.0;
            acc += (double(k) / n) * c[size_t(k)] * ank;
        }
        c[size_t(n)] = acc;
    }
    return {c.begin() + 1, c.end()};
}

FeatureMatrix lpcc(const audio::AudioSignal& signal, const LpccConfig& config) {
    const int sr = signal.sample_rate;
    const int win = int(std::lround(config.window_ms * sr / 1000.0));
    const int hop = win - int(std::lround(config.overlap_ms * sr / 1000.0));
    if (win < 2 || hop < 1) throw ValidationError("lpcc: window/overlap leave no hop");
    const auto n = ptrdiff_t(signal.samples.size());
    if (n < win) throw ValidationError("lpcc: signal shorter than one window");

    const int n_frames = frame_count(n, win, hop);
    const auto window = hamming_window(win);

    FeatureMatrix out;
    out.kind = FeatureKind::Lpcc;
    out.frames = n_frames;
    out.coeffs = config.n_coeffs;
    out.values.resize(size_t(n_frames) * config.n_coeffs);

    std::vector<double> frame(size_t(win));
    for (int t = 0; t < n_frames; ++t) {
        const double* seg = signal.samples.data() + ptrdiff_t(t) * hop;
        double energy = 0.0;
        for (int k = 0; k < win; ++k) {
            frame[size_t(k)] = seg[k] * window[size_t(k)];
            energy += frame[size_t(k)] * frame[size_t(k)];
        }
        if (energy < 1e-12) {
            for (int i = 0; i < config.n_coeffs; ++i) out.at(t, i) = 0.0;
            continue;
        }
        auto a = lpc_coefficients(frame, config.lpc_order);
        auto c = lpc_to_cepstrum(a, config.n_coeffs);
        for (int i = 0; i < config.n_coeffs; ++i) out.at(t, i) = c[size_t(i)];
    }
    return out;
}

}  // namespace crynet::dsp
