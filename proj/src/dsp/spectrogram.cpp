#include <algorithm>
#include <cmath>
#include <sstream>

#include "crynet/dsp.hpp"
#include "crynet/error.hpp"
#include "crynet/kernels.hpp"
#include "crynet/sha256.hpp"

namespace crynet::dsp {

namespace {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

int SpectrogramConfig::window_samples(int sample_rate) const {
    return int(std::lround(window_ms * sample_rate / 1000.0));
}

int SpectrogramConfig::hop_samples(int sample_rate) const {
    return int(std::lround(hop_ms * sample_rate / 1000.0));
}

int SpectrogramConfig::effective_fft_size(int sample_rate) const {
    int win = window_samples(sample_rate);
    return fft_size > 0 ? fft_size : next_pow2(win);
}

void SpectrogramConfig::validate(int sample_rate) const {
    if (!(hop_ms > 0.0) || hop_ms > window_ms) {
        throw ValidationError("spectrogram config: need 0 < hop_ms <= window_ms");
    }
    int win = window_samples(sample_rate);
    if (win < 2) throw ValidationError("spectrogram config: window shorter than 2 samples");
    int nfft = effective_fft_size(sample_rate);
    if (nfft < win) {
        throw ValidationError("spectrogram config: fft_size " + std::to_string(nfft) +
                              " < window " + std::to_string(win));
    }
    if ((nfft & (nfft - 1)) != 0) {
        throw ValidationError("spectrogram config: fft_size must be a power of two");
    }
    if (out_height < 8 || out_width < 8) {
        throw ValidationError("spectrogram config: output dims must be >= 8");
    }
}

std::string SpectrogramConfig::canonical_string() const {
    std::ostringstream ss;
    ss << "window_ms=" << window_ms << ";hop_ms=" << hop_ms << ";fft_size=" << fft_size
       << ";db_floor=" << db_floor << ";out=" << out_height << "x" << out_width;
    return ss.str();
}

std::string SpectrogramConfig::hash() const {
    return Sha256::hash_hex(canonical_string()).substr(0, 16);
}

std::vector<double> hamming_window(int n) {
    if (n < 2) throw ValidationError("hamming_window: n must be >= 2");
    std::vector<double> w(size_t(n));
    for (int k = 0; k < n; ++k) {
        w[size_t(k)] = 0.54 - 0.46 * std::cos(2.0 * M_PI * k / (n - 1));
    }
    return w;
}

std::vector<std::vector<double>> stft_magnitude(const audio::AudioSignal& signal,
                                                const SpectrogramConfig& config) {
    config.validate(signal.sample_rate);
    const int win = config.window_samples(signal.sample_rate);
    const int hop = config.hop_samples(signal.sample_rate);
    const int nfft = config.effective_fft_size(signal.sample_rate);
    const auto n = ptrdiff_t(signal.samples.size());
    if (n < win) {
        throw ValidationError("stft: signal (" + std::to_string(n) + " samples) shorter than window (" +
                              std::to_string(win) + ")");
    }
    const int n_frames = int((n - win) / hop) + 1;
    const int n_bins = nfft / 2 + 1;
    const std::vector<double> window = hamming_window(win);

    std::vector<std::vector<double>> mag(size_t(n_frames), std::vector<double>(size_t(n_bins)));
    std::vector<std::complex<double>> buf(size_t(nfft));
    for (int t = 0; t < n_frames; ++t) {
        const double* seg = signal.samples.data() + ptrdiff_t(t) * hop;
        for (int k = 0; k < win; ++k) buf[size_t(k)] = seg[k] * window[size_t(k)];
        for (int k = win; k < nfft; ++k) buf[size_t(k)] = 0.0;
        fft(buf);
        for (int b = 0; b < n_bins; ++b) mag[size_t(t)][size_t(b)] = std::abs(buf[size_t(b)]);
    }
    return mag;
}

std::vector<double> resize_bilinear(const std::vector<double>& src, int src_h, int src_w,
                                    int dst_h, int dst_w) {
    if (src_h < 1 || src_w < 1 || dst_h < 1 || dst_w < 1) {
        throw ValidationError("resize_bilinear: degenerate dimensions");
    }
    std::vector<double> dst(size_t(dst_h) * dst_w);
    const double sy = double(src_h) / dst_h;
    const double sx = double(src_w) / dst_w;
    auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
    for (int r = 0; r < dst_h; ++r) {
        double fy = (r + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, double(src_h - 1));
        int y0 = int(fy);
        int y1 = std::min(y0 + 1, src_h - 1);
        double ty = fy - y0;
        for (int col = 0; col < dst_w; ++col) {
            double fx = (col + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, double(src_w - 1));
            int x0 = int(fx);
            int x1 = std::min(x0 + 1, src_w - 1);
            double tx = fx - x0;
            double top = lerp(src[size_t(y0) * src_w + x0], src[size_t(y0) * src_w + x1], tx);
            double bot = lerp(src[size_t(y1) * src_w + x0], src[size_t(y1) * src_w + x1], tx);
            dst[size_t(r) * dst_w + col] = lerp(top, bot, ty);
        }
    }
    return dst;
}

SpectrogramImage render_spectrogram(const audio::AudioSignal& signal,
                                    const SpectrogramConfig& config) {
    auto mag = stft_magnitude(signal, config);
    const int n_frames = int(mag.size());
    const int n_bins = int(mag[0].size());
    constexpr double kEps = 1e-10;

    // dB grid oriented as an image: rows = frequency (flipped, low at bottom),
    // columns = time.
    std::vector<double> db(size_t(n_bins) * n_frames);
    for (int t = 0; t < n_frames; ++t) {
        for (int b = 0; b < n_bins; ++b) {
            double d = 20.0 * std::log10(mag[size_t(t)][size_t(b)] + kEps);
            if (d < config.db_floor) d = config.db_floor;
            db[size_t(n_bins - 1 - b) * n_frames + t] = d;
        }
    }

    auto [lo, hi] = kernels::minmax(db.data(), db.size());
    if (hi > lo) {
        double inv = 1.0 / (hi - lo);
        for (double& d : db) d = (d - lo) * inv;
    } else {
        std::fill(db.begin(), db.end(), 0.0);
    }

    SpectrogramImage img;
    img.height = config.out_height;
    img.width = config.out_width;
    img.pixels = resize_bilinear(db, n_bins, n_frames, config.out_height, config.out_width);
    for (double& p : img.pixels) p = std::clamp(p, 0.0, 1.0);
    img.source_id = signal.source_id;
    img.config_hash = config.hash();
    return img;
}

}  // namespace crynet::dsp
