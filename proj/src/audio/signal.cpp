#include <cmath>

#include "crynet/audio.hpp"
#include "crynet/error.hpp"

namespace crynet::audio {

AudioSignal normalize_peak(const AudioSignal& signal) {
    if (signal.samples.empty()) throw ValidationError("normalize_peak: empty signal");
    double peak = 0.0;
    for (double s : signal.samples) peak = std::max(peak, std::fabs(s));
    if (peak == 0.0) return signal;
    AudioSignal out = signal;
    double inv = 1.0 / peak;
    for (double& s : out.samples) s *= inv;
    return out;
}

AudioSignal resample_linear(const AudioSignal& signal, double factor) {
    if (!(factor > 0.0)) throw ValidationError("resample_linear: factor must be positive");
    const auto& x = signal.samples;
    const size_t n = x.size();
    auto out_len = size_t(std::llround(double(n) / factor));
    if (out_len < 2) {
        throw ValidationError("resample_linear: degenerate output (" + std::to_string(out_len) +
                              " samples)");
    }
    AudioSignal out;
    out.sample_rate = signal.sample_rate;
    out.source_id = signal.source_id;
    out.samples.resize(out_len);
    for (size_t k = 0; k < out_len; ++k) {
        double pos = double(k) * factor;
        if (pos >= double(n - 1)) {
            out.samples[k] = x[n - 1];
            continue;
        }
        auto i = size_t(pos);
        double t = pos - double(i);
        out.samples[k] = x[i] + t * (x[i + 1] - x[i]);
    }
    return out;
}

}  // namespace crynet::audio
