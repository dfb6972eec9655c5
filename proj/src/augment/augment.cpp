#include <algorithm>
#include <cmath>
#include <sstream>

#include "crynet/augment.hpp"
#include "crynet/error.hpp"
#include "crynet/rng.hpp"

namespace crynet::aug {

audio::AudioSignal scale_frequency(const audio::AudioSignal& signal, double factor) {
    if (!(factor > 0.0) || factor > 4.0) {
        throw ValidationError("scale_frequency: factor must be in (0, 4], got " +
                              std::to_string(factor));
    }
    return audio::normalize_peak(audio::resample_linear(signal, factor));
}

audio::AudioSignal add_noise(const audio::AudioSignal& signal, double level, uint64_t rng_seed) {
    if (!(level > 0.0)) throw ValidationError("add_noise: level must be positive");
    Rng rng(rng_seed);
    audio::AudioSignal out = signal;
    for (double& s : out.samples) {
        s = std::clamp(s + level * rng.gaussian(), -1.0, 1.0);
    }
    return out;
}

std::string freq_tag(double factor) {
    // the three canonical factors get rational names; anything else, decimal
    if (factor == 0.5) return "f1_2";
    if (factor == 1.0 / 3.0) return "f1_3";
    if (factor == 2.0 / 3.0) return "f2_3";
    std::ostringstream ss;
    ss << "f" << factor;
    return ss.str();
}

std::string noise_tag(double level) {
    std::ostringstream ss;
    ss << "n" << level;
    return ss.str();
}

uint64_t variant_seed(const AugmentationSpec& spec, const std::string& event_id, int index) {
    return Rng::derive(spec.seed, event_id, uint64_t(index));
}

std::vector<Variant> expand(const audio::AudioSignal& signal, const AugmentationSpec& spec) {
    if (signal.samples.empty()) throw ValidationError("expand: empty signal");
    const std::string& parent = signal.source_id;
    std::vector<Variant> out;
    out.reserve(size_t(spec.variant_count()));

    auto push = [&](audio::AudioSignal s, const std::string& tag) {
        s.source_id = parent + "__" + tag;
        out.push_back({std::move(s), tag});
    };

    int index = 0;
    for (double f : spec.freq_factors) {
        push(scale_frequency(signal, f), freq_tag(f));
        ++index;
    }
    audio::AudioSignal normalized = audio::normalize_peak(signal);
    for (double lvl : spec.noise_levels) {
        push(add_noise(normalized, lvl, variant_seed(spec, parent, index)), noise_tag(lvl));
        ++index;
    }
    if (spec.include_combinations) {
        for (double f : spec.freq_factors) {
            audio::AudioSignal scaled = scale_frequency(signal, f);
            for (double lvl : spec.noise_levels) {
                push(add_noise(scaled, lvl, variant_seed(spec, parent, index)),
                     freq_tag(f) + "+" + noise_tag(lvl));
                ++index;
            }
        }
    }
    return out;
}

}  // namespace crynet::aug
