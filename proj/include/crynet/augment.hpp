#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crynet/audio.hpp"

namespace crynet::aug {

// 3 frequency scalings, 6 noise levels, and (optionally) their 18
// combinations: 27 variants per event.
struct AugmentationSpec {
    std::array<double, 3> freq_factors = {0.5, 1.0 / 3.0, 2.0 / 3.0};
    std::array<double, 6> noise_levels = {0.01, 0.05, 0.001, 0.005, 0.003, 0.03};
    bool include_combinations = true;
    uint64_t seed = 0;

    int variant_count() const { return include_combinations ? 27 : 9; }
};

struct Variant {
    audio::AudioSignal signal;
    std::string tag;  // e.g. "f1_2", "n0.01", "f1_2+n0.01"
};

// Shift all spectral content by `factor` via linear resampling, then peak
// normalize. Duration scales by 1/factor.
audio::AudioSignal scale_frequency(const audio::AudioSignal& signal, double factor);

// Additive zero-mean Gaussian noise with sigma = level, clamped to [-1, 1].
// Deterministic for a given rng seed.
audio::AudioSignal add_noise(const audio::AudioSignal& signal, double level, uint64_t rng_seed);

// All variants in deterministic order: frequency-only (factors in listed
// order), then noise-only (levels in listed order), then factor-major
// combinations. Each variant's source_id is parent id + "__" + tag and its
// noise stream is derived from (spec.seed, parent id, variant index).
std::vector<Variant> expand(const audio::AudioSignal& signal, const AugmentationSpec& spec);

// Seed for the noise stream of variant `index` of event `event_id`.
uint64_t variant_seed(const AugmentationSpec& spec, const std::string& event_id, int index);

// Human-readable tags used in manifests and file names.
std::string freq_tag(double factor);
std::string noise_tag(double level);

}  // namespace crynet::aug
