#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crynet::audio {

// Mono sample sequence in [-1, 1] plus its sample rate.
struct AudioSignal {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string source_id;

    double duration_s() const {
        return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
    }
};

// RIFF/WAVE reader. PCM 8/16/24-bit and 32-bit float, mono or multichannel
// (channels are averaged). Integer samples are scaled by the type's max
// magnitude so full-scale negative maps exactly to -1.
AudioSignal read_wav(const std::string& path);

// Parse from an in-memory RIFF buffer (same rules as read_wav).
AudioSignal parse_wav(const std::vector<uint8_t>& bytes, const std::string& source_id);

// 16-bit PCM mono. Fails without leaving a partial file behind.
void write_wav(const std::string& path, const AudioSignal& signal);

// Serialize to 16-bit PCM mono RIFF bytes.
std::vector<uint8_t> encode_wav(const AudioSignal& signal);

// Scale so max |sample| == 1; all-zero input is returned unchanged.
AudioSignal normalize_peak(const AudioSignal& signal);

// Linear-interpolation resampling. Output length = round(n / factor), sample k
// reads position k*factor; sample_rate is kept, so spectral content scales by
// factor. factor == 1 is a bitwise identity.
AudioSignal resample_linear(const AudioSignal& signal, double factor);

}  // namespace crynet::audio
