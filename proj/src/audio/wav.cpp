#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "crynet/audio.hpp"
#include "crynet/error.hpp"

namespace crynet::audio {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

struct Cursor {
    const uint8_t* p;
    size_t n;
    size_t off = 0;

    void need(size_t k, const char* what) const {
        if (off + k > n) throw ParseError(std::string("truncated WAV while reading ") + what);
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = uint32_t(p[off]) | uint32_t(p[off + 1]) << 8 | uint32_t(p[off + 2]) << 16 |
                     uint32_t(p[off + 3]) << 24;
        off += 4;
        return v;
    }
    uint16_t u16(const char* what) {
        need(2, what);
        uint16_t v = uint16_t(p[off]) | uint16_t(p[off + 1]) << 8;
        off += 2;
        return v;
    }
    std::string tag() {
        need(4, "chunk id");
        std::string s(reinterpret_cast<const char*>(p + off), 4);
        off += 4;
        return s;
    }
    void skip(size_t k, const char* what) {
        need(k, what);
        off += k;
    }
};

double decode_sample(const uint8_t* p, uint16_t bits, uint16_t format) {
    if (format == kFormatFloat) {
        float f;
        std::memcpy(&f, p, 4);
        return double(f);
    }
    switch (bits) {
        case 8:
            // 8-bit PCM is unsigned with midpoint 128
            return (double(p[0]) - 128.0) / 128.0;
        case 16: {
            auto s = int16_t(uint16_t(p[0]) | uint16_t(p[1]) << 8);
            return double(s) / 32768.0;
        }
        case 24: {
            int32_t s = int32_t(uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16);
            if (s & 0x800000) s |= ~0xFFFFFF;
            return double(s) / 8388608.0;
        }
        default:
            throw UnsupportedFormatError("unsupported PCM bit depth: " + std::to_string(bits));
    }
}

}  // namespace

AudioSignal parse_wav(const std::vector<uint8_t>& bytes, const std::string& source_id) {
    Cursor cur{bytes.data(), bytes.size()};
    if (cur.tag() != "RIFF") throw ParseError("not a RIFF file (missing RIFF chunk)");
    cur.u32("RIFF size");
    if (cur.tag() != "WAVE") throw ParseError("RIFF form is not WAVE");

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    std::vector<double> mono;

    while (cur.off + 8 <= cur.n) {
        std::string id = cur.tag();
        uint32_t size = cur.u32("chunk size");
        if (id == "fmt ") {
            if (size < 16) throw ParseError("fmt chunk too small");
            size_t start = cur.off;
            format = cur.u16("fmt format");
            channels = cur.u16("fmt channels");
            sample_rate = cur.u32("fmt sample rate");
            cur.u32("fmt byte rate");
            cur.u16("fmt block align");
            bits = cur.u16("fmt bits");
            cur.skip(size - (cur.off - start), "fmt extension");
            if (format != kFormatPcm && format != kFormatFloat) {
                throw UnsupportedFormatError("unsupported WAV codec (format tag " +
                                             std::to_string(format) + ")");
            }
            if (format == kFormatFloat && bits != 32) {
                throw UnsupportedFormatError("float WAV must be 32-bit, got " +
                                             std::to_string(bits));
            }
            if (channels == 0) throw ParseError("fmt chunk declares zero channels");
            if (sample_rate == 0) throw ParseError("fmt chunk declares zero sample rate");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw ParseError("data chunk before fmt chunk");
            cur.need(size, "data chunk");
            size_t bytes_per = bits / 8;
            size_t frame_bytes = bytes_per * channels;
            if (frame_bytes == 0 || size % frame_bytes != 0) {
                throw ParseError("data chunk size not a whole number of frames");
            }
            size_t frames = size / frame_bytes;
            mono.resize(frames);
            const uint8_t* dp = cur.p + cur.off;
            for (size_t f = 0; f < frames; ++f) {
                double acc = 0.0;
                for (uint16_t ch = 0; ch < channels; ++ch) {
                    acc += decode_sample(dp + f * frame_bytes + ch * bytes_per, bits, format);
                }
                mono[f] = acc / channels;
            }
            cur.skip(size, "data payload");
        } else {
            cur.skip(size, ("chunk '" + id + "'").c_str());
        }
        if (size % 2 == 1 && cur.off < cur.n) cur.skip(1, "chunk padding");
    }

    if (!have_fmt) throw ParseError("missing fmt chunk");
    if (mono.empty()) throw ParseError("missing or empty data chunk");

    AudioSignal out;
    out.samples = std::move(mono);
    out.sample_rate = int(sample_rate);
    out.source_id = source_id;
    for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);
    return out;
}

AudioSignal read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open WAV file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    try {
        return parse_wav(bytes, std::filesystem::path(path).stem().string());
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<uint8_t> encode_wav(const AudioSignal& signal) {
    const uint32_t n = uint32_t(signal.samples.size());
    const uint32_t data_size = n * 2;
    std::vector<uint8_t> out;
    out.reserve(44 + data_size);

    auto put_u32 = [&](uint32_t v) {
        out.push_back(uint8_t(v));
        out.push_back(uint8_t(v >> 8));
        out.push_back(uint8_t(v >> 16));
        out.push_back(uint8_t(v >> 24));
    };
    auto put_u16 = [&](uint16_t v) {
        out.push_back(uint8_t(v));
        out.push_back(uint8_t(v >> 8));
    };
    auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };

    put_tag("RIFF");
    put_u32(36 + data_size);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(kFormatPcm);
    put_u16(1);  // mono
    put_u32(uint32_t(signal.sample_rate));
    put_u32(uint32_t(signal.sample_rate) * 2);
    put_u16(2);
    put_u16(16);
    put_tag("data");
    put_u32(data_size);
    for (double s : signal.samples) {
        double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
        auto q = int32_t(std::clamp(scaled, -32768.0, 32767.0));
        put_u16(uint16_t(int16_t(q)));
    }
    return out;
}

void write_wav(const std::string& path, const AudioSignal& signal) {
    if (signal.samples.empty()) throw ValidationError("refusing to write empty signal: " + path);
    if (signal.sample_rate <= 0) throw ValidationError("invalid sample rate for " + path);
    std::vector<uint8_t> bytes = encode_wav(signal);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    out.flush();
    if (!out) {
        out.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw IoError("write failed: " + path);
    }
}

}  // namespace crynet::audio
