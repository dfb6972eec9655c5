#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crynet/error.hpp"
#include "crynet/image_io.hpp"

#include "json.hpp"

namespace crynet::imageio {

namespace {

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v >> 24));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& data) {
    put_u32_be(out, uint32_t(data.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start));
    put_u32_be(out, uint32_t(crc));
}

void write_file(const std::string& path, const void* data, size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(static_cast<const char*>(data), std::streamsize(n));
    out.flush();
    if (!out) {
        out.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw IoError("write failed: " + path);
    }
}

}  // namespace

void write_png_gray8(const std::string& path, const dsp::SpectrogramImage& image) {
    const int h = image.height, w = image.width;
    if (h < 1 || w < 1) throw ValidationError("write_png_gray8: empty image");

    // filter byte 0 per scanline
    std::vector<uint8_t> raw(size_t(h) * (size_t(w) + 1));
    for (int r = 0; r < h; ++r) {
        uint8_t* row = raw.data() + size_t(r) * (size_t(w) + 1);
        row[0] = 0;
        for (int c = 0; c < w; ++c) {
            double v = std::clamp(image.at(r, c), 0.0, 1.0);
            row[1 + c] = uint8_t(std::lround(v * 255.0));
        }
    }
    uLongf comp_len = compressBound(uLong(raw.size()));
    std::vector<uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 6) != Z_OK) {
        throw IoError("png: zlib compression failed for " + path);
    }
    comp.resize(comp_len);

    std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, uint32_t(w));
    put_u32_be(ihdr, uint32_t(h));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", comp);
    put_chunk(png, "IEND", {});
    write_file(path, png.data(), png.size());
}

void write_raw_f32(const std::string& path, const dsp::SpectrogramImage& image) {
    nlohmann::json hdr = {
        {"height", image.height}, {"width", image.width}, {"config_hash", image.config_hash}};
    std::string line = hdr.dump() + "\n";
    std::vector<uint8_t> out(line.begin(), line.end());
    out.reserve(out.size() + image.pixels.size() * 4);
    for (double p : image.pixels) {
        float f = float(p);
        uint8_t b[4];
        std::memcpy(b, &f, 4);
        out.insert(out.end(), b, b + 4);
    }
    write_file(path, out.data(), out.size());
}

dsp::SpectrogramImage read_raw_f32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": missing JSON header line");
    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": bad JSON header: " + e.what());
    }
    dsp::SpectrogramImage img;
    img.height = hdr.at("height").get<int>();
    img.width = hdr.at("width").get<int>();
    img.config_hash = hdr.value("config_hash", "");
    if (img.height < 1 || img.width < 1) throw ParseError(path + ": bad dimensions in header");
    size_t n = size_t(img.height) * img.width;
    img.pixels.resize(n);
    std::vector<char> buf(n * 4);
    in.read(buf.data(), std::streamsize(buf.size()));
    if (size_t(in.gcount()) != buf.size()) throw ParseError(path + ": truncated pixel payload");
    for (size_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, buf.data() + i * 4, 4);
        img.pixels[i] = double(f);
    }
    return img;
}

void write_feature_csv(const std::string& path, const dsp::FeatureMatrix& features) {
    std::ostringstream ss;
    ss.precision(12);
    for (int c = 0; c < features.coeffs; ++c) ss << (c ? "," : "") << "c" << c;
    ss << "\n";
    for (int f = 0; f < features.frames; ++f) {
        for (int c = 0; c < features.coeffs; ++c) {
            if (c) ss << ",";
            ss << features.at(f, c);
        }
        ss << "\n";
    }
    std::string s = ss.str();
    write_file(path, s.data(), s.size());
}

}  // namespace crynet::imageio
