#pragma once

#include <string>

#include "crynet/dsp.hpp"

namespace crynet::imageio {

// 8-bit grayscale PNG; intensities clamped to [0,1] and quantized to 0..255.
void write_png_gray8(const std::string& path, const dsp::SpectrogramImage& image);

// One-line JSON header {"height":H,"width":W,"config_hash":"..."} followed by
// H*W little-endian float32 values, row-major.
void write_raw_f32(const std::string& path, const dsp::SpectrogramImage& image);
dsp::SpectrogramImage read_raw_f32(const std::string& path);

// frames x coeffs CSV with a c0..cN header row.
void write_feature_csv(const std::string& path, const dsp::FeatureMatrix& features);

}  // namespace crynet::imageio
