#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hqnn/tensor.hpp"

namespace hqnn::data {

inline constexpr int kImageSize = 128;

struct ImageSample {
  nn::Tensor pixels;  // (h, w, 3), values in [0, 1]
  int label = 0;      // 0 = normal, 1 = pneumonia
  std::string source_path;
};

struct DatasetSplit {
  std::vector<ImageSample> samples;
  std::string split_name;  // train | val | test
};

struct Dataset {
  DatasetSplit train, val, test;
};

// Decodes PNG/JPEG bytes to an (h, w, 3) tensor with values in [0, 255].
// Single-channel images are replicated to 3 channels.
nn::Tensor decode_image(std::span<const unsigned char> bytes);

// Bilinear resize, half-pixel-center convention (source coordinate =
// (dst + 0.5) * scale - 0.5), edge-clamped. Channel count preserved.
nn::Tensor bilinear_resize(const nn::Tensor& image, int out_h, int out_w);

nn::Tensor decode_and_resize(std::span<const unsigned char> bytes, int size = kImageSize);

// Elementwise division by 255; rejects values outside [0, 255].
nn::Tensor normalize_pixels(const nn::Tensor& t);

// Loads root/<split_name>/{NORMAL|PNEUMONIA}/*.{jpeg,jpg,png} in
// lexicographic file order. With strict = false, undecodable files are
// skipped with a warning on stderr; with strict = true they fail the load.
DatasetSplit load_split(const std::string& root, const std::string& split_name,
                        int image_size = kImageSize, bool strict = false);

// Seeded synthetic two-class dataset: class 0 is a centered bright blob,
// class 1 a horizontal bright band, both with additive noise, clamped to
// [0, 1]. Splits 70/15/15 per class.
Dataset synth_dataset(int n_per_class, int image_size, std::uint64_t seed);

// Writes a split as 8-bit PNGs in the load_split directory layout.
void write_split_png(const std::string& root, const DatasetSplit& split);

}  // namespace hqnn::data
