#include "hqnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace hqnn::data {

namespace fs = std::filesystem;
using nn::Tensor;

Tensor decode_image(std::span<const unsigned char> bytes) {
  if (bytes.empty()) throw std::invalid_argument("data: empty image buffer");
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<unsigned char*>(bytes.data()));
  cv::Mat img = cv::imdecode(raw, cv::IMREAD_COLOR);  // replicates grayscale to 3ch
  if (img.empty()) throw std::invalid_argument("data: undecodable image bytes");
  cv::cvtColor(img, img, cv::COLOR_BGR2RGB);
  Tensor t({static_cast<std::size_t>(img.rows), static_cast<std::size_t>(img.cols), 3});
  for (int y = 0; y < img.rows; ++y) {
    const cv::Vec3b* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        t.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x),
             static_cast<std::size_t>(c)) = static_cast<double>(row[x][c]);
      }
    }
  }
  return t;
}

Tensor bilinear_resize(const Tensor& image, int out_h, int out_w) {
  if (image.shape.size() != 3) throw std::invalid_argument("data: resize input must be HWC");
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("data: bad resize target");
  const std::size_t in_h = image.shape[0];
  const std::size_t in_w = image.shape[1];
  const std::size_t ch = image.shape[2];
  const double scale_y = static_cast<double>(in_h) / out_h;
  const double scale_x = static_cast<double>(in_w) / out_w;

  Tensor out({static_cast<std::size_t>(out_h), static_cast<std::size_t>(out_w), ch});
  const auto clamp_idx = [](long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
  };
  for (int oy = 0; oy < out_h; ++oy) {
    const double sy = (oy + 0.5) * scale_y - 0.5;
    const long y0 = static_cast<long>(std::floor(sy));
    const double fy = sy - y0;
    const std::size_t ya = clamp_idx(y0, in_h);
    const std::size_t yb = clamp_idx(y0 + 1, in_h);
    for (int ox = 0; ox < out_w; ++ox) {
      const double sx = (ox + 0.5) * scale_x - 0.5;
      const long x0 = static_cast<long>(std::floor(sx));
      const double fx = sx - x0;
      const std::size_t xa = clamp_idx(x0, in_w);
      const std::size_t xb = clamp_idx(x0 + 1, in_w);
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = (1.0 - fx) * image.at(ya, xa, c) + fx * image.at(ya, xb, c);
        const double bot = (1.0 - fx) * image.at(yb, xa, c) + fx * image.at(yb, xb, c);
        out.at(static_cast<std::size_t>(oy), static_cast<std::size_t>(ox), c) =
            (1.0 - fy) * top + fy * bot;
      }
    }
  }
  return out;
}

Tensor decode_and_resize(std::span<const unsigned char> bytes, int size) {
  return bilinear_resize(decode_image(bytes), size, size);
}

Tensor normalize_pixels(const Tensor& t) {
  Tensor out = t;
  for (double& v : out.data) {
    if (v < 0.0 || v > 255.0) {
      throw std::invalid_argument("data: pixel value outside [0, 255]");
    }
    v /= 255.0;
  }
  return out;
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpeg" || ext == ".jpg" || ext == ".png";
}

std::vector<unsigned char> read_file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("data: cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

DatasetSplit load_split(const std::string& root, const std::string& split_name, int image_size,
                        bool strict) {
  const fs::path split_dir = fs::path(root) / split_name;
  if (!fs::is_directory(split_dir)) {
    throw std::runtime_error("data: missing split directory " + split_dir.string());
  }
  struct Entry {
    std::string path;
    int label;
  };
  std::vector<Entry> entries;
  for (const auto& [class_dir, label] :
       {std::pair<const char*, int>{"NORMAL", 0}, {"PNEUMONIA", 1}}) {
    const fs::path dir = split_dir / class_dir;
    if (!fs::is_directory(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && has_image_extension(e.path())) {
        entries.push_back({e.path().string(), label});
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.path < b.path; });

  DatasetSplit split;
  split.split_name = split_name;
  for (const Entry& e : entries) {
    try {
      const std::vector<unsigned char> bytes = read_file_bytes(e.path);
      ImageSample s;
      s.pixels = normalize_pixels(decode_and_resize(bytes, image_size));
      s.label = e.label;
      s.source_path = e.path;
      split.samples.push_back(std::move(s));
    } catch (const std::exception& ex) {
      if (strict) throw;
      std::cerr << "warning: skipping " << e.path << ": " << ex.what() << "\n";
    }
  }
  if (split.samples.empty()) {
    throw std::runtime_error("data: no decodable images under " + split_dir.string());
  }
  return split;
}

Dataset synth_dataset(int n_per_class, int image_size, std::uint64_t seed) {
  if (n_per_class < 4) throw std::invalid_argument("data: n_per_class too small to split");
  if (image_size < 4) throw std::invalid_argument("data: image_size too small");
  const int n_val = std::max(1, n_per_class * 15 / 100);
  const int n_test = std::max(1, n_per_class * 15 / 100);
  const int n_train = n_per_class - n_val - n_test;
  if (n_train < 1) throw std::invalid_argument("data: n_per_class too small to split");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.15);

  const double cx = (image_size - 1) / 2.0;
  const double sigma = image_size / 6.0;
  const double band_half = image_size / 8.0;

  Dataset ds;
  ds.train.split_name = "train";
  ds.val.split_name = "val";
  ds.test.split_name = "test";

  for (int label = 0; label <= 1; ++label) {
    for (int i = 0; i < n_per_class; ++i) {
      ImageSample s;
      s.label = label;
      s.source_path = "synth/class" + std::to_string(label) + "/img" + std::to_string(i);
      s.pixels = Tensor({static_cast<std::size_t>(image_size),
                         static_cast<std::size_t>(image_size), 3});
      for (int y = 0; y < image_size; ++y) {
        for (int x = 0; x < image_size; ++x) {
          double base;
          if (label == 0) {
            const double r2 = (x - cx) * (x - cx) + (y - cx) * (y - cx);
            base = 0.85 * std::exp(-r2 / (2.0 * sigma * sigma));
          } else {
            base = std::abs(y - cx) < band_half ? 0.85 : 0.0;
          }
          const double v = std::clamp(base + noise(rng), 0.0, 1.0);
          for (int c = 0; c < 3; ++c) {
            s.pixels.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x),
                        static_cast<std::size_t>(c)) = v;
          }
        }
      }
      DatasetSplit& dst = (i < n_train) ? ds.train : (i < n_train + n_val) ? ds.val : ds.test;
      dst.samples.push_back(std::move(s));
    }
  }
  return ds;
}

void write_split_png(const std::string& root, const DatasetSplit& split) {
  const char* class_dirs[2] = {"NORMAL", "PNEUMONIA"};
  int counters[2] = {0, 0};
  for (int label = 0; label <= 1; ++label) {
    fs::create_directories(fs::path(root) / split.split_name / class_dirs[label]);
  }
  for (const ImageSample& s : split.samples) {
    const std::size_t h = s.pixels.shape[0];
    const std::size_t w = s.pixels.shape[1];
    cv::Mat img(static_cast<int>(h), static_cast<int>(w), CV_8UC3);
    for (std::size_t y = 0; y < h; ++y) {
      cv::Vec3b* row = img.ptr<cv::Vec3b>(static_cast<int>(y));
      for (std::size_t x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double v = s.pixels.at(y, x, static_cast<std::size_t>(c));
          // BGR on disk via OpenCV; tensor channels are RGB
          row[x][2 - c] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "img_%05d.png", counters[s.label]++);
    const fs::path out = fs::path(root) / split.split_name / class_dirs[s.label] / name;
    if (!cv::imwrite(out.string(), img)) {
      throw std::runtime_error("data: failed to write " + out.string());
    }
  }
}

}  // namespace hqnn::data
