#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "canopy/raster.hpp"
#include "canopy/texture.hpp"

namespace canopy::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("canopy_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline Image random_image(std::size_t w, std::size_t h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image img(w, h);
  for (auto& v : img.values) v = u(rng);
  return img;
}

inline LevelImage random_levels(std::size_t w, std::size_t h, std::mt19937_64& rng, int max_level = kGlcmLevels) {
  std::uniform_int_distribution<int> u(1, max_level);
  LevelImage img{w, h, std::vector<int>(w * h)};
  for (auto& v : img.levels) v = u(rng);
  return img;
}

}  // namespace canopy::test
