// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

#include "sardet/rng.hpp"
#include "sardet/tensor.hpp"

namespace sardet::test {

/// Temporary directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("sardet_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline Tensor4 random_tensor(int n, int c, int h, int w, Rng& rng, double scale = 1.0) {
  Tensor4 t(n, c, h, w);
  for (auto& v : t.data) v = static_cast<float>(rng.gaussian() * scale);
  return t;
}

inline double max_abs_diff(const Tensor4& a, const Tensor4& b) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
  return m;
}

inline double max_abs(const Tensor4& a) {
  double m = 0.0;
  for (float v : a.data) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

}  // namespace sardet::test
