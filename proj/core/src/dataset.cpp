// SPDX-License-Identifier: Apache-2.0
#include "sardet/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sardet/binio.hpp"

namespace fs = std::filesystem;

namespace sardet {

namespace {
constexpr char kMagic[4] = {'S', 'A', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string crop_filename(const LabeledCrop& crop) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "s%04d_y%05d_x%05d.sarc", crop.scene_id, crop.origin_row,
                crop.origin_col);
  return buf;
}

void write_crop_file(const LabeledCrop& crop, int n_classes, const std::string& path) {
  BinaryWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(crop.image.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(crop.image.width));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(crop.image.domain));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(n_classes));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(crop.labels.size()));
  for (const auto& label : crop.labels) {
    w.put<float>(label.x);
    w.put<float>(label.y);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(label.cls));
    w.put<std::uint8_t>(0);
    w.put<std::uint8_t>(0);
    w.put<std::uint8_t>(0);
  }
  w.put_bytes(crop.image.data.data(), crop.image.data.size() * sizeof(std::complex<float>));
  w.write_file(path);
}

LabeledCrop read_crop_file(const std::string& path, int* n_classes_out) {
  BinaryReader r = BinaryReader::from_file(path);
  r.expect_magic(kMagic);
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  auto height = r.get<std::uint32_t>();
  auto width = r.get<std::uint32_t>();
  if (height == 0 || width == 0 || height > 1u << 20 || width > 1u << 20)
    r.fail("implausible dimensions " + std::to_string(height) + "x" + std::to_string(width));
  auto domain = r.get<std::uint8_t>();
  if (domain > 3) r.fail("unknown domain tag " + std::to_string(domain));
  auto n_classes = r.get<std::uint8_t>();
  auto n_labels = r.get<std::uint16_t>();

  LabeledCrop crop;
  crop.image = ComplexImage(static_cast<int>(height), static_cast<int>(width),
                            static_cast<Domain>(domain));
  for (int i = 0; i < n_labels; ++i) {
    SceneLabel label;
    label.x = r.get<float>();
    label.y = r.get<float>();
    auto cls = r.get<std::uint8_t>();
    if (cls > 1) r.fail("unknown class " + std::to_string(cls));
    label.cls = static_cast<TargetClass>(cls);
    r.get<std::uint8_t>();
    r.get<std::uint8_t>();
    r.get<std::uint8_t>();
    crop.labels.push_back(label);
  }
  const size_t sample_bytes = crop.image.data.size() * sizeof(std::complex<float>);
  if (r.remaining() != sample_bytes)
    r.fail("sample payload is " + std::to_string(r.remaining()) + " bytes, expected " +
           std::to_string(sample_bytes));
  r.get_bytes(crop.image.data.data(), sample_bytes);

  // Recover scene id / origin from the canonical file name if present.
  std::string stem = fs::path(path).stem().string();
  int sid = 0, oy = 0, ox = 0;
  if (std::sscanf(stem.c_str(), "s%d_y%d_x%d", &sid, &oy, &ox) == 3) {
    crop.scene_id = sid;
    crop.origin_row = oy;
    crop.origin_col = ox;
  }
  if (n_classes_out) *n_classes_out = n_classes;
  return crop;
}

void write_dataset(const std::vector<LabeledCrop>& crops, int n_classes, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.txt", std::ios::trunc);
  if (!manifest) throw format_error("cannot write manifest in " + dir, 0);
  for (const auto& crop : crops) {
    std::string name = crop_filename(crop);
    write_crop_file(crop, n_classes, (fs::path(dir) / name).string());
    manifest << name << "\n";
  }
}

Dataset read_dataset(const std::string& dir) {
  Dataset ds;
  std::vector<std::string> names;
  fs::path manifest_path = fs::path(dir) / "manifest.txt";
  if (fs::exists(manifest_path)) {
    std::ifstream manifest(manifest_path);
    std::string line;
    while (std::getline(manifest, line)) {
      line.erase(line.find_last_not_of(" \t\r\n") + 1);
      if (!line.empty()) names.push_back(line);
    }
  } else if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".sarc") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
  }
  int n_classes = -1;
  for (const auto& name : names) {
    int nc = 0;
    ds.crops.push_back(read_crop_file((fs::path(dir) / name).string(), &nc));
    if (n_classes >= 0 && nc != n_classes)
      throw format_error(dir + ": mixed n_classes across crops (" + std::to_string(n_classes) +
                             " vs " + std::to_string(nc) + " in " + name + ")",
                         0);
    n_classes = nc;
  }
  ds.n_classes = std::max(n_classes, 0);
  return ds;
}

}  // namespace sardet
