// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "sardet/errors.hpp"

namespace sardet {

/// Little-endian binary writer over a growable buffer.
class BinaryWriter {
public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    size_t at = buf_.size();
    buf_.resize(at + sizeof(T));
    std::memcpy(buf_.data() + at, &v, sizeof(T));
  }
  void put_bytes(const void* p, size_t n) {
    size_t at = buf_.size();
    buf_.resize(at + n);
    std::memcpy(buf_.data() + at, p, n);
  }
  void put_string(const std::string& s) {
    put<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  const std::vector<char>& buffer() const { return buf_; }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path, 0);
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw format_error("short write: " + path, buf_.size());
  }

private:
  std::vector<char> buf_;
};

/// Little-endian reader that reports the byte offset of any truncation
/// or mismatch it hits.
class BinaryReader {
public:
  BinaryReader(std::vector<char> data, std::string name)
      : data_(std::move(data)), name_(std::move(name)) {}

  static BinaryReader from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw format_error("cannot open: " + path, 0);
    auto size = in.tellg();
    in.seekg(0);
    std::vector<char> data(static_cast<size_t>(size));
    in.read(data.data(), size);
    if (!in) throw format_error("short read: " + path, 0);
    return BinaryReader(std::move(data), path);
  }

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void get_bytes(void* p, size_t n) {
    need(n);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::string get_string() {
    auto n = get<std::uint16_t>();
    need(n);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  void expect_magic(const char magic[4]) {
    char got[4];
    get_bytes(got, 4);
    if (std::memcmp(got, magic, 4) != 0)
      throw format_error(name_ + ": bad magic, expected '" + std::string(magic, 4) + "'", pos_ - 4);
  }
  std::uint64_t offset() const { return pos_; }
  std::uint64_t remaining() const { return data_.size() - pos_; }
  const std::string& name() const { return name_; }

  [[noreturn]] void fail(const std::string& msg) const { throw format_error(name_ + ": " + msg, pos_); }

private:
  void need(size_t n) {
    if (pos_ + n > data_.size())
      throw format_error(name_ + ": truncated, needed " + std::to_string(n) + " more bytes", pos_);
  }
  std::vector<char> data_;
  std::string name_;
  std::uint64_t pos_ = 0;
};

}  // namespace sardet
