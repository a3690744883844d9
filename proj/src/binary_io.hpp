#pragma once

// Little-endian encoding helpers shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "alone/error.hpp"

namespace alone::detail {

class ByteWriter {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }

  void write_to(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }

  void reserve(std::size_t n) { bytes_.reserve(n); }

 private:
  template <typename U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
  }
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  static ByteReader from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    ByteReader r;
    r.bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    r.name_ = path.string();
    return r;
  }

  void expect_magic(std::string_view m) {
    need(m.size());
    if (std::memcmp(bytes_.data() + pos_, m.data(), m.size()) != 0) {
      throw FormatError(name_ + ": bad magic, expected " + std::string(m));
    }
    pos_ += m.size();
  }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& name() const { return name_; }

  void expect_end() const {
    if (remaining() != 0) throw FormatError(name_ + ": " + std::to_string(remaining()) + " trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError(name_ + ": truncated");
  }
  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      const auto byte = static_cast<unsigned char>(bytes_[pos_ + i]);
      v |= static_cast<U>(static_cast<U>(byte) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }

  std::vector<char> bytes_;
  std::size_t pos_ = 0;
  std::string name_;
};

}  // namespace alone::detail
