#pragma once

// Little-endian byte packing shared by the binary file formats.

#include <cstdint>
#include <cstring>
#include <vector>

#include "partbench/error.hpp"

namespace partbench::detail {

class ByteWriter {
 public:
  void raw(const char* s, std::size_t n) { bytes_.insert(bytes_.end(), s, s + n); }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void f32(float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u32(u);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void uint(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  bool magic(const char* s, std::size_t n) {
    need(n);
    bool ok = std::memcmp(bytes_.data() + pos_, s, n) == 0;
    pos_ += n;
    return ok;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  float f32() {
    auto u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("bad-format", "truncated binary file");
  }
  std::uint64_t uint(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace partbench::detail
