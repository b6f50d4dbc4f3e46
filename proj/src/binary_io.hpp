#pragma once

// Little-endian primitives shared by the artifact readers and writers.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "idasnet/errors.hpp"

namespace idasnet::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename U>
U byteswap_if_big(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<U>(bytes);
  } else {
    return v;
  }
}

template <typename V>
void write_le(std::ostream& out, V value) {
  using U = std::conditional_t<sizeof(V) == 8, std::uint64_t,
                               std::conditional_t<sizeof(V) == 4, std::uint32_t, std::uint16_t>>;
  const U raw = byteswap_if_big(std::bit_cast<U>(value));
  out.write(reinterpret_cast<const char*>(&raw), sizeof(raw));
}

template <typename V>
V read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(V) == 8, std::uint64_t,
                               std::conditional_t<sizeof(V) == 4, std::uint32_t, std::uint16_t>>;
  U raw{};
  in.read(reinterpret_cast<char*>(&raw), sizeof(raw));
  if (!in) throw FormatError("unexpected end of file");
  return std::bit_cast<V>(byteswap_if_big(raw));
}

inline void write_magic(std::ostream& out, const char (&magic)[8]) { out.write(magic, 8); }

inline void expect_magic(std::istream& in, const char (&magic)[8], const std::string& what) {
  char buf[8] = {};
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0) throw FormatError(what + ": bad magic");
}

inline void write_string_block(std::ostream& out, const std::string& s) {
  write_le<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string_block(std::istream& in, std::uint64_t limit = 1u << 24) {
  const auto len = read_le<std::uint64_t>(in);
  if (len > limit) throw FormatError("header block too large");
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("truncated header block");
  return s;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

/// Writes to `<path>.tmp` and renames on close so readers never see a
/// partially written file.
class AtomicWriter {
 public:
  explicit AtomicWriter(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + tmp_.string() + " for writing");
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed for " + tmp_.string());
    out_.close();
    std::filesystem::rename(tmp_, path_);
  }
  ~AtomicWriter() {
    if (out_.is_open()) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
};

}  // namespace idasnet::io
