#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "idasnet/errors.hpp"
#include "idasnet/selfinfo/self_info.hpp"

namespace idasnet::codec {

enum class RankKey { magnitude, selfinfo };

std::string to_string(RankKey k);
RankKey parse_rank_key(const std::string& s);  // ConfigError on unknown

/// Feedback payload: M values, their flat raster indices, and rho.
struct Codeword {
  std::size_t n_c = 0;
  std::size_t n_r = 0;
  unsigned k1 = 64;
  unsigned k2 = 10;
  RankKey key = RankKey::magnitude;
  double rho = 0.0;
  std::vector<double> values;
  std::vector<std::uint32_t> indices;

  std::size_t m() const { return values.size(); }
  std::size_t raster() const { return 2 * n_c * n_r; }
  std::size_t total_bits() const { return (m() + 1) * k1 + m() * k2; }
};

/// Throws CodewordError on length mismatch, out-of-range or duplicate indices.
void validate_codeword(const Codeword& c);

struct BitBudget {
  double sigma = 0.0;
  std::size_t m = 0;
  std::size_t total_bits = 0;
};

/// M = round-half-up(sigma * k1 * 2 N_c N_r / (k1 + k2)) unless override_m is
/// given; total = (M + 1) k1 + M k2.
BitBudget codeword_budget(double sigma, unsigned k1, unsigned k2, std::size_t n_c, std::size_t n_r,
                          std::optional<std::size_t> override_m = std::nullopt);

/// sigma implied by a codeword length.
double compression_ratio(std::size_t m, unsigned k1, unsigned k2, std::size_t n_c, std::size_t n_r);

/// "1/16", "0.0625" or "1:16". DomainError when not in (0, 1].
double parse_ratio(const std::string& text);

/// Positions of the m largest keys, largest first; equal keys go to the
/// smaller index.
std::vector<std::uint32_t> rank_top_m(std::span<const double> keys, std::size_t m);

struct EncoderConfig {
  std::size_t m = 0;
  RankKey key = RankKey::magnitude;
  unsigned k1 = 64;
  unsigned k2 = 10;
  // selfinfo key only: kernel bandwidth and neighbor offsets for the map of H_e.
  double bandwidth = 1.0;
  std::vector<selfinfo::Offset> offsets;
};

/// Ranking keys for one 2 x N_c x N_r image.
template <typename T>
std::vector<double> rank_keys(std::span<const T> he, std::size_t n_c, std::size_t n_r,
                              const EncoderConfig& cfg) {
  const std::size_t hw = n_c * n_r;
  if (he.size() != 2 * hw) throw ShapeError("ifc_encode: image size does not match dims");
  std::vector<double> keys(he.size());
  if (cfg.key == RankKey::magnitude) {
    for (std::size_t i = 0; i < he.size(); ++i) keys[i] = std::abs(static_cast<double>(he[i]));
    return keys;
  }
  std::vector<double> plane(hw), map(hw), scratch;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < hw; ++i) plane[i] = static_cast<double>(he[c * hw + i]);
    selfinfo::pixel_self_info<double>(plane, 1, n_c, n_r, cfg.offsets, cfg.bandwidth, map, scratch);
    std::copy(map.begin(), map.end(), keys.begin() + static_cast<std::ptrdiff_t>(c * hw));
  }
  return keys;
}

/// Flattens H_e row-major, keeps the top-M entries under the configured key
/// (largest first) with their positions, and attaches rho.
template <typename T>
Codeword ifc_encode(std::span<const T> he, std::size_t n_c, std::size_t n_r, double rho,
                    const EncoderConfig& cfg) {
  if (cfg.m >= 2 * n_c * n_r) throw DomainError("ifc_encode: M must be below 2*N_c*N_r");
  const auto keys = rank_keys(he, n_c, n_r, cfg);
  Codeword c;
  c.n_c = n_c;
  c.n_r = n_r;
  c.k1 = cfg.k1;
  c.k2 = cfg.k2;
  c.key = cfg.key;
  c.rho = rho;
  c.indices = rank_top_m(keys, cfg.m);
  c.values.reserve(c.indices.size());
  for (const auto i : c.indices) c.values.push_back(static_cast<double>(he[i]));
  return c;
}

/// Z_f: codeword values at their positions, rho everywhere else.
template <typename T>
void ifr_prefill(const Codeword& c, std::span<T> out) {
  validate_codeword(c);
  if (out.size() != c.raster()) throw ShapeError("ifr_prefill: output size does not match dims");
  std::fill(out.begin(), out.end(), static_cast<T>(c.rho));
  for (std::size_t k = 0; k < c.m(); ++k) out[c.indices[k]] = static_cast<T>(c.values[k]);
}

std::vector<double> ifr_prefill(const Codeword& c);

inline constexpr char kCwrdMagic[8] = {'C', 'S', 'I', 'C', 'W', 'D', '0', '1'};

/// CWRD v1: magic "CSICWD01", u64 LE header length, JSON {M, k1, k2, n_c,
/// n_r, key}, rho (f64), M values (f64), M indices (u16), little-endian.
void write_cwrd(std::ostream& out, const Codeword& c);
Codeword read_cwrd(std::istream& in);
void write_cwrd(const std::filesystem::path& path, const Codeword& c);
Codeword read_cwrd(const std::filesystem::path& path);

}  // namespace idasnet::codec
