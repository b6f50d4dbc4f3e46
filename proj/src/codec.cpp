#include "idasnet/codec/codec.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <limits>

#include "binary_io.hpp"

namespace idasnet::codec {

using nlohmann::json;

std::string to_string(RankKey k) { return k == RankKey::selfinfo ? "selfinfo" : "magnitude"; }

RankKey parse_rank_key(const std::string& s) {
  if (s == "magnitude") return RankKey::magnitude;
  if (s == "selfinfo") return RankKey::selfinfo;
  throw ConfigError("unknown ranking key '" + s + "' (magnitude|selfinfo)");
}

void validate_codeword(const Codeword& c) {
  if (c.values.size() != c.indices.size()) {
    throw CodewordError("codeword: " + std::to_string(c.values.size()) + " values but " +
                        std::to_string(c.indices.size()) + " indices");
  }
  const std::size_t raster = c.raster();
  std::vector<bool> seen(raster, false);
  for (const auto i : c.indices) {
    if (i >= raster) {
      throw CodewordError("codeword: index " + std::to_string(i) + " outside raster of " +
                          std::to_string(raster));
    }
    if (seen[i]) throw CodewordError("codeword: duplicate index " + std::to_string(i));
    seen[i] = true;
  }
}

BitBudget codeword_budget(double sigma, unsigned k1, unsigned k2, std::size_t n_c, std::size_t n_r,
                          std::optional<std::size_t> override_m) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("compression ratio must lie in (0, 1]");
  if (k1 == 0) throw DomainError("k1 must be positive");
  const std::size_t raster = 2 * n_c * n_r;
  std::size_t m = 0;
  if (override_m) {
    m = *override_m;
  } else {
    const double exact = sigma * k1 * static_cast<double>(raster) / static_cast<double>(k1 + k2);
    m = static_cast<std::size_t>(std::floor(exact + 0.5));
  }
  if (m >= raster) {
    throw DomainError("M = " + std::to_string(m) + " must be below 2*N_c*N_r = " +
                      std::to_string(raster));
  }
  return {sigma, m, (m + 1) * k1 + m * k2};
}

double compression_ratio(std::size_t m, unsigned k1, unsigned k2, std::size_t n_c, std::size_t n_r) {
  return static_cast<double>(m) * (k1 + k2) / (static_cast<double>(k1) * 2.0 * n_c * n_r);
}

namespace {

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw DomainError("not a number: '" + s + "'");
  return v;
}

}  // namespace

double parse_ratio(const std::string& text) {
  const auto sep = text.find_first_of("/:");
  double v = 0.0;
  if (sep == std::string::npos) {
    v = parse_number(text);
  } else {
    const double num = parse_number(text.substr(0, sep));
    const double den = parse_number(text.substr(sep + 1));
    if (den == 0.0) throw DomainError("ratio denominator is zero");
    v = num / den;
  }
  if (!(v > 0.0 && v <= 1.0)) throw DomainError("compression ratio '" + text + "' not in (0, 1]");
  return v;
}

std::vector<std::uint32_t> rank_top_m(std::span<const double> keys, std::size_t m) {
  if (m > keys.size()) throw DomainError("rank_top_m: M exceeds the number of entries");
  std::vector<std::uint32_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  const auto before = [&](std::uint32_t a, std::uint32_t b) {
    return keys[a] > keys[b] || (keys[a] == keys[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                    before);
  order.resize(m);
  return order;
}

std::vector<double> ifr_prefill(const Codeword& c) {
  std::vector<double> out(c.raster());
  ifr_prefill<double>(c, out);
  return out;
}

void write_cwrd(std::ostream& out, const Codeword& c) {
  validate_codeword(c);
  if (c.raster() > std::numeric_limits<std::uint16_t>::max() + std::size_t{1}) {
    throw FormatError("CWRD: raster too large for 16-bit indices");
  }
  const json h{{"M", c.m()},     {"k1", c.k1},   {"k2", c.k2},
               {"n_c", c.n_c},   {"n_r", c.n_r}, {"key", to_string(c.key)}};
  io::write_magic(out, kCwrdMagic);
  io::write_string_block(out, h.dump());
  io::write_le<double>(out, c.rho);
  for (const double v : c.values) io::write_le<double>(out, v);
  for (const auto i : c.indices) io::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(i));
}

Codeword read_cwrd(std::istream& in) {
  io::expect_magic(in, kCwrdMagic, "CWRD");
  Codeword c;
  std::size_t m = 0;
  try {
    const json h = json::parse(io::read_string_block(in));
    m = h.at("M").get<std::size_t>();
    c.k1 = h.at("k1").get<unsigned>();
    c.k2 = h.at("k2").get<unsigned>();
    c.n_c = h.at("n_c").get<std::size_t>();
    c.n_r = h.at("n_r").get<std::size_t>();
    c.key = parse_rank_key(h.at("key").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("CWRD header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("CWRD header: ") + e.what());
  }
  if (m > c.raster()) throw FormatError("CWRD: M exceeds the raster size");
  c.rho = io::read_le<double>(in);
  c.values.resize(m);
  c.indices.resize(m);
  for (auto& v : c.values) v = io::read_le<double>(in);
  for (auto& i : c.indices) i = io::read_le<std::uint16_t>(in);
  validate_codeword(c);
  return c;
}

void write_cwrd(const std::filesystem::path& path, const Codeword& c) {
  io::AtomicWriter w(path);
  write_cwrd(w.stream(), c);
  w.commit();
}

Codeword read_cwrd(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  return read_cwrd(in);
}

}  // namespace idasnet::codec
