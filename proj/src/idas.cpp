#include "idasnet/idas/idas.hpp"

namespace idasnet::idas {

std::string to_string(MaskSource s) {
  return s == MaskSource::broadcast ? "broadcast" : "per_channel";
}

MaskSource parse_mask_source(const std::string& s) {
  if (s == "per_channel") return MaskSource::per_channel;
  if (s == "broadcast") return MaskSource::broadcast;
  throw ConfigError("unknown mask source '" + s + "' (per_channel|broadcast)");
}

void IdasConfig::validate(std::size_t pixels) const {
  if (in_channels < 1) throw ConfigError("idas: in_channels must be >= 1");
  if (feature_maps < 1) throw ConfigError("idas: feature_maps must be >= 1");
  if (selfinfo.patch_size != 1) throw ConfigError("idas: the network path uses pixel patches");
  selfinfo.validate(pixels);
}

selfinfo::MaskSet BatchMasks::sample(std::size_t n) const {
  if (n >= batch) throw ShapeError("BatchMasks: sample index out of range");
  const std::size_t per = maps * rows * cols;
  selfinfo::MaskSet set{maps, rows, cols, {}};
  set.bits.assign(bits.begin() + static_cast<std::ptrdiff_t>(n * per),
                  bits.begin() + static_cast<std::ptrdiff_t>((n + 1) * per));
  return set;
}

}  // namespace idasnet::idas
