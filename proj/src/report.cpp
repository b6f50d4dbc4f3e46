#include "idasnet/pipeline/report.hpp"

#include <charconv>
#include <cmath>

#include "binary_io.hpp"

namespace idasnet::pipeline {

std::string round_trip(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string loss_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,loss,lr\n";
  for (const auto& s : history) {
    out += std::to_string(s.epoch) + ',' + round_trip(s.loss) + ',' + round_trip(s.lr) + '\n';
  }
  return out;
}

std::string ber_csv(const BerCurve& curve) {
  std::string out = "snr_db,ber,count,errors,oracle,std_error\n";
  for (const auto& p : curve.points) {
    out += round_trip(p.snr_db) + ',' + round_trip(p.ber) + ',' + std::to_string(p.bits) + ',' +
           std::to_string(p.errors) + ',' + round_trip(p.oracle) + ',' + round_trip(p.std_error) +
           '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  io::AtomicWriter w(path);
  w.stream() << text;
  w.commit();
}

}  // namespace idasnet::pipeline
