#include "idasnet/quant/lloyd_max.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "idasnet/errors.hpp"

namespace idasnet::quant {

using nlohmann::json;

void LloydMaxQuantizer::validate() const {
  if (bits < 1 || bits > 24) throw ConfigError("quantizer: bits must lie in [1, 24]");
  const std::size_t k = std::size_t{1} << bits;
  if (levels.size() != k || boundaries.size() != k - 1) {
    throw ConfigError("quantizer: expected " + std::to_string(k) + " levels and " +
                      std::to_string(k - 1) + " boundaries");
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (!(levels[i] <= boundaries[i] && boundaries[i] <= levels[i + 1])) {
      throw ConfigError("quantizer: boundaries must interleave ascending levels");
    }
  }
}

namespace {

std::vector<double> midpoints(const std::vector<double>& levels) {
  std::vector<double> b(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) b[i] = 0.5 * (levels[i] + levels[i + 1]);
  return b;
}

// First sample index of every cell plus the end, for (b[k-1], b[k]] cells.
std::vector<std::size_t> partition(const std::vector<double>& sorted, const std::vector<double>& b) {
  std::vector<std::size_t> edges(b.size() + 2);
  edges.front() = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    edges[k + 1] = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), b[k]) - sorted.begin());
  }
  edges.back() = sorted.size();
  return edges;
}

double distortion(const std::vector<double>& sorted, const std::vector<std::size_t>& edges,
                  const std::vector<double>& levels) {
  double sum = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    for (std::size_t i = edges[k]; i < edges[k + 1]; ++i) {
      const double d = sorted[i] - levels[k];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(sorted.size());
}

std::vector<double> quantile_levels(const std::vector<double>& sorted, std::size_t k) {
  std::vector<double> levels(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(k) *
                       static_cast<double>(sorted.size());
    const auto idx = std::min(sorted.size() - 1, static_cast<std::size_t>(pos));
    levels[i] = sorted[idx];
  }
  return levels;
}

}  // namespace

LloydMaxQuantizer fit_lloyd_max(std::span<const double> samples, unsigned bits,
                                std::size_t max_iters, double tol) {
  if (bits < 1 || bits > 24) throw DomainError("fit_lloyd_max: bits must lie in [1, 24]");
  const std::size_t k = std::size_t{1} << bits;
  std::vector<double> sorted(samples.begin(), samples.end());
  for (const double v : sorted) {
    if (!std::isfinite(v)) throw DomainError("fit_lloyd_max: non-finite sample");
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < k) {
    throw DomainError("fit_lloyd_max: need at least " + std::to_string(k) +
                      " distinct samples, got " + std::to_string(distinct.size()));
  }

  LloydMaxQuantizer q;
  q.bits = bits;
  q.fit_samples = sorted.size();
  q.levels = quantile_levels(sorted, k);
  // Heavy ties can collapse quantiles; fall back to quantiles of the distinct values.
  if (std::adjacent_find(q.levels.begin(), q.levels.end()) != q.levels.end()) {
    q.levels = quantile_levels(distinct, k);
  }

  std::vector<std::size_t> edges = partition(sorted, midpoints(q.levels));
  q.distortion_history.push_back(distortion(sorted, edges, q.levels));
  while (q.iterations < max_iters) {
    for (std::size_t c = 0; c < k; ++c) {
      if (edges[c + 1] == edges[c]) continue;  // empty cell keeps its level
      double sum = 0.0;
      for (std::size_t i = edges[c]; i < edges[c + 1]; ++i) sum += sorted[i];
      q.levels[c] = sum / static_cast<double>(edges[c + 1] - edges[c]);
    }
    ++q.iterations;
    auto next = partition(sorted, midpoints(q.levels));
    const double d = distortion(sorted, next, q.levels);
    const double prev = q.distortion_history.back();
    q.distortion_history.push_back(d);
    const bool same = next == edges;
    edges = std::move(next);
    if (same || prev - d <= tol * std::max(prev, 1e-300)) {
      q.converged = true;
      break;
    }
  }
  q.boundaries = midpoints(q.levels);
  return q;
}

Quantized quantize(const LloydMaxQuantizer& q, double x) {
  const auto it = std::lower_bound(q.boundaries.begin(), q.boundaries.end(), x);
  const auto index = static_cast<std::size_t>(it - q.boundaries.begin());
  return {index, q.levels[index]};
}

double dequantize(const LloydMaxQuantizer& q, std::size_t index) {
  if (index >= q.levels.size()) throw DomainError("dequantize: index out of range");
  return q.levels[index];
}

double quantizer_mse(const LloydMaxQuantizer& q, std::span<const double> samples) {
  if (samples.empty()) throw DomainError("quantizer_mse: no samples");
  double sum = 0.0;
  for (const double x : samples) {
    const double d = x - quantize(q, x).value;
    sum += d * d;
  }
  return sum / static_cast<double>(samples.size());
}

std::string quantizer_to_json(const LloydMaxQuantizer& q) {
  const json j{{"bits", q.bits},
               {"levels", q.levels},
               {"boundaries", q.boundaries},
               {"fit_meta",
                {{"samples", q.fit_samples},
                 {"iterations", q.iterations},
                 {"converged", q.converged},
                 {"distortion_history", q.distortion_history}}}};
  return j.dump(2);
}

LloydMaxQuantizer quantizer_from_json(const std::string& text) {
  LloydMaxQuantizer q;
  try {
    const json j = json::parse(text);
    q.bits = j.at("bits").get<unsigned>();
    q.levels = j.at("levels").get<std::vector<double>>();
    q.boundaries = j.at("boundaries").get<std::vector<double>>();
    if (j.contains("fit_meta")) {
      const auto& m = j.at("fit_meta");
      q.fit_samples = m.value("samples", std::size_t{0});
      q.iterations = m.value("iterations", std::size_t{0});
      q.converged = m.value("converged", false);
      q.distortion_history = m.value("distortion_history", std::vector<double>{});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("quantizer JSON: ") + e.what());
  }
  try {
    q.validate();
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  return q;
}

void write_quantizer(const std::filesystem::path& path, const LloydMaxQuantizer& q) {
  io::AtomicWriter w(path);
  w.stream() << quantizer_to_json(q) << '\n';
  w.commit();
}

LloydMaxQuantizer read_quantizer(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return quantizer_from_json(ss.str());
}

}  // namespace idasnet::quant
