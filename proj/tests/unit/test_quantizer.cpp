#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <random>

#include "idasnet/errors.hpp"
#include "idasnet/quant/lloyd_max.hpp"

using namespace idasnet;
using namespace idasnet::quant;

namespace {

std::vector<double> draw_uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> draw_normal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Midrise equal-width quantizer on [-a, a], scalar loop.
double equal_width_mse(const std::vector<double>& xs, unsigned bits, double a) {
  const int k = 1 << bits;
  const double step = 2.0 * a / k;
  double sum = 0.0;
  for (const double x : xs) {
    int cell = static_cast<int>(std::floor((x + a) / step));
    cell = std::clamp(cell, 0, k - 1);
    const double level = -a + (cell + 0.5) * step;
    sum += (x - level) * (x - level);
  }
  return sum / static_cast<double>(xs.size());
}

}  // namespace

TEST(LloydMax, DistortionNeverIncreases) {
  for (const unsigned bits : {1u, 3u, 6u}) {
    const auto q = fit_lloyd_max(draw_normal(20000, bits), bits);
    ASSERT_GE(q.distortion_history.size(), 2u);
    for (std::size_t i = 1; i < q.distortion_history.size(); ++i) {
      EXPECT_LE(q.distortion_history[i], q.distortion_history[i - 1] * (1.0 + 1e-12)) << bits;
    }
    EXPECT_TRUE(q.converged);
    q.validate();
  }
}

TEST(LloydMax, TwoBitUniformLevels) {
  const auto q = fit_lloyd_max(draw_uniform(200000, 1), 2);
  const double want[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(q.levels[i], want[i], 0.01);
}

TEST(LloydMax, ThreeBitGaussianBeatsEqualWidth) {
  const auto xs = draw_normal(100000, 2);
  const auto q = fit_lloyd_max(xs, 3);
  double best = 1e300;
  for (double a = 0.5; a <= 4.0; a += 0.005) best = std::min(best, equal_width_mse(xs, 3, a));
  const double mse = quantizer_mse(q, xs);
  EXPECT_LT(mse, best);
  // Tabulated optimum for the unit Gaussian at 8 levels is about 0.03454.
  EXPECT_NEAR(mse, 0.03454, 0.001);
}

TEST(LloydMax, BoundaryBelongsToLowerCell) {
  LloydMaxQuantizer q;
  q.bits = 1;
  q.levels = {-1.0, 1.0};
  q.boundaries = {0.0};
  EXPECT_EQ(quantize(q, 0.0).index, 0u);
  EXPECT_EQ(quantize(q, 1e-12).index, 1u);
  EXPECT_EQ(quantize(q, -50.0).value, -1.0);
  EXPECT_EQ(quantize(q, 50.0).value, 1.0);
  EXPECT_EQ(dequantize(q, 1), 1.0);
  EXPECT_THROW(dequantize(q, 2), DomainError);
}

TEST(LloydMax, QuantizedValueIsNearestLevel) {
  const auto q = fit_lloyd_max(draw_normal(5000, 3), 4);
  for (const double x : draw_normal(2000, 4)) {
    const double got = quantize(q, x).value;
    double nearest = q.levels[0];
    for (const double l : q.levels)
      if (std::abs(x - l) < std::abs(x - nearest)) nearest = l;
    EXPECT_DOUBLE_EQ(std::abs(x - got), std::abs(x - nearest));
  }
}

TEST(LloydMax, Errors) {
  EXPECT_THROW(fit_lloyd_max(draw_uniform(10, 5), 0), DomainError);
  EXPECT_THROW(fit_lloyd_max(draw_uniform(10, 5), 4), DomainError);
  const std::vector<double> ties(100, 0.5);
  EXPECT_THROW(fit_lloyd_max(ties, 1), DomainError);
  std::vector<double> bad = draw_uniform(10, 6);
  bad[3] = std::nan("");
  EXPECT_THROW(fit_lloyd_max(bad, 1), DomainError);
  EXPECT_THROW(quantizer_mse(LloydMaxQuantizer{}, {}), DomainError);
}

TEST(LloydMax, HeavyTiesStillFit) {
  std::vector<double> xs(1000, 0.0);
  for (std::size_t i = 0; i < 8; ++i) xs[i] = static_cast<double>(i + 1);
  const auto q = fit_lloyd_max(xs, 3);
  q.validate();
  EXPECT_EQ(quantize(q, 0.0).value, 0.0);
}

TEST(LloydMax, JsonRoundTrip) {
  const auto q = fit_lloyd_max(draw_normal(5000, 7), 3);
  const auto text = quantizer_to_json(q);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("bits").get<unsigned>(), 3u);
  EXPECT_EQ(j.at("levels").size(), 8u);
  EXPECT_EQ(j.at("boundaries").size(), 7u);
  EXPECT_TRUE(j.at("fit_meta").contains("distortion_history"));
  const auto back = quantizer_from_json(text);
  EXPECT_EQ(back.levels, q.levels);
  EXPECT_EQ(back.boundaries, q.boundaries);
  EXPECT_EQ(back.distortion_history, q.distortion_history);

  const auto path = std::filesystem::temp_directory_path() / "idasnet_test_q.json";
  write_quantizer(path, q);
  EXPECT_EQ(read_quantizer(path).levels, q.levels);
  std::filesystem::remove(path);

  EXPECT_THROW(quantizer_from_json("{\"bits\": 1}"), FormatError);
  EXPECT_THROW(quantizer_from_json("{\"bits\": 1, \"levels\": [1, 0], \"boundaries\": [0.5]}"),
               FormatError);
}
