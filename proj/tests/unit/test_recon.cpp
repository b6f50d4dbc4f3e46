#include <gtest/gtest.h>

#include <random>

#include "idasnet/recon/reconstructor.hpp"
#include "oracles.hpp"

using namespace idasnet;
using namespace idasnet::recon;

namespace {

Reconstructor<double> seeded(std::uint64_t seed) {
  Reconstructor<double> r;
  Rng rng(seed);
  r.init(rng);
  return r;
}

}  // namespace

TEST(Reconstructor, OutputInUnitIntervalWithInputShape) {
  std::mt19937_64 rng(1);
  auto r = seeded(2);
  const auto z = oracle::random_tensor({3, 2, 8, 12}, rng, 0.0, 1.0);
  Reconstructor<double>::Cache cache;
  const auto y = r.forward(z, Mode::train, cache);
  EXPECT_EQ(y.shape(), z.shape());
  for (const double v : y.storage()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  const auto ye = r.infer(z);
  for (const double v : ye.storage()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Reconstructor, LayerWidths) {
  Reconstructor<float> r;
  const std::size_t want[7][2] = {{2, 8}, {8, 16}, {16, 2}, {2, 8}, {8, 16}, {16, 2}, {2, 2}};
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(r.layer(i).conv().weight().size(), want[i][0] * want[i][1] * 9) << i;
  }
  EXPECT_THROW(r.infer(nn::Tensor<float>({1, 3, 4, 4})), ShapeError);
}

TEST(Reconstructor, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  auto r = seeded(4);
  auto z = oracle::random_tensor({2, 2, 6, 6}, rng, 0.0, 1.0);
  const auto w = oracle::random_tensor({2, 2, 6, 6}, rng);
  const auto loss = [&] {
    Reconstructor<double>::Cache c;
    const auto y = r.forward(z, Mode::train, c);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
    return s;
  };
  Reconstructor<double>::Cache cache;
  r.forward(z, Mode::train, cache);
  const auto gz = r.backward(w, cache);

  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    worst = std::max(worst, oracle::rel_err(gz[i], oracle::central_diff(loss, z[i])));
  }
  EXPECT_LT(worst, 1e-4) << "input";

  std::vector<nn::Param<double>*> trainable, buffers;
  r.collect(trainable, buffers);
  EXPECT_EQ(trainable.size(), 7u * 4u);
  for (auto* p : trainable) {
    double worst_p = 0.0;
    // Large weight tensors are sampled with a stride.
    const std::size_t step = std::max<std::size_t>(1, p->size() / 40);
    for (std::size_t i = 0; i < p->size(); i += step) {
      worst_p = std::max(worst_p, oracle::rel_err(p->grad[i], oracle::central_diff(loss, p->value[i])));
    }
    EXPECT_LT(worst_p, 1e-4) << p->name;
  }
}

TEST(Reconstructor, ShortcutCarriesGradientAroundBothBlocks) {
  // With every layer of the two blocks zeroed, the last layer only sees Z_f.
  std::mt19937_64 rng(5);
  auto r = seeded(6);
  for (std::size_t i = 0; i < 6; ++i) {
    std::fill(r.layer(i).bn().scale().value.begin(), r.layer(i).bn().scale().value.end(), 0.0);
    std::fill(r.layer(i).bn().shift().value.begin(), r.layer(i).bn().shift().value.end(), 0.0);
  }
  const auto z = oracle::random_tensor({1, 2, 4, 4}, rng, 0.0, 1.0);
  const auto ref = r.layer(6).infer(z);
  const auto y = r.infer(z);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
}
