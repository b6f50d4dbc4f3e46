// Prints one PASS/FAIL line per acceptance criterion. Arguments select
// criteria by number (default: all). Exit status is 0 only if every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "idasnet/codec/codec.hpp"
#include "idasnet/nn/lr_schedule.hpp"
#include "idasnet/nn/parallel.hpp"
#include "idasnet/pipeline/ber.hpp"
#include "idasnet/pipeline/evaluate.hpp"
#include "idasnet/pipeline/train.hpp"
#include "idasnet/quant/lloyd_max.hpp"
#include "idasnet/selfinfo/self_info.hpp"
#include "oracles.hpp"

using namespace idasnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1 -------------------------------------------------------------------

Outcome bit_accounting() {
  struct Row {
    double sigma;
    std::optional<std::size_t> override_m;
    std::size_t m, bits;
  };
  const Row rows[] = {{1.0 / 8, {}, 221, 16418},
                      {1.0 / 16, {}, 111, 8278},
                      {1.0 / 32, 56, 56, 4208},
                      {1.0 / 64, {}, 28, 2136}};
  Outcome o{true, ""};
  for (const auto& r : rows) {
    const auto b = codec::codeword_budget(r.sigma, 64, 10, 32, 32, r.override_m);
    o.pass = o.pass && b.m == r.m && b.total_bits == r.bits;
    o.detail += "(" + std::to_string(b.m) + "," + std::to_string(b.total_bits) + ") ";
  }
  o.detail += "[1/32 uses M override 56; rounding gives 55]";
  return o;
}

// ---- 2 -------------------------------------------------------------------

Outcome parameter_counts() {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  pipeline::ParamCounts c;
  for (const double sigma : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    pipeline::ModelConfig cfg;
    cfg.m = codec::codeword_budget(sigma, 64, 10, 32, 32, sigma == 1.0 / 32 ? std::optional<std::size_t>(56)
                                                                           : std::nullopt)
                .m;
    c = pipeline::IdasNet<float>(cfg).count_parameters();
    seen.insert({c.trainable, c.non_trainable, c.buffers});
  }
  const double fc = static_cast<double>(pipeline::fc_encoder_parameters(32, 32, 221));
  const double ratio = fc / static_cast<double>(c.total());
  Outcome o;
  o.pass = seen.size() == 1 && c.total() < 10000 && ratio >= 100.0;
  o.detail = "trainable " + std::to_string(c.trainable) + ", non-trainable " +
             std::to_string(c.non_trainable) + ", total " + std::to_string(c.total()) +
             (seen.size() == 1 ? " (same for all ratios)" : " (DIFFERS across ratios)") +
             "; FC encoder " + std::to_string(static_cast<std::size_t>(fc)) + " = " +
             fmt("%.1f", ratio) + "x";
  return o;
}

// ---- 3 -------------------------------------------------------------------

Outcome self_information() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  selfinfo::SelfInfoConfig cfg;
  cfg.neighbor_samples = cfg.full_neighborhood();
  const auto offsets = selfinfo::neighbor_offsets(cfg);
  double worst = 0.0;
  bool invariant = true;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> plane(256);
    for (auto& v : plane) v = u(rng);
    const auto map = selfinfo::self_info_map(plane, 16, 16, cfg, offsets);
    const auto ref = oracle::self_info(plane, 16, 16, 1, offsets, cfg.bandwidth);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(map.values[i] - ref[i]));

    const auto t = selfinfo::texture_threshold<double>(map.values, 60);
    const auto base = selfinfo::build_masks(std::span(&map, 1), std::span(&t, 1));
    for (const double c : {-5.0, 0.3, 42.0}) {
      auto shifted = map;
      for (auto& v : shifted.values) v += c;
      const auto ts = selfinfo::texture_threshold<double>(shifted.values, 60);
      invariant = invariant && selfinfo::build_masks(std::span(&shifted, 1), std::span(&ts, 1)).bits == base.bits;
    }
  }
  return {worst <= 1e-9 && invariant,
          "max |diff| " + fmt("%.2e", worst) + (invariant ? ", masks shift-invariant" : ", masks CHANGE under shift")};
}

// ---- 4 -------------------------------------------------------------------

struct GradCheck {
  double worst = 0.0;
  std::string where;
  void add(double analytic, double numeric, const std::string& what) {
    const double e = oracle::rel_err(analytic, numeric);
    if (e > worst) {
      worst = e;
      where = what;
    }
  }
};

double probe(const nn::Tensor<double>& y, const nn::Tensor<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

void check_params(GradCheck& g, const std::vector<nn::Param<double>*>& params,
                  const std::function<double()>& loss, const std::string& layer) {
  for (auto* p : params) {
    const std::size_t step = std::max<std::size_t>(1, p->size() / 25);
    for (std::size_t i = 0; i < p->size(); i += step) {
      g.add(p->grad[i], oracle::central_diff(loss, p->value[i]), layer + ":" + p->name);
    }
  }
}

void check_input(GradCheck& g, const nn::Tensor<double>& analytic, nn::Tensor<double>& x,
                 const std::function<double()>& loss, const std::string& layer) {
  for (std::size_t i = 0; i < x.size(); ++i) g.add(analytic[i], oracle::central_diff(loss, x[i]), layer + ":input");
}

Outcome gradients() {
  using nn::Mode;
  using nn::Tensor;
  std::mt19937_64 rng(4);
  Rng init(4);
  GradCheck g;

  {  // conv
    nn::Conv2d<double> conv(2, 3, "conv");
    conv.init_fan_in_uniform(init);
    auto x = oracle::random_tensor({2, 2, 8, 8}, rng);
    const auto w = oracle::random_tensor({2, 3, 8, 8}, rng);
    const auto gx = conv.backward(x, w);
    const auto loss = [&] { return probe(conv.forward(x), w); };
    check_params(g, {&conv.weight(), &conv.bias()}, loss, "conv");
    check_input(g, gx, x, loss, "conv");
  }
  for (const auto mode : {Mode::train, Mode::eval}) {  // batch norm
    nn::BatchNorm2d<double> bn(3, "bn");
    for (auto& v : bn.scale().value) v = 0.5 + oracle::random_tensor({1, 1, 1, 1}, rng, 0, 1)[0];
    for (auto& v : bn.running_var().value) v = 0.7;
    auto x = oracle::random_tensor({2, 3, 8, 8}, rng);
    const auto w = oracle::random_tensor({2, 3, 8, 8}, rng);
    nn::BatchNormCache<double> cache;
    auto frozen = bn;
    bn.forward(x, mode, cache);
    const auto gx = bn.backward(w, cache);
    const auto loss = [&] {
      auto b = frozen;  // running stats must not drift between probes
      b.scale().value = bn.scale().value;
      b.shift().value = bn.shift().value;
      nn::BatchNormCache<double> c;
      return probe(b.forward(x, mode, c), w);
    };
    const std::string name = mode == Mode::train ? "bn(train)" : "bn(eval)";
    check_params(g, {&bn.scale(), &bn.shift()}, loss, name);
    check_input(g, gx, x, loss, name);
  }
  for (const auto kind : {nn::Activation::lrelu, nn::Activation::sigmoid}) {  // activations
    auto x = oracle::random_tensor({2, 2, 8, 8}, rng, -3, 3);
    const auto w = oracle::random_tensor({2, 2, 8, 8}, rng);
    const auto gx = nn::activation_backward(x, nn::activation(x, kind), w, kind);
    const auto loss = [&] { return probe(nn::activation(x, kind), w); };
    check_input(g, gx, x, loss, kind == nn::Activation::lrelu ? "lrelu" : "sigmoid");
  }
  {  // loss
    auto p = oracle::random_tensor({2, 2, 8, 8}, rng);
    const auto t = oracle::random_tensor({2, 2, 8, 8}, rng);
    const auto gp = nn::mse_loss_grad(p, t);
    check_input(g, gp, p, [&] { return nn::mse_loss(p, t); }, "mse");
  }
  {  // IDAS module with frozen masks
    idas::IdasConfig cfg;
    cfg.selfinfo.n_texture = 20;
    idas::IdasModule<double> m(cfg);
    m.init(init);
    auto x = oracle::random_tensor({2, 2, 8, 8}, rng, 0, 1);
    const auto w = oracle::random_tensor({2, 2, 8, 8}, rng);
    idas::IdasModule<double>::Cache cache;
    m.forward(x, Mode::train, cache);
    const auto masks = cache.masks;
    const auto gx = m.backward(w, cache, true);
    const auto loss = [&] {
      idas::IdasModule<double>::Cache c;
      return probe(m.forward(x, Mode::train, c, &masks), w);
    };
    std::vector<nn::Param<double>*> t, b;
    m.collect(t, b);
    check_params(g, t, loss, "idas");
    check_input(g, gx, x, loss, "idas");
  }
  {  // reconstructor
    recon::Reconstructor<double> r;
    r.init(init);
    auto z = oracle::random_tensor({2, 2, 8, 8}, rng, 0, 1);
    const auto w = oracle::random_tensor({2, 2, 8, 8}, rng);
    recon::Reconstructor<double>::Cache cache;
    r.forward(z, Mode::train, cache);
    const auto gz = r.backward(w, cache);
    const auto loss = [&] {
      recon::Reconstructor<double>::Cache c;
      return probe(r.forward(z, Mode::train, c), w);
    };
    std::vector<nn::Param<double>*> t, b;
    r.collect(t, b);
    check_params(g, t, loss, "recon");
    check_input(g, gz, z, loss, "recon");
  }
  {  // end to end, masks and gather indices frozen
    pipeline::ModelConfig cfg;
    cfg.n_c = cfg.n_r = 8;
    cfg.m = 30;
    cfg.idas.selfinfo.n_texture = 20;
    pipeline::IdasNet<double> model(cfg);
    model.init(4);
    const auto x = oracle::random_tensor({2, 2, 8, 8}, rng, 0, 1);
    const auto w = oracle::random_tensor({2, 2, 8, 8}, rng);
    pipeline::IdasNet<double>::Cache cache;
    model.forward(x, Mode::train, cache);
    const auto masks = cache.idas.masks;
    std::vector<std::vector<std::uint32_t>> idx;
    for (const auto& c : cache.codewords) idx.push_back(c.indices);
    const pipeline::IdasNet<double>::Frozen frozen{&masks, &idx};
    model.zero_grad();
    model.forward(x, Mode::train, cache, frozen);
    model.backward(w, cache);
    const auto loss = [&] {
      pipeline::IdasNet<double>::Cache c;
      return probe(model.forward(x, Mode::train, c, frozen), w);
    };
    check_params(g, model.trainable(), loss, "end-to-end");
  }
  return {g.worst < 1e-4, "worst rel. err " + fmt("%.2e", g.worst) + " at " + g.where};
}

// ---- 5 -------------------------------------------------------------------

Outcome codec_identities() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> coarse(-3, 3);
  std::size_t oracle_mismatch = 0, exact_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> he(2 * 16 * 16);
    for (auto& v : he) v = trial % 4 == 0 ? coarse(rng) / 3.0 : u(rng);
    codec::EncoderConfig cfg;
    cfg.m = 1 + static_cast<std::size_t>(trial) % 200;
    const auto c = codec::ifc_encode<double>(he, 16, 16, 0.5, cfg);
    std::vector<double> keys(he.size());
    for (std::size_t i = 0; i < he.size(); ++i) keys[i] = std::abs(he[i]);
    oracle_mismatch += c.indices != oracle::top_m(keys, cfg.m);

    // Image equal to rho off a random support, encoded on |x - rho|.
    const double rho = 0.5 * (u(rng) + 1.0);
    std::vector<double> img(he.size(), rho), centered(he.size(), 0.0);
    std::vector<std::size_t> pos(img.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::shuffle(pos.begin(), pos.end(), rng);
    for (std::size_t k = 0; k < cfg.m; ++k) {
      centered[pos[k]] = (u(rng) < 0 ? -1.0 : 1.0) * (1.0 + std::abs(u(rng)));
      img[pos[k]] = rho + centered[pos[k]];
    }
    auto cw = codec::ifc_encode<double>(centered, 16, 16, rho, cfg);
    for (std::size_t k = 0; k < cfg.m; ++k) cw.values[k] = img[cw.indices[k]];
    exact_fail += codec::ifr_prefill(cw) != img;
  }
  codec::Codeword bad;
  bad.n_c = bad.n_r = 4;
  bad.values = {1.0, 2.0};
  bad.indices = {3, 3};
  bool dup = false, range = false;
  try {
    codec::ifr_prefill(bad);
  } catch (const CodewordError&) {
    dup = true;
  }
  bad.indices = {3, 32};
  try {
    codec::ifr_prefill(bad);
  } catch (const CodewordError&) {
    range = true;
  }
  return {oracle_mismatch == 0 && exact_fail == 0 && dup && range,
          std::to_string(oracle_mismatch) + "/1000 oracle mismatches, " + std::to_string(exact_fail) +
              "/1000 inexact prefills, duplicate " + (dup ? "rejected" : "ACCEPTED") + ", out-of-range " +
              (range ? "rejected" : "ACCEPTED")};
}

// ---- 6 -------------------------------------------------------------------

Outcome lloyd_max() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  std::vector<double> uni(200000), nrm(100000);
  for (auto& v : uni) v = u(rng);
  for (auto& v : nrm) v = g(rng);

  bool monotone = true;
  const auto check = [&](const quant::LloydMaxQuantizer& q) {
    for (std::size_t i = 1; i < q.distortion_history.size(); ++i)
      monotone = monotone && q.distortion_history[i] <= q.distortion_history[i - 1];
  };
  const auto q2 = quant::fit_lloyd_max(uni, 2);
  check(q2);
  double level_err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) level_err = std::max(level_err, std::abs(q2.levels[i] - (2.0 * i + 1) / 8.0));

  const auto q3 = quant::fit_lloyd_max(nrm, 3);
  check(q3);
  for (const unsigned b : {1u, 4u, 6u}) check(quant::fit_lloyd_max(nrm, b));
  const double mse = quant::quantizer_mse(q3, nrm);
  double best_uniform = 1e300;
  for (double a = 0.5; a <= 4.0; a += 0.002) {
    const double step = 2.0 * a / 8.0;
    double s = 0.0;
    for (const double x : nrm) {
      const int cell = std::clamp(static_cast<int>(std::floor((x + a) / step)), 0, 7);
      const double d = x - (-a + (cell + 0.5) * step);
      s += d * d;
    }
    best_uniform = std::min(best_uniform, s / static_cast<double>(nrm.size()));
  }
  return {monotone && level_err <= 0.01 && mse <= best_uniform,
          std::string(monotone ? "histories monotone" : "history INCREASES") + ", 2-bit level err " +
              fmt("%.4f", level_err) + ", 3-bit MSE " + fmt("%.5f", mse) + " vs equal-width " +
              fmt("%.5f", best_uniform)};
}

// ---- 7 -------------------------------------------------------------------

Outcome dft_round_trip() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  channel::ComplexMatrix h(1024, 32);
  for (auto& v : h.data) v = {g(rng), g(rng)};
  const auto ha = channel::angular_delay_transform(h);
  const auto back = channel::inverse_angular_delay_transform(ha);
  double err = 0.0;
  for (std::size_t i = 0; i < h.data.size(); ++i) err += std::norm(h.data[i] - back.data[i]);
  const double nmse_db = 10.0 * std::log10(err / h.frobenius_sq());
  const double norm_err = std::abs(std::sqrt(ha.frobenius_sq()) / std::sqrt(h.frobenius_sq()) - 1.0);
  return {nmse_db < -200.0 && norm_err <= 1e-12,
          "round trip " + fmt("%.1f", nmse_db) + " dB, norm rel. err " + fmt("%.1e", norm_err)};
}

// ---- 8 -------------------------------------------------------------------

Outcome lr_schedule() {
  nn::LrSchedule s;  // warmup 5, total 50
  const double jump = std::max(std::abs(s.at_time(5.0 - 1e-9) - s.at_time(5.0)),
                               std::abs(s.at_time(5.0 + 1e-9) - s.at_time(5.0)));
  const bool ok = s.at(5) == s.lr_max && s.at(50) == s.lr_min && jump <= 1e-12;
  return {ok, "lr(5) " + fmt("%.6g", s.at(5)) + ", lr(50) " + fmt("%.6g", s.at(50)) + ", jump at warmup " +
                  fmt("%.1e", jump)};
}

// ---- 9, 10, 11 -----------------------------------------------------------

struct Smoke {
  channel::Dataset train, test;
  std::unique_ptr<pipeline::IdasNet<float>> model;
  std::vector<pipeline::EpochStats> history;
  double untrained_prefill_db = 0.0;
  std::map<std::size_t, pipeline::IdasNet<float>> snapshots;  // epoch -> model
};

const std::set<std::size_t> kSnapshotEpochs = {0, 1, 3, 10};

Smoke& smoke() {
  static std::optional<Smoke> s;
  if (s) return *s;
  s.emplace();
  const auto t0 = std::chrono::steady_clock::now();
  channel::ChannelGenConfig gen;
  gen.seed = 2024;
  s->train = channel::build_dataset(gen, 2000, 0);
  s->test = channel::build_dataset(gen, 500, 2000, s->train.stats);
  std::fprintf(stderr, "  [smoke] data ready in %.1f s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  pipeline::ModelConfig cfg;  // 32 x 32, M = 221 (ratio 1/8)
  s->model = std::make_unique<pipeline::IdasNet<float>>(cfg);
  s->model->init(7);
  s->untrained_prefill_db = pipeline::evaluate(*s->model, s->test.images, s->test.stats).prefill_nmse_db;
  s->snapshots.emplace(0, *s->model);

  pipeline::TrainConfig tc;
  tc.seed = 7;
  tc.batch = 100;
  tc.on_epoch = [&](const pipeline::EpochStats& e) {
    std::fprintf(stderr, "  [smoke] epoch %zu loss %.6f lr %.3g (%.1f s)\n", e.epoch, e.loss, e.lr, e.seconds);
    if (kSnapshotEpochs.count(e.epoch)) s->snapshots.emplace(e.epoch, *s->model);
  };
  s->history = pipeline::train(*s->model, s->train.images, tc);
  std::fprintf(stderr, "  [smoke] trained in %.1f s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return *s;
}

Outcome training_smoke() {
  auto& s = smoke();
  const auto r = pipeline::evaluate(*s.model, s.test.images, s.test.stats);
  const double gain = s.untrained_prefill_db - r.nmse_db;
  const double loss_ratio = s.history.back().loss / s.history.front().loss;
  return {gain >= 3.0 && loss_ratio <= 0.5,
          "held-out NMSE " + fmt("%.2f", r.nmse_db) + " dB vs untrained prefill " +
              fmt("%.2f", s.untrained_prefill_db) + " dB (gain " + fmt("%.2f", gain) + " dB), final/first loss " +
              fmt("%.3f", loss_ratio)};
}

Outcome quantization_gap() {
  auto& s = smoke();
  const auto q = quant::fit_lloyd_max(pipeline::codeword_values(*s.model, s.train.images), 6);
  pipeline::EvalOptions opt;
  opt.quantizer = &q;
  const auto r = pipeline::evaluate(*s.model, s.test.images, s.test.stats, opt);
  const double gap = *r.nmse_q_db - r.nmse_db;
  return {gap <= 0.5, "NMSE " + fmt("%.3f", r.nmse_db) + " dB, NMSE-Q " + fmt("%.3f", *r.nmse_q_db) +
                          " dB, gap " + fmt("%.3f", gap) + " dB (6 bits)"};
}

Outcome ber_suite() {
  auto& s = smoke();
  const std::size_t n_s = 1024, realizations = 50;
  const std::vector<channel::CsiImage> subset(s.test.images.begin(), s.test.images.begin() + realizations);
  std::vector<channel::SpatialChannel> truth(realizations);
  for (std::size_t i = 0; i < realizations; ++i) truth[i] = pipeline::spatial_channel(subset[i], s.test.stats, n_s);

  // Perfect CSI against the tail-probability oracle computed here.
  const std::vector<double> snr = {0.0, 5.0, 10.0};
  const std::uint64_t symbols = 100000;
  const auto perfect = pipeline::ber_simulation(truth, truth, snr, symbols, 11);
  bool oracle_ok = true, monotone = true;
  std::string detail = "perfect CSI z-scores:";
  for (std::size_t p = 0; p < snr.size(); ++p) {
    std::vector<double> pe;
    for (const auto& h : truth) {
      std::vector<double> norms(h.rows, 0.0);
      double energy = 0.0;
      for (std::size_t n = 0; n < h.rows; ++n) {
        for (std::size_t a = 0; a < h.cols; ++a) norms[n] += std::norm(h(n, a));
        energy += norms[n];
      }
      const double noise = energy / static_cast<double>(h.rows) / std::pow(10.0, snr[p] / 10.0);
      for (const double nn2 : norms) pe.push_back(oracle::tail(std::sqrt(nn2 / noise)));
    }
    double expected = 0.0, var = 0.0;
    for (std::uint64_t k = 0; k < symbols; ++k) {
      const double q = pe[k % pe.size()];
      expected += 2.0 * q;
      var += 2.0 * q * (1.0 - q);
    }
    const double bits = 2.0 * static_cast<double>(symbols);
    const double z = (perfect.points[p].ber - expected / bits) / (std::sqrt(var) / bits);
    oracle_ok = oracle_ok && std::abs(z) <= 3.0;
    detail += " " + fmt("%+.2f", z);
    if (p > 0) monotone = monotone && perfect.points[p].ber <= perfect.points[p - 1].ber;
  }

  // Reconstructed-CSI curves for every snapshot plus the final model.
  const std::vector<double> snr_all = {0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<std::pair<double, double>> nmse_ber;  // (NMSE dB, BER at 10 dB)
  std::string ranks;
  const auto add = [&](const std::string& tag, const pipeline::IdasNet<float>& m) {
    const auto rec = pipeline::reconstruct(m, subset);
    std::vector<channel::SpatialChannel> est(realizations);
    for (std::size_t i = 0; i < realizations; ++i) est[i] = pipeline::spatial_channel(rec[i], s.test.stats, n_s);
    const auto curve = pipeline::ber_simulation(truth, est, snr_all, symbols, 11);
    for (std::size_t p = 1; p < snr_all.size(); ++p) monotone = monotone && curve.points[p].ber <= curve.points[p - 1].ber;
    const double nmse = pipeline::evaluate(m, subset, s.test.stats).nmse_db;
    pipeline::EvalOptions denorm;
    denorm.domain = pipeline::NmseDomain::denormalized;
    const double nmse_d = pipeline::evaluate(m, subset, s.test.stats, denorm).nmse_db;
    nmse_ber.emplace_back(nmse, curve.points[2].ber);
    // Denormalized NMSE is printed for reference only; the ranking uses the reported domain.
    ranks += " " + tag + "(" + fmt("%.2f", nmse) + " dB [denorm " + fmt("%.2f", nmse_d) + "], " +
             fmt("%.4f", curve.points[2].ber) + ")";
  };
  for (const auto& [epoch, m] : s.snapshots) add("e" + std::to_string(epoch), m);
  add("e50", *s.model);

  bool rank_ok = true;
  for (std::size_t a = 0; a < nmse_ber.size(); ++a)
    for (std::size_t b = 0; b < nmse_ber.size(); ++b)
      if (nmse_ber[a].first < nmse_ber[b].first && nmse_ber[a].second > nmse_ber[b].second) rank_ok = false;
  detail += std::string(monotone ? "; curves monotone" : "; curve NOT monotone") + "; BER@10dB by checkpoint:" + ranks +
            (rank_ok ? " rank-consistent" : " NOT rank-consistent");
  return {oracle_ok && monotone && rank_ok && nmse_ber.size() >= 3, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"bit accounting", bit_accounting},   {"parameter counts", parameter_counts},
      {"self-information oracle", self_information}, {"gradient suite", gradients},
      {"codec identities", codec_identities}, {"Lloyd-Max", lloyd_max},
      {"DFT round trip", dft_round_trip},   {"LR schedule endpoints", lr_schedule},
      {"training smoke test", training_smoke}, {"quantization gap", quantization_gap},
      {"BER suite", ber_suite}};
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected.empty() && !selected.count(k + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2zu  %-26s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
