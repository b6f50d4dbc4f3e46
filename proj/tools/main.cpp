// idasnet: dataset generation, training, evaluation and codeword I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "idasnet/channel/csi_image.hpp"
#include "idasnet/codec/codec.hpp"
#include "idasnet/nn/parallel.hpp"
#include "idasnet/pipeline/ber.hpp"
#include "idasnet/pipeline/checkpoint.hpp"
#include "idasnet/pipeline/evaluate.hpp"
#include "idasnet/pipeline/report.hpp"
#include "idasnet/pipeline/train.hpp"
#include "idasnet/quant/lloyd_max.hpp"
#include "manifest.hpp"

namespace {

using namespace idasnet;
using nlohmann::json;

std::uint64_t seed_or_env(const CLI::App& sub, std::uint64_t flag_value) {
  if (sub.count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("IDAS_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("IDAS_SEED is not an unsigned integer: '") + env + "'");
  }
  return flag_value;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::uint64_t start_index = 0;
  channel::ChannelGenConfig gen;
  std::string stats_from;
  std::string out;
  bool force = false;
};

int run_gen(const CLI::App& sub, GenArgs a) {
  a.seed = seed_or_env(sub, a.seed);
  a.gen.seed = a.seed;
  if (a.count < 1) throw ConfigError("--count must be >= 1");
  a.gen.validate();
  cli::require_writable(a.out, a.force);
  cli::RunManifest manifest("gen");
  std::optional<channel::NormStats> stats;
  if (!a.stats_from.empty()) {
    cli::require_readable(a.stats_from);
    stats = channel::read_csid(a.stats_from).stats;
    manifest.add_input(a.stats_from);
  }
  const auto ds = channel::build_dataset(a.gen, a.count, a.start_index, stats);
  channel::write_csid(a.out, ds);
  manifest.set_args({{"count", a.count},
                     {"seed", a.seed},
                     {"start_index", a.start_index},
                     {"ns", a.gen.n_s},
                     {"nr", a.gen.n_r},
                     {"nc", a.gen.n_c},
                     {"clusters", a.gen.clusters},
                     {"paths", a.gen.paths_per_cluster},
                     {"delay_spread", a.gen.delay_spread},
                     {"angle_spread", a.gen.angle_spread},
                     {"stats_from", a.stats_from},
                     {"out", a.out}});
  manifest.set_config(json::parse(channel::csid_header_json(ds)));
  manifest.add_seed("dataset", a.seed);
  manifest.add_output(a.out);
  manifest.write_all();
  std::cout << "wrote " << ds.size() << " samples to " << a.out << " (min " << ds.stats.min
            << ", max " << ds.stats.max << ")\n";
  return cli::kExitOk;
}

// ---- shared model flags ------------------------------------------------------

struct ModelArgs {
  std::string sigma;
  std::optional<std::size_t> m;
  unsigned k1 = 64;
  unsigned k2 = 10;
  int radius = 3;
  double bandwidth = 1.0;
  std::size_t texture = 224;
  std::size_t neighbors = 9;
  std::string key = "magnitude";
  std::string mask_source = "per_channel";
};

void add_model_flags(CLI::App* sub, ModelArgs& a) {
  sub->add_option("--sigma", a.sigma, "compression ratio, e.g. 1/8 or 0.125");
  sub->add_option("--m", a.m, "codeword length M (overrides the ratio rounding)");
  sub->add_option("--k1", a.k1, "bits per codeword value")->capture_default_str();
  sub->add_option("--k2", a.k2, "bits per position index")->capture_default_str();
  sub->add_option("--radius", a.radius, "Manhattan radius R")->capture_default_str();
  sub->add_option("--bandwidth", a.bandwidth, "Gaussian kernel bandwidth h")->capture_default_str();
  sub->add_option("--texture", a.texture, "texture pixels zeroed per mask")->capture_default_str();
  sub->add_option("--neighbors", a.neighbors, "sampled neighbor offsets")->capture_default_str();
  sub->add_option("--key", a.key, "ranking key")
      ->check(CLI::IsMember({"magnitude", "selfinfo"}))
      ->capture_default_str();
  sub->add_option("--mask-source", a.mask_source, "self-information source for the masks")
      ->check(CLI::IsMember({"per_channel", "broadcast"}))
      ->capture_default_str();
}

pipeline::ModelConfig model_config(const ModelArgs& a, std::size_t n_c, std::size_t n_r,
                                   codec::BitBudget& budget) {
  if (a.sigma.empty() && !a.m) throw ConfigError("give --sigma or --m");
  const double sigma = a.sigma.empty()
                           ? codec::compression_ratio(*a.m, a.k1, a.k2, n_c, n_r)
                           : codec::parse_ratio(a.sigma);
  budget = codec::codeword_budget(std::min(sigma, 1.0), a.k1, a.k2, n_c, n_r, a.m);
  pipeline::ModelConfig c;
  c.n_c = n_c;
  c.n_r = n_r;
  c.m = budget.m;
  c.k1 = a.k1;
  c.k2 = a.k2;
  c.key = codec::parse_rank_key(a.key);
  c.idas.mask_source = idas::parse_mask_source(a.mask_source);
  c.idas.selfinfo.radius = a.radius;
  c.idas.selfinfo.bandwidth = a.bandwidth;
  c.idas.selfinfo.n_texture = a.texture;
  c.idas.selfinfo.neighbor_samples = a.neighbors;
  c.validate();
  return c;
}

json bits_json(const pipeline::ModelConfig& c) {
  return {{"m", c.m},
          {"k1", c.k1},
          {"k2", c.k2},
          {"total_bits", (c.m + 1) * c.k1 + c.m * c.k2},
          {"sigma", codec::compression_ratio(c.m, c.k1, c.k2, c.n_c, c.n_r)}};
}

json params_json(const pipeline::ParamCounts& p) {
  return {{"trainable", p.trainable},
          {"non_trainable", p.non_trainable},
          {"buffers", p.buffers},
          {"total", p.total()}};
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  ModelArgs model;
  std::uint64_t seed = 1;
  std::size_t epochs = 50;
  std::size_t warmup = 5;
  std::size_t batch = 100;
  double lr_max = 2e-3;
  double lr_min = 1e-5;
  std::string out;
  std::string metrics;
  std::string summary;
  bool force = false;
};

int run_train(const CLI::App& sub, TrainArgs a) {
  a.seed = seed_or_env(sub, a.seed);
  if (a.metrics.empty()) a.metrics = a.out + ".loss.csv";
  if (a.summary.empty()) a.summary = a.out + ".summary.json";
  for (const auto& p : {a.out, a.metrics, a.summary}) cli::require_writable(p, a.force);
  cli::require_readable(a.data);
  const auto ds = channel::read_csid(a.data);

  codec::BitBudget budget;
  const auto cfg = model_config(a.model, ds.n_c, ds.n_r, budget);
  pipeline::TrainConfig tc;
  tc.schedule = {a.lr_min, a.lr_max, a.warmup, a.epochs};
  tc.batch = a.batch;
  tc.seed = a.seed;
  tc.validate(ds.size());
  tc.on_epoch = [](const pipeline::EpochStats& s) {
    std::cout << "epoch " << s.epoch << " loss " << pipeline::round_trip(s.loss) << " lr "
              << s.lr << " (" << s.seconds << " s)\n"
              << std::flush;
  };

  pipeline::IdasNet<float> model(cfg);
  model.init(a.seed);
  std::vector<pipeline::EpochStats> history;
  try {
    history = pipeline::train(model, ds.images, tc);
  } catch (const NumericError& e) {
    std::cerr << "error: training diverged: " << e.what() << "\n";
    return cli::kExitNumeric;
  }

  const json meta{{"train_seed", a.seed},
                  {"data", a.data},
                  {"epochs", a.epochs},
                  {"final_loss", history.back().loss}};
  pipeline::save_checkpoint(a.out, model, ds.stats, meta.dump());
  pipeline::write_text_atomic(a.metrics, pipeline::loss_csv(history));
  const json summary{{"bits", bits_json(cfg)},
                     {"params", params_json(model.count_parameters())},
                     {"epochs", a.epochs},
                     {"first_loss", history.front().loss},
                     {"final_loss", history.back().loss}};
  pipeline::write_text_atomic(a.summary, summary.dump(2) + "\n");

  cli::RunManifest manifest("train");
  manifest.set_args({{"data", a.data},
                     {"sigma", a.model.sigma},
                     {"m", cfg.m},
                     {"k1", a.model.k1},
                     {"k2", a.model.k2},
                     {"radius", a.model.radius},
                     {"bandwidth", a.model.bandwidth},
                     {"texture", a.model.texture},
                     {"neighbors", a.model.neighbors},
                     {"key", a.model.key},
                     {"mask_source", a.model.mask_source},
                     {"seed", a.seed},
                     {"epochs", a.epochs},
                     {"warmup", a.warmup},
                     {"batch", a.batch},
                     {"lr_max", a.lr_max},
                     {"lr_min", a.lr_min},
                     {"out", a.out},
                     {"metrics", a.metrics},
                     {"summary", a.summary},
                     {"threads", nn::max_threads()}});
  manifest.set_config(json::parse(cfg.to_json()));
  manifest.add_seed("train", a.seed);
  manifest.add_input(a.data);
  for (const auto& p : {a.out, a.metrics, a.summary}) manifest.add_output(p);
  manifest.write_all();
  std::cout << "final loss " << pipeline::round_trip(history.back().loss) << "; wrote " << a.out
            << "\n";
  return cli::kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string quantizer;
  bool fit_quantizer = false;
  std::string fit_data;
  std::string quantizer_out;
  unsigned bits = 6;
  std::string ber;
  std::vector<double> snr = {0, 5, 10, 15, 20};
  std::uint64_t symbols = 100000;
  std::size_t ber_samples = 50;
  std::size_t ns = 0;
  std::string domain = "normalized";
  std::uint64_t seed = 1;
  bool force = false;
};

void check_dims(const pipeline::ModelConfig& c, const channel::Dataset& ds, const std::string& path) {
  if (c.n_c != ds.n_c || c.n_r != ds.n_r) {
    throw ShapeError("checkpoint expects " + std::to_string(c.n_c) + "x" + std::to_string(c.n_r) +
                     " images, " + path + " holds " + std::to_string(ds.n_c) + "x" +
                     std::to_string(ds.n_r));
  }
}

int run_eval(const CLI::App& sub, EvalArgs a) {
  a.seed = seed_or_env(sub, a.seed);
  if (a.fit_quantizer && !a.quantizer.empty()) {
    throw ConfigError("--fit-quantizer and --quantizer are exclusive");
  }
  if (a.fit_quantizer && a.quantizer_out.empty()) a.quantizer_out = a.out + ".quantizer.json";
  std::vector<std::string> outputs = {a.out};
  if (!a.quantizer_out.empty()) outputs.push_back(a.quantizer_out);
  if (!a.ber.empty()) outputs.push_back(a.ber);
  for (const auto& p : outputs) cli::require_writable(p, a.force);
  cli::require_readable(a.checkpoint);
  cli::require_readable(a.data);

  cli::RunManifest manifest("eval");
  auto ck = pipeline::load_checkpoint(a.checkpoint);
  const auto& model = *ck.model;
  const auto ds = channel::read_csid(a.data);
  check_dims(model.config(), ds, a.data);
  manifest.add_input(a.checkpoint);
  manifest.add_input(a.data);

  std::optional<quant::LloydMaxQuantizer> q;
  if (!a.quantizer.empty()) {
    cli::require_readable(a.quantizer);
    q = quant::read_quantizer(a.quantizer);
    manifest.add_input(a.quantizer);
  } else if (a.fit_quantizer) {
    const std::string src = a.fit_data.empty() ? a.data : a.fit_data;
    cli::require_readable(src);
    const auto fit_ds = src == a.data ? ds : channel::read_csid(src);
    check_dims(model.config(), fit_ds, src);
    q = quant::fit_lloyd_max(pipeline::codeword_values(model, fit_ds.images), a.bits);
    quant::write_quantizer(a.quantizer_out, *q);
    if (src != a.data) manifest.add_input(src);
  }

  pipeline::EvalOptions opt;
  opt.domain = pipeline::parse_nmse_domain(a.domain);
  opt.quantizer = q ? &*q : nullptr;
  const auto r = pipeline::evaluate(model, ds.images, ck.stats, opt);

  json summary{{"count", r.count},
               {"domain", pipeline::to_string(opt.domain)},
               {"nmse_db", r.nmse_db},
               {"nmse_q_db", r.nmse_q_db ? json(*r.nmse_q_db) : json(nullptr)},
               {"prefill_nmse_db", r.prefill_nmse_db},
               {"params", params_json(model.count_parameters())},
               {"bits", bits_json(model.config())}};
  if (q) summary["quantizer_bits"] = q->bits;

  if (!a.ber.empty()) {
    const std::size_t n = std::min(a.ber_samples, ds.size());
    if (n == 0) throw ConfigError("--ber-samples must be >= 1");
    std::size_t n_s = a.ns;
    if (n_s == 0) n_s = ds.generator ? ds.generator->n_s : 1024;
    std::vector<channel::CsiImage> subset(ds.images.begin(),
                                          ds.images.begin() + static_cast<std::ptrdiff_t>(n));
    const auto rec = pipeline::reconstruct(model, subset, opt.quantizer);
    std::vector<channel::SpatialChannel> truth(n), est(n);
    nn::parallel_for(n, [&](std::size_t i) {
      truth[i] = pipeline::spatial_channel(subset[i], ck.stats, n_s);
      est[i] = pipeline::spatial_channel(rec[i], ck.stats, n_s);
    });
    std::sort(a.snr.begin(), a.snr.end());
    const auto curve = pipeline::ber_simulation(truth, est, a.snr, a.symbols, a.seed);
    pipeline::write_text_atomic(a.ber, pipeline::ber_csv(curve));
    summary["ber_samples"] = n;
    manifest.add_seed("ber", a.seed);
  }
  pipeline::write_text_atomic(a.out, summary.dump(2) + "\n");

  manifest.set_args({{"checkpoint", a.checkpoint},
                     {"data", a.data},
                     {"out", a.out},
                     {"quantizer", a.quantizer},
                     {"fit_quantizer", a.fit_quantizer},
                     {"fit_data", a.fit_data},
                     {"quantizer_out", a.quantizer_out},
                     {"bits", a.bits},
                     {"ber", a.ber},
                     {"snr", a.snr},
                     {"symbols", a.symbols},
                     {"ber_samples", a.ber_samples},
                     {"ns", a.ns},
                     {"nmse_domain", a.domain},
                     {"seed", a.seed},
                     {"threads", nn::max_threads()}});
  manifest.set_config(json::parse(model.config().to_json()));
  for (const auto& p : outputs) manifest.add_output(p);
  manifest.write_all();
  std::cout << "NMSE " << r.nmse_db << " dB";
  if (r.nmse_q_db) std::cout << ", NMSE-Q " << *r.nmse_q_db << " dB";
  std::cout << " over " << r.count << " samples\n";
  return cli::kExitOk;
}

// ---- encode / decode -------------------------------------------------------

struct CodecArgs {
  std::string checkpoint;
  std::string data;
  std::size_t index = 0;
  std::string codeword;
  std::string out;
  bool force = false;
};

int run_encode(CodecArgs a) {
  cli::require_writable(a.out, a.force);
  cli::require_readable(a.checkpoint);
  cli::require_readable(a.data);
  auto ck = pipeline::load_checkpoint(a.checkpoint);
  const auto ds = channel::read_csid(a.data);
  check_dims(ck.model->config(), ds, a.data);
  if (a.index >= ds.size()) throw ConfigError("--index beyond the dataset");
  const std::size_t idx[] = {a.index};
  const auto cws = ck.model->encode(pipeline::make_batch<float>(ds.images, idx));
  codec::write_cwrd(a.out, cws.front());
  cli::RunManifest manifest("encode");
  manifest.set_args({{"checkpoint", a.checkpoint}, {"data", a.data}, {"index", a.index},
                     {"out", a.out}});
  manifest.add_input(a.checkpoint);
  manifest.add_input(a.data);
  manifest.add_output(a.out);
  manifest.write_all();
  std::cout << "encoded sample " << a.index << ": M = " << cws.front().m() << ", "
            << cws.front().total_bits() << " bits\n";
  return cli::kExitOk;
}

int run_decode(CodecArgs a) {
  cli::require_writable(a.out, a.force);
  cli::require_readable(a.checkpoint);
  cli::require_readable(a.codeword);
  auto ck = pipeline::load_checkpoint(a.checkpoint);
  const auto cw = codec::read_cwrd(a.codeword);
  const auto& cfg = ck.model->config();
  if (cw.n_c != cfg.n_c || cw.n_r != cfg.n_r) throw ShapeError("codeword dims differ from checkpoint");
  const auto y = ck.model->decode({cw});
  channel::Dataset out;
  out.stats = ck.stats;
  out.n_c = cfg.n_c;
  out.n_r = cfg.n_r;
  channel::CsiImage img(cfg.n_c, cfg.n_r);
  std::copy(y.storage().begin(), y.storage().end(), img.values.begin());
  out.images.push_back(std::move(img));
  channel::write_csid(a.out, out);
  cli::RunManifest manifest("decode");
  manifest.set_args({{"checkpoint", a.checkpoint}, {"codeword", a.codeword}, {"out", a.out}});
  manifest.add_input(a.checkpoint);
  manifest.add_input(a.codeword);
  manifest.add_output(a.out);
  manifest.write_all();
  std::cout << "decoded " << a.codeword << " to " << a.out << "\n";
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IdasNet CSI compression: gen, train, eval, encode, decode"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker cap (0 = hardware default)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a synthetic CSID v1 dataset");
  g->add_option("--count", gen.count, "number of samples")->required();
  g->add_option("--seed", gen.seed, "dataset seed (env IDAS_SEED as fallback)")->capture_default_str();
  g->add_option("--start-index", gen.start_index, "index of the first sample")->capture_default_str();
  g->add_option("--ns", gen.gen.n_s, "subcarriers N_s")->capture_default_str();
  g->add_option("--nr", gen.gen.n_r, "BS antennas N_r")->capture_default_str();
  g->add_option("--nc", gen.gen.n_c, "kept delay rows N_c")->capture_default_str();
  g->add_option("--clusters", gen.gen.clusters)->capture_default_str();
  g->add_option("--paths", gen.gen.paths_per_cluster, "paths per cluster")->capture_default_str();
  g->add_option("--delay-spread", gen.gen.delay_spread, "intra-cluster delay spread (bins)")
      ->capture_default_str();
  g->add_option("--angle-spread", gen.gen.angle_spread, "intra-cluster angle spread (rad)")
      ->capture_default_str();
  g->add_option("--stats-from", gen.stats_from, "reuse min/max of this CSID file");
  g->add_option("--out", gen.out, "output CSID file")->required();
  g->add_flag("--force", gen.force, "overwrite existing outputs");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model on a CSID dataset");
  t->add_option("--data", tr.data, "training CSID file")->required();
  add_model_flags(t, tr.model);
  t->add_option("--seed", tr.seed, "init/shuffle seed (env IDAS_SEED as fallback)")->capture_default_str();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--warmup", tr.warmup, "warmup epochs")->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--lr-max", tr.lr_max)->capture_default_str();
  t->add_option("--lr-min", tr.lr_min)->capture_default_str();
  t->add_option("--out", tr.out, "checkpoint path")->required();
  t->add_option("--metrics", tr.metrics, "per-epoch CSV (default <out>.loss.csv)");
  t->add_option("--summary", tr.summary, "summary JSON (default <out>.summary.json)");
  t->add_flag("--force", tr.force, "overwrite existing outputs");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--data", ev.data, "evaluation CSID file")->required();
  e->add_option("--out", ev.out, "summary JSON")->required();
  e->add_option("--quantizer", ev.quantizer, "quantizer JSON for NMSE-Q");
  e->add_flag("--fit-quantizer", ev.fit_quantizer, "fit a Lloyd-Max quantizer first");
  e->add_option("--fit-data", ev.fit_data, "CSID file for quantizer fitting (default --data)");
  e->add_option("--quantizer-out", ev.quantizer_out, "fitted quantizer (default <out>.quantizer.json)");
  e->add_option("--bits", ev.bits, "quantizer bits")->capture_default_str();
  e->add_option("--ber", ev.ber, "write a BER curve CSV here");
  e->add_option("--snr", ev.snr, "SNR points in dB")->delimiter(',')->capture_default_str();
  e->add_option("--symbols", ev.symbols, "QPSK symbols per SNR point")->capture_default_str();
  e->add_option("--ber-samples", ev.ber_samples, "channel realizations used for BER")
      ->capture_default_str();
  e->add_option("--ns", ev.ns, "subcarriers for BER (default from the dataset)");
  e->add_option("--nmse-domain", ev.domain, "normalized|denormalized")
      ->check(CLI::IsMember({"normalized", "denormalized"}))
      ->capture_default_str();
  e->add_option("--seed", ev.seed, "BER noise seed (env IDAS_SEED as fallback)")->capture_default_str();
  e->add_flag("--force", ev.force, "overwrite existing outputs");

  CodecArgs enc;
  auto* en = app.add_subcommand("encode", "write the CWRD v1 codeword of one sample");
  en->add_option("--checkpoint", enc.checkpoint)->required();
  en->add_option("--data", enc.data)->required();
  en->add_option("--index", enc.index)->capture_default_str();
  en->add_option("--out", enc.out)->required();
  en->add_flag("--force", enc.force);

  CodecArgs dec;
  auto* de = app.add_subcommand("decode", "reconstruct a CWRD v1 codeword into a CSID file");
  de->add_option("--checkpoint", dec.checkpoint)->required();
  de->add_option("--codeword", dec.codeword)->required();
  de->add_option("--out", dec.out)->required();
  de->add_flag("--force", dec.force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    nn::set_max_threads(threads);
    if (g->parsed()) return run_gen(*g, gen);
    if (t->parsed()) return run_train(*t, tr);
    if (e->parsed()) return run_eval(*e, ev);
    if (en->parsed()) return run_encode(enc);
    if (de->parsed()) return run_decode(dec);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitUsage;
  } catch (const ShapeError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitUsage;
  } catch (const DomainError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitUsage;
  } catch (const NumericError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitNumeric;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitIo;
  }
  return cli::kExitUsage;
}
