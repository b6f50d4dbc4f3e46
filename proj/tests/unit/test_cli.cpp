#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("idasnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(IDASNET_CLI) + " " + args + " >" + (dir_ / "stdout").string() +
                            " 2>" + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Small 8x8 dataset, fast to train on.
  std::string gen_small(const std::string& name, int count, int start = 0) const {
    const auto out = path(name);
    EXPECT_EQ(run("gen --count " + std::to_string(count) + " --start-index " + std::to_string(start) +
                  " --ns 64 --nr 8 --nc 8 --seed 3 --out " + out),
              0);
    return out;
  }

  std::string train_small(const std::string& data, const std::string& name) const {
    const auto out = path(name);
    EXPECT_EQ(run("train --data " + data + " --m 30 --texture 20 --epochs 2 --warmup 1 --batch 10 --seed 1 --out " +
                  out),
              0);
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenIsByteIdentical) {
  const auto a = gen_small("a.csid", 6);
  const auto b = gen_small("b.csid", 6);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_TRUE(fs::exists(a + ".manifest.json") || fs::exists(path("a.csid.manifest.json")) ||
              fs::exists(path("a.manifest.json")));
}

TEST_F(Cli, GenRejectsZeroCount) { EXPECT_EQ(run("gen --count 0 --out " + path("z.csid")), 2); }

TEST_F(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("gen --count 2 --bogus --out " + path("z.csid")), 2); }

TEST_F(Cli, MissingDatasetIsIoError) {
  EXPECT_EQ(run("train --data " + path("missing.csid") + " --out " + path("m.ckpt")), 1);
}

TEST_F(Cli, RefusesToOverwriteWithoutForce) {
  const auto a = gen_small("a.csid", 3);
  EXPECT_EQ(run("gen --count 3 --ns 64 --nr 8 --nc 8 --out " + a), 1);
  EXPECT_EQ(run("gen --count 3 --ns 64 --nr 8 --nc 8 --force --out " + a), 0);
}

TEST_F(Cli, RatioAndExplicitLengthAgree) {
  const auto data = path("d.csid");
  ASSERT_EQ(run("gen --count 4 --ns 64 --seed 2 --out " + data), 0);
  ASSERT_EQ(run("train --data " + data + " --sigma 1/8 --epochs 2 --warmup 1 --batch 4 --out " + path("s.ckpt")), 0);
  ASSERT_EQ(run("train --data " + data + " --m 221 --epochs 2 --warmup 1 --batch 4 --out " + path("m.ckpt")), 0);
  const auto s = nlohmann::json::parse(slurp(path("s.ckpt.summary.json")));
  const auto m = nlohmann::json::parse(slurp(path("m.ckpt.summary.json")));
  EXPECT_EQ(s.at("bits"), m.at("bits"));
  EXPECT_EQ(s.at("bits").at("total_bits").get<int>(), 16418);
}

TEST_F(Cli, EvalDimensionMismatchIsShapeError) {
  const auto train = gen_small("t.csid", 10);
  const auto ckpt = train_small(train, "c.ckpt");
  const auto other = path("big.csid");
  ASSERT_EQ(run("gen --count 2 --ns 64 --nr 16 --nc 16 --out " + other), 0);
  EXPECT_EQ(run("eval --checkpoint " + ckpt + " --data " + other + " --out " + path("e.json")), 2);
}

TEST_F(Cli, EvalWritesSummaryQuantizerAndBer) {
  const auto train = gen_small("t.csid", 10);
  const auto test = gen_small("v.csid", 5, 100);
  const auto ckpt = train_small(train, "c.ckpt");
  ASSERT_EQ(run("eval --checkpoint " + ckpt + " --data " + test + " --fit-quantizer --fit-data " + train +
                " --bits 4 --ber " + path("ber.csv") + " --snr 0,10,20 --symbols 20000 --out " + path("e.json")),
            0);
  const auto j = nlohmann::json::parse(slurp(path("e.json")));
  EXPECT_EQ(j.at("count").get<int>(), 5);
  EXPECT_GE(j.at("nmse_q_db").get<double>(), -400.0);
  EXPECT_TRUE(fs::exists(path("e.json.quantizer.json")));

  std::istringstream csv(slurp(path("ber.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "snr_db,ber,count,errors,oracle,std_error");
  double last_snr = -1e9;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string snr, ber;
    std::getline(row, snr, ',');
    std::getline(row, ber, ',');
    EXPECT_GT(std::stod(snr), last_snr);
    last_snr = std::stod(snr);
    EXPECT_GE(std::stod(ber), 0.0);
    EXPECT_LE(std::stod(ber), 0.5);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST_F(Cli, EncodeDecodeRoundTrip) {
  const auto data = gen_small("t.csid", 10);
  const auto ckpt = train_small(data, "c.ckpt");
  ASSERT_EQ(run("encode --checkpoint " + ckpt + " --data " + data + " --index 3 --out " + path("c.cwrd")), 0);
  EXPECT_EQ(slurp(path("c.cwrd")).substr(0, 8), "CSICWD01");
  ASSERT_EQ(run("decode --checkpoint " + ckpt + " --codeword " + path("c.cwrd") + " --out " + path("r.csid")), 0);
  EXPECT_EQ(slurp(path("r.csid")).substr(0, 8), "CSIDATA1");
}

TEST_F(Cli, BadSeedEnvironmentIsConfigError) {
  EXPECT_EQ(run("gen --count 2 --out " + path("x.csid") + " 2>/dev/null; IDAS_SEED=abc " +
                std::string(IDASNET_CLI) + " gen --count 2 --out " + path("y.csid")),
            2);
}
