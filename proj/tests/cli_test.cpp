#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "convnade/data/loaders.hpp"
#include "convnade/io/raster.hpp"
#include "convnade/numerics/random.hpp"
#include "support/temp_dir.hpp"

using namespace convnade;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public convnade::testing::TempDir {
 protected:
  void SetUp() override {
    TempDir::SetUp();
    // 60 blurry 16x16 blobs so that both likelihoods have something to learn
    Rng rng(11);
    std::vector<Image> imgs;
    for (int n = 0; n < 60; ++n) {
      Image img(1, 16);
      const double cx = 4 + 8 * rng.uniform(), cy = 4 + 8 * rng.uniform();
      for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 16; ++x) {
          const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
          img.at(0, y, x) = dx * dx + dy * dy < 16 ? 0.9 : 0.1;
        }
      imgs.push_back(img);
    }
    write_idx(path("images.idx"), imgs);
    dataset_ = "mnist-idx:" + path("images.idx");
  }

  CliResult cli(const std::string& args) const {
    const std::string cmd = std::string(CONVNADE_CLI_PATH) + " " + args + " >" + path("stdout") + " 2>" +
                            path("stderr");
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(path("stdout")), slurp(path("stderr"))};
  }

  std::string data_flags() const { return "--dataset " + dataset_ + " --train-count 40 --val-count 10 --test-count 10"; }

  std::string train_flags(const std::string& out, int seed = 7) const {
    return "train --model convnade " + data_flags() + " --seed " + std::to_string(seed) +
           " --side 16 --compact --patch ld --patch-size 16 --epochs 2 --batch-size 10 --lr 1e-3 --out " +
           path(out);
  }

  std::string dataset_;
};

}  // namespace

TEST_F(Cli, NonPowerOfTwoLdPatchIsUsageError) {
  const auto r = cli("train " + data_flags() + " --patch ld --patch-size 100 --out " + path("never"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("patch size must be a power of two"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(path("never")));
}

TEST_F(Cli, BadFlagsAreUsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("train --dataset " + dataset_ + " --model pixelcnn").code, 2);
  EXPECT_EQ(cli("train --dataset jpeg:" + path("x")).code, 2);
  EXPECT_EQ(cli("patch --kind ld --m 2 --k 5").code, 2);
  EXPECT_EQ(cli("patch --kind random --d 1000 --p 10").code, 2);
}

TEST_F(Cli, MissingInputsAreRuntimeErrors) {
  EXPECT_EQ(cli("train --dataset mnist-idx:" + path("absent") + " --out " + path("o")).code, 1);
  EXPECT_EQ(cli("eval --checkpoint " + path("absent.ckpt") + " " + data_flags()).code, 1);
}

TEST_F(Cli, TrainWritesCheckpointAndCurves) {
  const auto r = cli(train_flags("run"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(path("run/model.ckpt")));
  const std::string csv = slurp(path("run/curves.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.rfind("epoch,train_loss,val_loss\n1,", 0), 0u);
  EXPECT_NE(r.out.find("final train"), std::string::npos);
}

TEST_F(Cli, IdenticalFlagsGiveIdenticalArtifacts) {
  ASSERT_EQ(cli(train_flags("a")).code, 0);
  ASSERT_EQ(cli(train_flags("b")).code, 0);
  EXPECT_EQ(read_bytes("a/model.ckpt"), read_bytes("b/model.ckpt"));
  EXPECT_EQ(read_bytes("a/curves.csv"), read_bytes("b/curves.csv"));

  const std::string rec = "reconstruct --checkpoint " + path("a/model.ckpt") + " " + data_flags() + " --count 3";
  for (const std::string mode : {"mean", "sample"}) {
    ASSERT_EQ(cli(rec + " --mode " + mode + " --seed 5 --out " + path(mode + "1")).code, 0);
    ASSERT_EQ(cli(rec + " --mode " + mode + " --seed 5 --out " + path(mode + "2")).code, 0);
    for (int i = 0; i < 3; ++i) {
      const std::string name = "/panel_00" + std::to_string(i) + ".pgm";
      const auto first = read_bytes(mode + "1" + name);
      EXPECT_FALSE(first.empty());
      EXPECT_EQ(first, read_bytes(mode + "2" + name)) << mode << name;
    }
  }
}

TEST_F(Cli, DifferentSeedChangesCheckpoint) {
  ASSERT_EQ(cli(train_flags("a")).code, 0);
  ASSERT_EQ(cli(train_flags("b", 8)).code, 0);
  EXPECT_NE(read_bytes("a/model.ckpt"), read_bytes("b/model.ckpt"));
}

TEST_F(Cli, EvalReportsLdAndRandomPatches) {
  ASSERT_EQ(cli(train_flags("run")).code, 0);
  const std::string eval = "eval --checkpoint " + path("run/model.ckpt") + " " + data_flags() + " --json";
  const auto ld1 = cli(eval), ld2 = cli(eval);
  ASSERT_EQ(ld1.code, 0) << ld1.err;
  EXPECT_EQ(ld1.out, ld2.out);
  const auto ld = nlohmann::json::parse(ld1.out);
  EXPECT_EQ(ld["patch"], "ld");
  EXPECT_EQ(ld["losses"].size(), 1u);

  const auto rnd = cli(eval + " --patch random --patch-count 5");
  ASSERT_EQ(rnd.code, 0) << rnd.err;
  const auto j = nlohmann::json::parse(rnd.out);
  ASSERT_EQ(j["losses"].size(), 5u);
  double sum = 0;
  for (const auto& v : j["losses"]) sum += v.get<double>();
  EXPECT_NEAR(j["mean"].get<double>(), sum / 5, 1e-12);
  EXPECT_EQ(j["seeds"], nlohmann::json({0, 1, 2, 3, 4}));

  const auto text = cli("eval --checkpoint " + path("run/model.ckpt") + " " + data_flags() + " --patch random");
  EXPECT_NE(text.out.find("mean"), std::string::npos);
}

TEST_F(Cli, CorruptedCheckpointIsRefused) {
  ASSERT_EQ(cli(train_flags("run")).code, 0);
  auto bytes = read_bytes("run/model.ckpt");
  bytes[bytes.size() - 12] ^= 0x40;
  write_bytes("bad.ckpt", bytes);
  const auto r = cli("eval --checkpoint " + path("bad.ckpt") + " " + data_flags());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("CRC"), std::string::npos) << r.err;
}

TEST_F(Cli, FullPatchReconstructionEqualsOriginal) {
  ASSERT_EQ(cli(train_flags("run")).code, 0);
  ASSERT_EQ(cli("reconstruct --checkpoint " + path("run/model.ckpt") + " " + data_flags() +
                " --patch full --count 2 --out " + path("rec"))
                .code,
            0);
  const auto bytes = read_bytes("rec/panel_000.pgm");
  const std::string head = "P5\n50 16\n255\n";
  ASSERT_EQ(bytes.size(), head.size() + 50 * 16);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x) {
      const auto at = [&](std::size_t col) { return bytes[head.size() + y * 50 + col]; };
      EXPECT_EQ(at(x), at(34 + x));
      EXPECT_EQ(at(x), at(17 + x));
    }
}

TEST_F(Cli, ColorModelWritesPngPanels) {
  std::filesystem::create_directories(path("png"));
  Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    Raster r(8, 8, 3);
    for (auto& b : r.bytes) b = static_cast<std::uint8_t>(rng.below(256));
    char name[16];
    std::snprintf(name, sizeof name, "%02d.png", i);
    write_png(path("png/" + std::string(name)), r);
  }
  const std::string data = "--dataset png-dir:" + path("png") + " --train-count 8 --val-count 2 --test-count 2";
  ASSERT_EQ(cli("train --model convnade-beta-color " + data +
                " --side 16 --compact --patch random --patch-size 16 --epochs 1 --batch-size 4 --out " + path("run"))
                .code,
            0);
  ASSERT_EQ(cli("reconstruct --checkpoint " + path("run/model.ckpt") + " " + data + " --out " + path("rec")).code, 0);
  const auto bytes = read_bytes("rec/panel_001.png");
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(bytes[1], 'P');
  EXPECT_FALSE(std::filesystem::exists(path("rec/panel_002.png")));
}

TEST_F(Cli, LdPatchFiles) {
  ASSERT_EQ(cli("patch --kind ld --m 2 --k 2 --out " + path("small")).code, 0);
  EXPECT_EQ(slurp(path("small.txt")), "# kind=ld P=4 m=2 seed=0\n2\n7\n12\n13\n");
  const auto pgm = read_bytes("small.pgm");
  const std::string head = "P5\n4 4\n255\n";
  ASSERT_EQ(pgm.size(), head.size() + 16);
  for (std::size_t i = 0; i < 16; ++i) {
    const bool observed = i == 1 || i == 6 || i == 11 || i == 12;
    EXPECT_EQ(pgm[head.size() + i], observed ? 255 : 0) << i;
  }

  ASSERT_EQ(cli("patch --kind ld --m 5 --k 7 --out " + path("p1")).code, 0);
  ASSERT_EQ(cli("patch --kind ld --m 5 --k 7 --out " + path("p2")).code, 0);
  const std::string text = slurp(path("p1.txt"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 129);
  EXPECT_EQ(text, slurp(path("p2.txt")));
}

TEST_F(Cli, RandomPatchFilesAreReproducible) {
  ASSERT_EQ(cli("patch --kind random --d 1024 --p 128 --seed 1 --out " + path("r1")).code, 0);
  ASSERT_EQ(cli("patch --kind random --d 1024 --p 128 --seed 1 --out " + path("r2")).code, 0);
  EXPECT_EQ(read_bytes("r1.txt"), read_bytes("r2.txt"));
  EXPECT_EQ(read_bytes("r1.pgm"), read_bytes("r2.pgm"));
  const std::string text = slurp(path("r1.txt"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 129);
}
