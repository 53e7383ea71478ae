#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "convnade/convnade.hpp"

using namespace convnade;
namespace fs = std::filesystem;

namespace {

// Raised for bad flag values found after parsing; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataFlags {
  std::string dataset;
  std::size_t train = 0, val = 0, test = 0;
  std::uint64_t split_seed = 42;

  void add(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "mnist-idx:<images>[,<labels>] | png-dir:<dir> | fer-csv:<file>")
        ->required();
    cmd->add_option("--train-count", train, "training images (0 = 80% of the source)");
    cmd->add_option("--val-count", val, "validation images (0 = 10%)");
    cmd->add_option("--test-count", test, "test images (0 = the rest)");
    cmd->add_option("--split-seed", split_seed, "shuffle seed for sources without a canonical split");
  }

  DatasetSpec spec() const {
    try {
      return parse_dataset_spec(dataset);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  Splits load(const DatasetSpec& spec, Likelihood likelihood, std::size_t side) const {
    const Dataset ds = prepare(load_dataset(spec), likelihood, side);
    SplitCounts counts = default_counts(ds.size());
    if (train || val || test) counts = {train, val, test};
    return split(ds, counts, split_seed);
  }
};

Likelihood likelihood_of(ModelKind kind) {
  return kind == ModelKind::convnade_beta_color ? Likelihood::beta : Likelihood::bernoulli;
}

PatchKind patch_kind_flag(const std::string& s) {
  try {
    return parse_patch_kind(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

PixelPatch checked_patch(PatchKind kind, std::size_t size, std::size_t side, std::uint64_t seed) {
  try {
    return make_patch(kind, size, side, seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------- train

struct TrainFlags {
  std::string model = "convnade";
  DataFlags data;
  std::string patch = "random";
  std::size_t side = 32;
  std::vector<std::size_t> hidden;
  bool compact = false;
  std::string out = ".";
  bool json = false;
  TrainConfig cfg;
};

void add_train(CLI::App& app, TrainFlags& f) {
  auto* cmd = app.add_subcommand("train", "train a model and write model.ckpt and curves.csv");
  cmd->add_option("--model", f.model, "nade | deepnade | convnade | convnade-beta-color")
      ->check(CLI::IsMember({"nade", "deepnade", "convnade", "convnade-beta-color"}));
  f.data.add(cmd);
  cmd->add_option("--patch", f.patch, "random | ld")->check(CLI::IsMember({"random", "ld"}));
  cmd->add_option("--patch-size", f.cfg.patch_size, "observed pixels");
  cmd->add_option("--patch-seed", f.cfg.patch_seed, "random patch seed");
  cmd->add_option("--epochs", f.cfg.epochs);
  cmd->add_option("--batch-size", f.cfg.batch_size);
  cmd->add_option("--lr", f.cfg.learning_rate);
  cmd->add_option("--dropout", f.cfg.dropout_rate)->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--seed", f.cfg.seed, "initialization, shuffling and dropout seed");
  cmd->add_option("--side", f.side, "image side after resizing");
  cmd->add_option("--hidden", f.hidden, "hidden layer widths for nade / deepnade")->delimiter(',');
  cmd->add_flag("--compact", f.compact, "16-map convolutional stack");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--json", f.json);
}

int run_train(TrainFlags& f) {
  ModelSpec spec = ModelSpec::defaults(parse_model_kind(f.model), f.side, f.compact);
  if (!f.hidden.empty()) {
    if (spec.is_conv()) throw UsageError("--hidden applies to nade and deepnade only");
    if (spec.kind == ModelKind::nade && f.hidden.size() != 1) throw UsageError("nade takes one hidden width");
    spec.hidden = f.hidden;
  }
  f.cfg.patch_kind = patch_kind_flag(f.patch);
  checked_patch(f.cfg.patch_kind, f.cfg.patch_size, f.side, f.cfg.patch_seed);
  if (f.cfg.batch_size == 0) throw UsageError("batch size must be at least 1");
  const DatasetSpec source = f.data.spec();

  const Splits sp = f.data.load(source, likelihood_of(spec.kind), f.side);
  Rng init(stream_seed(f.cfg.seed, SeedStream::init));
  auto model = make_model<float>(spec, init);
  Checkpoint ck;
  ck.spec = spec;
  ck.config = f.cfg;
  std::visit(
      [&](auto& m) {
        ck.history = train(m, sp.train, sp.validation, f.cfg, [&](const LossRecord& r) {
          if (!f.json) std::printf("epoch %zu  train %.6f  val %.6f\n", r.epoch, r.train_loss, r.val_loss);
          std::fflush(stdout);
        });
        ck.parameters = flatten_parameters(m.parameters());
      },
      model);
  ck.epoch = ck.history.size();

  fs::create_directories(f.out);
  const std::string ckpt = (fs::path(f.out) / "model.ckpt").string();
  const std::string csv = (fs::path(f.out) / "curves.csv").string();
  save_checkpoint(ckpt, ck);
  write_file_atomic(csv, curves_csv(ck.history));

  const LossRecord last = ck.history.empty() ? LossRecord{} : ck.history.back();
  if (f.json) {
    print_json({{"checkpoint", ckpt},
                {"curves", csv},
                {"epochs", ck.epoch},
                {"train_loss", last.train_loss},
                {"val_loss", last.val_loss}});
  } else {
    std::printf("final train %.6f  val %.6f\nwrote %s and %s\n", last.train_loss, last.val_loss, ckpt.c_str(),
                csv.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  std::string checkpoint;
  DataFlags data;
  std::string patch;
  std::size_t patch_size = 0;
  std::optional<std::uint64_t> patch_seed;
  std::size_t patch_count = 5;
  bool json = false;
};

void add_eval(CLI::App& app, EvalFlags& f) {
  auto* cmd = app.add_subcommand("eval", "test-split patch loss of a checkpoint");
  cmd->add_option("--checkpoint", f.checkpoint)->required();
  f.data.add(cmd);
  cmd->add_option("--patch", f.patch, "random | ld (default: as trained)")->check(CLI::IsMember({"random", "ld"}));
  cmd->add_option("--patch-size", f.patch_size, "default: as trained");
  cmd->add_option("--patch-seed", f.patch_seed, "first random patch seed (default: as trained)");
  cmd->add_option("--patch-count", f.patch_count, "random patches to average");
  cmd->add_flag("--json", f.json);
}

int run_eval(EvalFlags& f) {
  const DatasetSpec source = f.data.spec();
  if (f.patch_count == 0) throw UsageError("--patch-count must be positive");
  const Checkpoint ck = load_checkpoint(f.checkpoint);
  TrainConfig cfg = ck.config;
  if (!f.patch.empty()) cfg.patch_kind = patch_kind_flag(f.patch);
  if (f.patch_size) cfg.patch_size = f.patch_size;
  if (f.patch_seed) cfg.patch_seed = *f.patch_seed;
  cfg.random_patch_count = f.patch_count;
  checked_patch(cfg.patch_kind, cfg.patch_size, ck.spec.side, cfg.patch_seed);

  const auto model = restore_model<float>(ck);
  const Splits sp = f.data.load(source, likelihood_of(ck.spec.kind), ck.spec.side);
  const EvalReport r = std::visit([&](const auto& m) { return evaluate(m, sp.test, cfg); }, model);

  if (f.json) {
    nlohmann::json j = {{"patch", std::string(to_string(r.kind))},
                        {"patch_size", cfg.patch_size},
                        {"images", sp.test.size()},
                        {"losses", r.losses},
                        {"mean", r.mean}};
    if (!r.seeds.empty()) j["seeds"] = r.seeds;
    print_json(j);
  } else if (r.kind == PatchKind::low_discrepancy) {
    std::printf("ld patch (%zu pixels) loss %.6f over %zu images\n", cfg.patch_size, r.mean, sp.test.size());
  } else {
    for (std::size_t i = 0; i < r.losses.size(); ++i)
      std::printf("random patch seed %llu  loss %.6f\n", static_cast<unsigned long long>(r.seeds[i]), r.losses[i]);
    std::printf("mean %.6f over %zu images\n", r.mean, sp.test.size());
  }
  return 0;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructFlags {
  std::string checkpoint;
  DataFlags data;
  std::string patch;
  std::size_t patch_size = 0;
  std::optional<std::uint64_t> patch_seed;
  std::string mode = "mean";
  std::uint64_t seed = 0;
  std::size_t count = 8;
  std::string out = ".";
};

void add_reconstruct(CLI::App& app, ReconstructFlags& f) {
  auto* cmd = app.add_subcommand("reconstruct", "write original | masked | reconstruction panels");
  cmd->add_option("--checkpoint", f.checkpoint)->required();
  f.data.add(cmd);
  cmd->add_option("--patch", f.patch, "random | ld | full (default: as trained)")
      ->check(CLI::IsMember({"random", "ld", "full"}));
  cmd->add_option("--patch-size", f.patch_size, "default: as trained");
  cmd->add_option("--patch-seed", f.patch_seed, "default: as trained");
  cmd->add_option("--mode", f.mode, "mean | sample")->check(CLI::IsMember({"mean", "sample"}));
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--count", f.count, "test images to reconstruct");
  cmd->add_option("--out", f.out, "output directory");
}

int run_reconstruct(ReconstructFlags& f) {
  const DatasetSpec source = f.data.spec();
  const FillMode mode = parse_fill_mode(f.mode);
  const Checkpoint ck = load_checkpoint(f.checkpoint);
  const std::size_t side = ck.spec.side;
  PixelPatch patch;
  if (f.patch == "full") {
    patch = full_patch(side * side);
  } else {
    const PatchKind kind = f.patch.empty() ? ck.config.patch_kind : patch_kind_flag(f.patch);
    patch = checked_patch(kind, f.patch_size ? f.patch_size : ck.config.patch_size, side,
                          f.patch_seed.value_or(ck.config.patch_seed));
  }

  const auto model = restore_model<float>(ck);
  const Splits sp = f.data.load(source, likelihood_of(ck.spec.kind), side);
  const std::vector<Image> inputs(sp.test.begin(), sp.test.begin() + std::min(f.count, sp.test.size()));
  Rng rng(stream_seed(f.seed, SeedStream::sample));
  const auto recon = std::visit([&](const auto& m) { return reconstruct(m, inputs, patch, mode, rng); }, model);

  fs::create_directories(f.out);
  const Mask mask = make_mask(patch, side);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Raster panel = side_by_side(inputs[i], recon[i], mask);
    char name[32];
    std::snprintf(name, sizeof name, "panel_%03zu.%s", i, panel.channels == 1 ? "pgm" : "png");
    const std::string path = (fs::path(f.out) / name).string();
    if (panel.channels == 1) write_pgm(path, panel);
    else write_png(path, panel);
  }
  std::printf("wrote %zu panels to %s\n", inputs.size(), f.out.c_str());
  return 0;
}

// ---------------------------------------------------------------- patch

struct PatchFlags {
  std::string kind = "ld";
  std::optional<int> m, k;
  std::optional<std::size_t> d, p;
  std::uint64_t seed = 0;
  std::string out = "patch";
};

void add_patch(CLI::App& app, PatchFlags& f) {
  auto* cmd = app.add_subcommand("patch", "write a patch index file and its mask image");
  cmd->add_option("--kind", f.kind, "ld | random")->check(CLI::IsMember({"ld", "random"}));
  cmd->add_option("--m", f.m, "ld: image side 2^m")->check(CLI::Range(0, 15));
  cmd->add_option("--k", f.k, "ld: 2^k points")->check(CLI::Range(0, 30));
  cmd->add_option("--d", f.d, "random: pixel count (a perfect square)");
  cmd->add_option("--p", f.p, "random: patch size");
  cmd->add_option("--seed", f.seed, "random: seed");
  cmd->add_option("--out", f.out, "output prefix; writes <out>.txt and <out>.pgm");
}

int run_patch(PatchFlags& f) {
  PixelPatch patch;
  std::size_t side = 0;
  try {
    if (f.kind == "ld") {
      if (!f.m || !f.k) throw UsageError("ld patches need --m and --k");
      patch = ld_patch(*f.m, *f.k);
      side = std::size_t{1} << *f.m;
    } else {
      if (!f.d || !f.p) throw UsageError("random patches need --d and --p");
      side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(*f.d))));
      if (side * side != *f.d) throw UsageError("--d must be a perfect square");
      patch = random_patch(*f.d, *f.p, f.seed);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_patch_file(f.out + ".txt", patch);
  write_pgm(f.out + ".pgm", mask_raster(make_mask(patch, side)));
  std::printf("%zu indices, wrote %s.txt and %s.pgm\n", patch.size(), f.out.c_str(), f.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ConvNADE patch-conditioned image models"};
  app.require_subcommand(1);
  TrainFlags train_flags;
  EvalFlags eval_flags;
  ReconstructFlags recon_flags;
  PatchFlags patch_flags;
  add_train(app, train_flags);
  add_eval(app, eval_flags);
  add_reconstruct(app, recon_flags);
  add_patch(app, patch_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("train")) return run_train(train_flags);
    if (app.got_subcommand("eval")) return run_eval(eval_flags);
    if (app.got_subcommand("reconstruct")) return run_reconstruct(recon_flags);
    return run_patch(patch_flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
