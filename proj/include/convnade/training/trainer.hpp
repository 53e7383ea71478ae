#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "convnade/data/image.hpp"
#include "convnade/lowdisc/patch.hpp"
#include "convnade/training/adam.hpp"
#include "convnade/training/objective.hpp"

namespace convnade {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 100;
  std::size_t epochs = 60;
  PatchKind patch_kind = PatchKind::random;
  std::size_t patch_size = 128;
  double dropout_rate = 0.5;
  std::uint64_t seed = 0;        // initialization, shuffling, dropout
  std::uint64_t patch_seed = 0;  // random patch draw
  std::size_t random_patch_count = 5;
};

struct LossRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

/// Stream tags for Rng::derive so that each consumer of the run seed gets
/// its own sequence.
enum class SeedStream : std::uint64_t { init = 1, shuffle = 2, dropout = 3, sample = 4 };

inline std::uint64_t stream_seed(std::uint64_t seed, SeedStream s, std::uint64_t index = 0) {
  return Rng::derive(Rng::derive(seed, static_cast<std::uint64_t>(s)), index);
}

/// The single patch a run trains and validates on.
inline PixelPatch make_patch(PatchKind kind, std::size_t size, std::size_t side, std::uint64_t seed) {
  const std::size_t d = side * side;
  if (size >= d) throw std::invalid_argument("patch size must be smaller than the pixel count");
  if (kind == PatchKind::low_discrepancy) {
    if (!is_power_of_two(size)) throw std::invalid_argument("patch size must be a power of two");
    if (!is_power_of_two(side)) throw std::invalid_argument("low-discrepancy patches need a power-of-two image side");
    return ld_patch(log2_exact(side), log2_exact(size));
  }
  return random_patch(d, size, seed);
}

inline PixelPatch make_training_patch(const TrainConfig& cfg, std::size_t side) {
  return make_patch(cfg.patch_kind, cfg.patch_size, side, cfg.patch_seed);
}

/// Average patch loss over a set of images with dropout off, in units of
/// the per-batch loss (per unobserved pixel and channel).
template <typename Model>
double evaluate_loss(const Model& model, const std::vector<Image>& images, const PixelPatch& patch,
                     std::size_t batch_size = 100) {
  using T = typename Model::Scalar;
  if (images.empty()) throw std::invalid_argument("evaluate: empty image set");
  const Mask mask = make_mask(patch, model.side());
  NoGradGuard no_grad;
  double weighted = 0.0;
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const std::size_t end = std::min(images.size(), start + batch_size);
    std::vector<const Image*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&images[i]);
    const auto loss = patch_loss(model, to_batch<T>(std::span<const Image* const>(batch)), mask);
    weighted += static_cast<double>(loss.item()) * static_cast<double>(end - start);
  }
  return weighted / static_cast<double>(images.size());
}

struct EvalReport {
  PatchKind kind = PatchKind::low_discrepancy;
  std::vector<std::uint64_t> seeds;  // random patches only
  std::vector<double> losses;
  double mean = 0.0;
};

/// Test loss under the configured patch family: one value for the
/// low-discrepancy patch, or `random_patch_count` patches seeded
/// patch_seed, patch_seed + 1, ... and their mean.
template <typename Model>
EvalReport evaluate(const Model& model, const std::vector<Image>& test, const TrainConfig& cfg) {
  EvalReport r;
  r.kind = cfg.patch_kind;
  if (cfg.patch_kind == PatchKind::low_discrepancy) {
    r.losses.push_back(evaluate_loss(model, test, make_training_patch(cfg, model.side()), cfg.batch_size));
  } else {
    if (cfg.random_patch_count == 0) throw std::invalid_argument("evaluate: random_patch_count must be positive");
    for (std::size_t i = 0; i < cfg.random_patch_count; ++i) {
      const std::uint64_t s = cfg.patch_seed + i;
      r.seeds.push_back(s);
      r.losses.push_back(
          evaluate_loss(model, test, make_patch(PatchKind::random, cfg.patch_size, model.side(), s), cfg.batch_size));
    }
  }
  r.mean = std::accumulate(r.losses.begin(), r.losses.end(), 0.0) / static_cast<double>(r.losses.size());
  return r;
}

/// Minibatch Adam on the patch loss. Each epoch shuffles the training set,
/// updates once per batch with dropout active, then scores the validation
/// set with dropout off. The patch is fixed for the whole run.
template <typename Model>
std::vector<LossRecord> train(Model& model, const std::vector<Image>& train_set, const std::vector<Image>& val_set,
                              const TrainConfig& cfg,
                              const std::function<void(const LossRecord&)>& on_epoch = {}) {
  using T = typename Model::Scalar;
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch size must be at least 1");
  for (const auto* set : {&train_set, &val_set})
    for (const auto& img : *set)
      if (img.side != model.side() || img.channels != model.image_channels())
        throw ShapeError("train: image shape does not match the model");

  const PixelPatch patch = make_training_patch(cfg, model.side());
  const Mask mask = make_mask(patch, model.side());
  auto params = model.parameters();
  AdamState adam;
  Rng dropout_rng(stream_seed(cfg.seed, SeedStream::dropout));
  const ForwardOptions train_opt{true, cfg.dropout_rate, &dropout_rng};

  std::vector<std::size_t> order(train_set.size());
  std::vector<LossRecord> history;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(stream_seed(cfg.seed, SeedStream::shuffle, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double weighted = 0.0;
    for (std::size_t start = 0, batch_no = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const Image*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
      for (auto& p : params) p.zero_grad();
      const auto loss = patch_loss(model, to_batch<T>(std::span<const Image* const>(batch)), mask, train_opt);
      const double value = static_cast<double>(loss.item());
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "train: non-finite loss " << value << " at epoch " << epoch << ", batch " << batch_no;
        throw std::runtime_error(msg.str());
      }
      backward(loss);
      adam_step(params, adam, cfg.learning_rate);
      weighted += value * static_cast<double>(end - start);
    }
    LossRecord rec{epoch, weighted / static_cast<double>(order.size()),
                   evaluate_loss(model, val_set, patch, cfg.batch_size)};
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return history;
}

}  // namespace convnade
