#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/data/image.hpp"
#include "convnade/numerics/random.hpp"

namespace convnade {

enum class SplitTag { train, validation, test };

struct Dataset {
  std::vector<Image> images;
  std::vector<SplitTag> tags;  // empty unless the source defines a split
  std::vector<int> labels;     // optional, unused by the models
  std::string source;

  std::size_t size() const { return images.size(); }
  std::size_t channels() const { return images.empty() ? 0 : images.front().channels; }
  std::size_t side() const { return images.empty() ? 0 : images.front().side; }
  bool has_canonical_split() const { return !tags.empty() && tags.size() == images.size(); }
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

struct Splits {
  std::vector<Image> train;
  std::vector<Image> validation;
  std::vector<Image> test;
};

/// Partitions a dataset. Sources with a canonical split keep it (each part
/// truncated to the requested count); others are shuffled with `seed` and
/// cut into consecutive runs.
inline Splits split(const Dataset& ds, const SplitCounts& counts, std::uint64_t seed) {
  Splits out;
  if (ds.has_canonical_split()) {
    auto take = [&](SplitTag tag, std::size_t want, std::vector<Image>& dst, const char* name) {
      for (std::size_t i = 0; i < ds.size() && dst.size() < want; ++i)
        if (ds.tags[i] == tag) dst.push_back(ds.images[i]);
      if (dst.size() < want) {
        throw std::invalid_argument(std::string("split: requested ") + std::to_string(want) + " " + name +
                                    " images, source has " + std::to_string(dst.size()));
      }
    };
    take(SplitTag::train, counts.train, out.train, "train");
    take(SplitTag::validation, counts.validation, out.validation, "validation");
    take(SplitTag::test, counts.test, out.test, "test");
    return out;
  }
  const std::size_t total = counts.train + counts.validation + counts.test;
  if (total > ds.size()) {
    throw std::invalid_argument("split: counts sum to " + std::to_string(total) + " but the dataset has " +
                                std::to_string(ds.size()) + " images");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t pos = 0;
  for (auto [dst, n] : {std::pair{&out.train, counts.train}, std::pair{&out.validation, counts.validation},
                        std::pair{&out.test, counts.test}}) {
    for (std::size_t i = 0; i < n; ++i) dst->push_back(ds.images[order[pos++]]);
  }
  return out;
}

/// 80/10/10 of the dataset (test gets the remainder).
inline SplitCounts default_counts(std::size_t n) {
  const std::size_t train = n * 8 / 10, val = n / 10;
  return {train, val, n - train - val};
}

}  // namespace convnade
