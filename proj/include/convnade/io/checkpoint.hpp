#pragma once

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/models/any_model.hpp"
#include "convnade/training/trainer.hpp"

namespace convnade {

// Layout:
//   "NADE1"                       5 bytes
//   metadata length               uint32 little-endian
//   metadata                      UTF-8 JSON
//   parameters                    float32 little-endian, declared order
//   CRC32 of the parameter bytes  uint32 little-endian

inline constexpr char kCheckpointMagic[5] = {'N', 'A', 'D', 'E', '1'};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json to_json_config(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},   {"batch_size", c.batch_size},
          {"epochs", c.epochs},                 {"patch_kind", std::string(to_string(c.patch_kind))},
          {"patch_size", c.patch_size},         {"dropout_rate", c.dropout_rate},
          {"seed", c.seed},                     {"patch_seed", c.patch_seed},
          {"random_patch_count", c.random_patch_count}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.patch_kind = parse_patch_kind(j.at("patch_kind").get<std::string>());
  c.patch_size = j.at("patch_size").get<std::size_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.patch_seed = j.at("patch_seed").get<std::uint64_t>();
  c.random_patch_count = j.at("random_patch_count").get<std::size_t>();
  return c;
}

inline std::uint32_t crc32_of(const std::vector<std::uint8_t>& bytes) {
  return static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

inline std::string curves_csv(const std::vector<LossRecord>& history);

struct Checkpoint {
  ModelSpec spec;
  TrainConfig config;
  std::size_t epoch = 0;
  std::vector<LossRecord> history;
  std::vector<float> parameters;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[off + i]} << (8 * i);
  return v;
}

}  // namespace detail

template <typename T>
std::vector<float> flatten_parameters(const std::vector<Tensor<T>>& params) {
  std::vector<float> out;
  for (const auto& p : params)
    for (T v : p.values()) out.push_back(static_cast<float>(v));
  return out;
}

template <typename T>
void assign_parameters(const std::vector<Tensor<T>>& params, const std::vector<float>& flat) {
  std::size_t total = 0;
  for (const auto& p : params) total += p.size();
  if (total != flat.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(flat.size()) + " parameters, model needs " +
                          std::to_string(total));
  }
  std::size_t pos = 0;
  for (auto p : params)
    for (auto& v : p.mutable_values()) v = static_cast<T>(flat[pos++]);
}

inline std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  nlohmann::json meta = {{"model", ck.spec},
                         {"config", to_json_config(ck.config)},
                         {"epoch", ck.epoch},
                         {"loss_history_crc32", crc32_of([&] {
                            const auto s = curves_csv(ck.history);
                            return std::vector<std::uint8_t>(s.begin(), s.end());
                          }())},
                         {"parameter_count", ck.parameters.size()}};
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& r : ck.history) hist.push_back({r.epoch, r.train_loss, r.val_loss});
  meta["loss_history"] = hist;
  const std::string text = meta.dump();

  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  std::vector<std::uint8_t> payload;
  payload.reserve(ck.parameters.size() * 4);
  for (float f : ck.parameters) detail::put_u32(payload, std::bit_cast<std::uint32_t>(f));
  out.insert(out.end(), payload.begin(), payload.end());
  detail::put_u32(out, crc32_of(payload));
  return out;
}

inline Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 9 || std::memcmp(bytes.data(), kCheckpointMagic, 5) != 0) {
    throw CheckpointError("not a checkpoint (missing NADE1 magic)");
  }
  const std::size_t meta_len = detail::get_u32(bytes, 5);
  if (9 + meta_len > bytes.size()) throw CheckpointError("checkpoint metadata truncated");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.begin() + 9, bytes.begin() + 9 + static_cast<std::ptrdiff_t>(meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  Checkpoint ck;
  const std::size_t count = meta.at("parameter_count").get<std::size_t>();
  const std::size_t payload_at = 9 + meta_len;
  if (bytes.size() != payload_at + count * 4 + 4) {
    throw CheckpointError("checkpoint payload length " + std::to_string(bytes.size() - payload_at) +
                          " does not match " + std::to_string(count) + " declared parameters");
  }
  const std::vector<std::uint8_t> payload(bytes.begin() + static_cast<std::ptrdiff_t>(payload_at),
                                          bytes.end() - 4);
  if (crc32_of(payload) != detail::get_u32(bytes, bytes.size() - 4)) {
    throw CheckpointError("checkpoint CRC mismatch; file is corrupted");
  }
  ck.spec = meta.at("model").get<ModelSpec>();
  ck.config = train_config_from_json(meta.at("config"));
  ck.epoch = meta.at("epoch").get<std::size_t>();
  for (const auto& r : meta.at("loss_history")) {
    ck.history.push_back({r.at(0).get<std::size_t>(), r.at(1).get<double>(), r.at(2).get<double>()});
  }
  ck.parameters.resize(count);
  for (std::size_t i = 0; i < count; ++i) ck.parameters[i] = std::bit_cast<float>(detail::get_u32(payload, i * 4));
  return ck;
}

/// Writes through a temporary file and renames it into place.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  const auto bytes = encode_checkpoint(ck);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  return decode_checkpoint({std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()});
}

/// Rebuilds the model described by a checkpoint and loads its parameters.
template <typename T>
AnyModel<T> restore_model(const Checkpoint& ck) {
  Rng unused(0);
  auto model = make_model<T>(ck.spec, unused);
  std::visit([&](auto& m) { assign_parameters(m.parameters(), ck.parameters); }, model);
  return model;
}

/// `epoch,train_loss,val_loss` with six decimals.
inline std::string curves_csv(const std::vector<LossRecord>& history) {
  std::string out = "epoch,train_loss,val_loss\n";
  char line[128];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", r.epoch, r.train_loss, r.val_loss);
    out += line;
  }
  return out;
}

}  // namespace convnade
