#pragma once

#include <nlohmann/json.hpp>
#include <variant>

#include "convnade/models/convnade.hpp"
#include "convnade/models/deepnade.hpp"
#include "convnade/models/nade.hpp"

namespace convnade {

/// Everything needed to rebuild a model's parameter layout.
struct ModelSpec {
  ModelKind kind = ModelKind::convnade;
  std::size_t side = 32;
  ConvArchitecture architecture;         // conv models
  std::vector<std::size_t> hidden{500};  // nade: one entry; deepnade: one per layer

  /// Defaults per model kind; `compact` selects the 16-map conv stack.
  static ModelSpec defaults(ModelKind kind, std::size_t side, bool compact = false) {
    ModelSpec s;
    s.kind = kind;
    s.side = side;
    switch (kind) {
      case ModelKind::nade: s.hidden = {500}; break;
      case ModelKind::deepnade: s.hidden = {500, 500}; break;
      case ModelKind::convnade:
        s.architecture = compact ? ConvArchitecture::compact(2, 1) : ConvArchitecture::default_convnade();
        break;
      case ModelKind::convnade_beta_color:
        s.architecture = compact ? ConvArchitecture::compact(4, 6) : ConvArchitecture::default_beta_color();
        break;
    }
    return s;
  }

  bool is_conv() const { return kind == ModelKind::convnade || kind == ModelKind::convnade_beta_color; }
  std::size_t image_channels() const { return kind == ModelKind::convnade_beta_color ? 3 : 1; }
};

inline void to_json(nlohmann::json& j, const ModelSpec& s) {
  j = {{"kind", std::string(to_string(s.kind))}, {"side", s.side}};
  if (s.is_conv()) j["architecture"] = s.architecture;
  else j["hidden"] = s.hidden;
}

inline void from_json(const nlohmann::json& j, ModelSpec& s) {
  s.kind = parse_model_kind(j.at("kind").get<std::string>());
  s.side = j.at("side").get<std::size_t>();
  if (s.is_conv()) s.architecture = j.at("architecture").get<ConvArchitecture>();
  else s.hidden = j.at("hidden").get<std::vector<std::size_t>>();
}

template <typename T>
using AnyModel = std::variant<Nade<T>, DeepNade<T>, ConvNade<T>, ConvNadeBetaColor<T>>;

template <typename T>
AnyModel<T> make_model(const ModelSpec& spec, Rng& init_rng) {
  switch (spec.kind) {
    case ModelKind::nade:
      if (spec.hidden.size() != 1) throw std::invalid_argument("NADE takes exactly one hidden width");
      return Nade<T>(spec.side, spec.hidden.front(), init_rng);
    case ModelKind::deepnade: return DeepNade<T>(spec.side, spec.hidden, init_rng);
    case ModelKind::convnade: return ConvNade<T>(spec.architecture, spec.side, init_rng);
    case ModelKind::convnade_beta_color: return ConvNadeBetaColor<T>(spec.architecture, spec.side, init_rng);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace convnade
