#pragma once

// Dataset saliency defaults. Radii given as a range use the midpoint.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adacore/saliency.hpp"

namespace adacore {

struct Preset {
  std::string name;
  double sample_rate = 0.0;  // Hz
  SaliencyConfig saliency;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> p;

    SaliencyConfig isruc;
    isruc.bands = {{0.5, 4.0}, {11.0, 16.0}};
    isruc.top_k = 2;
    isruc.weight_stat = WeightStatistic::median;
    isruc.gamma = 0.3;
    isruc.phi = 0.05;
    isruc.rho_seconds = 0.75;  // 0.5 - 1.0 s
    isruc.smooth_seconds = 0.5;
    p.push_back({"isruc", 100.0, isruc});

    SaliencyConfig faced;
    faced.bands = {{0.5, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 30.0}, {30.0, 45.0}};
    faced.top_k = 3;
    faced.weight_stat = WeightStatistic::median;
    faced.gamma = 0.1;
    faced.phi = 0.10;
    faced.rho_seconds = 0.75;  // 0.5 - 1.0 s
    faced.smooth_seconds = 0.5;
    p.push_back({"faced", 250.0, faced});

    SaliencyConfig mi;
    mi.bands = {{6.0, 9.0}, {8.0, 13.0}, {13.0, 30.0}};
    mi.top_k = 2;
    mi.weight_stat = WeightStatistic::trimmed_mean;
    mi.trim_fraction = 0.1;
    mi.gamma = 0.3;
    mi.phi = 0.10;
    mi.rho_seconds = 0.3;  // 0.1 - 0.5 s
    mi.smooth_seconds = 0.1;
    p.push_back({"physionet-mi", 160.0, mi});

    for (auto& preset : p) {
      preset.saliency.kappa = 2.5;
      preset.saliency.stride = 5;
      preset.saliency.kaiser_beta = 8.6;
    }
    return p;
  }();
  return all;
}

inline std::optional<Preset> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

inline std::string preset_names() {
  std::string out;
  for (const auto& p : presets()) {
    if (!out.empty()) out += ", ";
    out += p.name;
  }
  return out;
}

}  // namespace adacore
