#include "caflow/presets.hpp"

#include <array>

namespace caflow {

namespace {
// name, nominal frame rate (Hz), window width (px), eigenvalue threshold
constexpr std::array<Preset, 3> kPresets{{
    {"rmc1", 16.4, 11, 11.0},
    {"astrocyte", 8.0, 9, 1.4},
    {"neuron", 4.0, 11, 0.3},
}};
}  // namespace

std::span<const Preset> presets() { return kPresets; }

std::optional<Preset> find_preset(std::string_view name) {
  for (const Preset& p : kPresets)
    if (p.name == name) return p;
  return std::nullopt;
}

}  // namespace caflow
