#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace caflow {

// Published acquisition presets: nominal frame rate plus the window and
// eigenvalue threshold tuned for that preparation.
struct Preset {
  std::string_view name;
  double frame_rate_hz;
  int window_width;
  double eigenvalue_threshold;
};

std::span<const Preset> presets();
std::optional<Preset> find_preset(std::string_view name);

}  // namespace caflow
