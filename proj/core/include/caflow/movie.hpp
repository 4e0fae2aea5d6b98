#pragma once

#include <filesystem>
#include <vector>

#include "caflow/image.hpp"

namespace caflow {

struct Calibration {
  double frame_rate_hz = 0.0;
  double microns_per_pixel = 0.0;

  // Scale factor from px/frame to um/s.
  double px_per_frame_to_um_per_s() const {
    return frame_rate_hz * microns_per_pixel;
  }

  // Throws CalibrationError unless both values are finite and > 0.
  void validate() const;
};

// A calibrated grayscale movie. Frames share one geometry; frame f(x, y)
// holds intensity in native camera counts (loaded movies are >= 0 by the
// unsigned source format; synthetic stacks may go negative).
struct MovieStack {
  int width = 0;
  int height = 0;
  std::vector<Image<double>> frames;
  Calibration calibration;

  int frame_count() const { return static_cast<int>(frames.size()); }

  // Structural validity: >= 2 frames, homogeneous dims, finite samples,
  // valid calibration. Throws on violation.
  void validate() const;
};

// Loads frame_<index>.pgm files (sorted by index) plus calibration.txt
// from a directory. Throws IoError / FormatError / CalibrationError /
// InsufficientDataError.
MovieStack load_movie(const std::filesystem::path& dir);

// Writes frame_%06d.pgm (16-bit) plus calibration.txt into dir (created
// if needed). Samples are rounded and clamped to [0, 65535]; returns the
// number of clamped samples so callers can warn.
std::size_t save_movie(const MovieStack& movie, const std::filesystem::path& dir);

// Reads just the calibration sidecar.
Calibration load_calibration(const std::filesystem::path& file);

}  // namespace caflow
