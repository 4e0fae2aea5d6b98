#pragma once

#include <cstdint>

#include "caflow/image.hpp"
#include "caflow/movie.hpp"

namespace caflow {

enum class SynthKind {
  constant,          // I = background
  translating_blob,  // Gaussian blob moving at constant velocity
  space_time_ramp,   // I = a x + b y + c t
  radial_wave,       // Gaussian annulus expanding from an origin
};

// Scene description for the synthetic movie generator. Frames are the
// continuous model sampled at integer pixel coordinates, plus optional
// i.i.d. Gaussian noise (sigma in counts) from a fixed-seed generator,
// so a spec reproduces bit-identical movies.
struct SynthSpec {
  SynthKind kind = SynthKind::constant;
  int width = 64;
  int height = 64;
  int frame_count = 2;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  Calibration calibration{8.0, 1.0};

  double background = 0.0;  // additive floor (constant value for `constant`)

  // translating_blob: I = bg + A exp(-((x-cx-vx t)^2 + (y-cy-vy t)^2) / 2 sigma^2)
  double blob_cx = 0.0, blob_cy = 0.0;
  double blob_sigma = 3.0;
  double blob_amplitude = 0.0;
  double blob_vx = 0.0, blob_vy = 0.0;

  // space_time_ramp: I = a x + b y + c t
  double ramp_a = 0.0, ramp_b = 0.0, ramp_c = 0.0;

  // radial_wave: I = bg + A exp(-(r - speed t)^2 / 2 width^2), r = |p - origin|
  double wave_ox = 0.0, wave_oy = 0.0;
  double wave_speed = 0.0;
  double wave_width = 2.0;
  double wave_amplitude = 0.0;

  void validate() const;  // throws ParameterError
};

MovieStack generate(const SynthSpec& spec);

// True velocity of the noiseless model for pair (t_index, t_index + 1),
// sampled per movie pixel, with the support where the moving structure
// actually carries signal. The constant kind has no motion to describe
// and is rejected with a ParameterError.
//  - blob: uniform (vx, vy); support where the blob term exceeds 1% of
//    its amplitude at frame t_index
//  - ramp: the minimum-norm solution of a u + b v = -c everywhere;
//    one-dimensional motion ambiguity is flagged
//  - wave: radially outward at `speed`; support on the annulus (ring
//    term > 1% of amplitude, r > 0)
struct GroundTruthFlow {
  Image<double> u;               // px/frame
  Image<double> v;
  Image<std::uint8_t> support;   // 1 where the truth is meaningful
  bool aperture_ambiguous = false;
};

GroundTruthFlow ground_truth_flow(const SynthSpec& spec, int t_index);

}  // namespace caflow
