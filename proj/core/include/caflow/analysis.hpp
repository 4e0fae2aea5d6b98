#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caflow/flow_field.hpp"
#include "caflow/movie.hpp"

namespace caflow {

// Rectangle in flow-plane pixel coordinates. Must lie inside the plane;
// may overlap the unreliable border (those pixels simply never count).
struct RegionOfInterest {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

struct SpeedHistogram {
  std::vector<double> bin_edges;         // ascending, size = counts.size() + 1
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;               // sum of counts (in-range samples)

  // center of the most populated bin; first such bin wins ties
  double mode_bin_center() const;
};

// Histogram of reliable speeds (um/s) inside the ROI over all pairs.
// Speeds outside the edge range are clamped into the end bins, so
// total always equals the reliable-vector count. Throws ParameterError
// on a bad ROI or non-ascending edges.
SpeedHistogram roi_speed_histogram(const FlowSequence& seq,
                                   const RegionOfInterest& roi,
                                   double threshold,
                                   std::span<const double> bin_edges);

struct RoiStats {
  std::uint64_t count = 0;          // reliable vectors in the ROI
  double mean_speed_um_s = 0.0;
  double stddev_um_s = 0.0;         // population form
  double mean_direction_deg = 0.0;  // atan2 of the vector sum, degrees
};

// count == 0 means "empty result": the speed/direction fields are then
// meaningless and callers should not print them.
RoiStats roi_stats(const FlowSequence& seq, const RegionOfInterest& roi,
                   double threshold);

// Rendered RGB image plus the text sidecar describing its scale/legend.
struct RenderedImage {
  Image<Rgb8> pixels;
  std::string meta_text;
};

// Rainbow used by the composite: s in [0, 1] sweeps hue 240 (blue) to 0
// (red), full saturation/value.
Rgb8 rainbow_color(double s);
// Diverging map for signed data: s in [-1, 1], blue -> white -> red.
Rgb8 diverging_color(double s);

struct CompositeOptions {
  double threshold = 0.0;
  int stride = 4;          // sample every stride-th pixel in x and y
  double arrow_gain = 4.0; // px of arrow per px/frame of velocity
};

// Temporal composite: each sampled pixel is colored by the time of its
// first reliable estimate (rainbow over the pair range) and carries an
// arrow of that pair's vector. Black where never reliable. The sidecar
// lists the pair -> time -> color table.
RenderedImage temporal_composite(const FlowSequence& seq,
                                 const CompositeOptions& opt);

// dI/dt render for pair (t_index, t_index + 1): per-pixel intensity
// change in counts/s on the diverging map, symmetric scale +/- max |d|.
RenderedImage didt_render(const MovieStack& movie, int t_index);

enum class TraceEnd {
  left_valid_region,
  entered_unreliable,
  end_of_movie,
};

struct PathPoint {
  double t_seconds = 0.0;
  double x = 0.0;  // flow-plane px
  double y = 0.0;
};

struct PathTrace {
  Vec2 seed;
  std::vector<PathPoint> points;  // starts at the seed
  TraceEnd termination = TraceEnd::end_of_movie;
};

const char* to_string(TraceEnd t);

// Euler path integration through the flow sequence: one step per pair,
// velocity bilinearly interpolated from the reliable stencil neighbors
// (weights renormalized; all-unreliable stencil terminates the path).
// Seeds must lie inside the valid region. An exit point is recorded
// before the path is marked left_valid_region.
std::vector<PathTrace> trace_paths(const FlowSequence& seq,
                                   std::span<const Vec2> seeds,
                                   double threshold);

// Normalized vector-field pattern match (cosine similarity under the
// reliability mask):
//   response(p) = sum_S <k, f> / (|k| * |f_S|)
// where S are the reliable field pixels under defined kernel pixels,
// |k| is the full kernel norm and |f_S| the masked field norm. NaN
// where the kernel overhangs the plane, fewer than half the kernel
// pixels are reliable, or |f_S| = 0. Values clamped to [-1, 1].
struct MatchMap {
  Image<double> response;
  int kernel_width = 0;
  int kernel_height = 0;

  // location/value of the maximum response; false if all NaN
  bool argmax(int& x, int& y, double& value) const;
};

// kernel: a flow field whose finite (u, v) pixels define the pattern
// (its eigenvalue planes are ignored). Kernel dims must be odd and fit
// inside the field's valid region. Throws ParameterError.
MatchMap clifford_match(const FlowField& field, const FlowField& kernel,
                        double threshold);

// Unit divergence template: width x width, each defined pixel holds the
// outward unit radial vector (zero at the center).
FlowField divergence_kernel(int width);

}  // namespace caflow
