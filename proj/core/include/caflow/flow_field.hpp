#pragma once

#include <vector>

#include "caflow/image.hpp"
#include "caflow/movie.hpp"

namespace caflow {

// Axis-aligned pixel rectangle, origin inclusive, extent in pixels.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  bool contains(int x, int y) const {
    return x >= x0 && x < x0 + width && y >= y0 && y < y0 + height;
  }
  // Containment for continuous positions: the closed rectangle spanned
  // by the member pixel centers.
  bool contains_point(double x, double y) const {
    return x >= x0 && x <= x0 + width - 1 && y >= y0 && y <= y0 + height - 1;
  }
  bool empty() const { return width <= 0 || height <= 0; }
};

// Per-frame-pair flow estimate for pair (t_index, t_index + 1).
//
// Planes are sized like the gradient grid (movie width - 1, height - 1);
// the value at (x, y) describes the 2x2x2 neighborhood whose top-left
// pixel is (x, y), i.e. physical location (x + 1/2, y + 1/2). Outside
// `valid` (where the analysis window would overhang) u and v are NaN and
// both eigenvalues are 0. Inside, u/v are NaN only where the local
// system was numerically zero; eigenvalues are always recorded.
struct FlowField {
  int width = 0;   // plane width  = movie width - 1
  int height = 0;  // plane height = movie height - 1
  int t_index = 0;
  PixelRect valid;
  Image<double> u;           // px/frame, x component
  Image<double> v;           // px/frame, y component
  Image<double> lambda_min;  // structure-tensor eigenvalues, >= 0
  Image<double> lambda_max;

  FlowField() = default;
  FlowField(int w, int h, int t, PixelRect valid_rect);
};

// All pairs of one movie plus its calibration.
struct FlowSequence {
  Calibration calibration;
  std::vector<FlowField> fields;

  int pair_count() const { return static_cast<int>(fields.size()); }
  int width() const { return fields.empty() ? 0 : fields.front().width; }
  int height() const { return fields.empty() ? 0 : fields.front().height; }
  const PixelRect& valid() const { return fields.front().valid; }

  // Homogeneous geometry, eigenvalues >= 0, calibration valid. Throws.
  void validate() const;
};

// 1 where lambda_min > threshold and the vector is finite, else 0.
// threshold must be finite and >= 0.
Image<std::uint8_t> reliability_mask(const FlowField& field, double threshold);

// Velocity planes converted to um/s (NaN propagates).
struct PhysicalVelocity {
  Image<double> x;  // um/s
  Image<double> y;
};
PhysicalVelocity to_physical(const FlowField& field, const Calibration& cal);

}  // namespace caflow
