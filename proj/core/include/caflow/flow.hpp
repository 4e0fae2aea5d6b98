#pragma once

#include <optional>

#include "caflow/flow_field.hpp"
#include "caflow/gradient.hpp"
#include "caflow/movie.hpp"

namespace caflow {

struct FlowParams {
  int window_width = 9;               // odd, >= 3
  double eigenvalue_threshold = 0.0;  // reliability cut, >= 0
  double pre_smooth_sigma = 0.0;      // optional per-frame blur, >= 0

  // Checks the parameter domain against a movie geometry. Throws
  // ParameterError.
  void validate(int movie_width, int movie_height) const;
};

// Normalized Gaussian window, sigma = width / 6, unit sum.
class WindowWeights {
public:
  explicit WindowWeights(int width);

  int width() const { return width_; }
  int half_width() const { return width_ / 2; }
  // i, j in [0, width)
  double at(int i, int j) const {
    return weights_[static_cast<std::size_t>(j) * width_ + i];
  }

private:
  int width_;
  std::vector<double> weights_;
};

inline WindowWeights gaussian_window(int width) { return WindowWeights(width); }

// Windowed weighted least-squares normal equations at one pixel:
//   [m11 m12; m12 m22] [u; v] = [b1; b2]
// with m11 = sum w^2 Ix^2, m12 = sum w^2 Ix Iy, m22 = sum w^2 Iy^2,
// b1 = -sum w^2 Ix It, b2 = -sum w^2 Iy It.
struct LocalSystem {
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;
  double b1 = 0.0, b2 = 0.0;
};

// Accumulates the system for the window centered at (cx, cy) on the
// gradient planes. Throws OutOfRangeError if the window overhangs.
LocalSystem assemble_system(const GradientTriplet& g, const WindowWeights& w,
                            int cx, int cy);

struct EigenPair {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Eigenvalues of the symmetric matrix [m11 m12; m12 m22], closed form
// with the discriminant clamped at zero; lambda_min <= lambda_max.
EigenPair eigen2x2(double m11, double m12, double m22);

// Solves the local system. Well-conditioned matrices (det above a
// relative floor) use the exact 2x2 inverse; near-singular ones return
// the minimum-norm least-squares solution along the dominant
// eigenvector. A numerically zero system has no answer.
std::optional<Vec2> solve_flow(const LocalSystem& s);

// Full pipeline: optional pre-smoothing, per-pair gradients, per-pixel
// solve. jobs <= 0 uses the hardware thread count; results are
// bit-identical for any jobs value. Throws on invalid movie or params.
FlowSequence compute_flow_field(const MovieStack& movie, const FlowParams& params,
                                int jobs = 0);

}  // namespace caflow
