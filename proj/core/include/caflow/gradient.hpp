#pragma once

#include "caflow/image.hpp"
#include "caflow/movie.hpp"

namespace caflow {

// 2x2 correlation kernel; k00 multiplies the top-left sample.
struct Kernel2x2 {
  double k00 = 0.0, k01 = 0.0;
  double k10 = 0.0, k11 = 0.0;
};

// 1/4 * [[-1, 1], [-1, 1]]: finite difference along x, averaged over the
// 2x2 neighborhood.
Kernel2x2 x_derivative_kernel();
// 1/4 * [[-1, -1], [1, 1]]: finite difference along y.
Kernel2x2 y_derivative_kernel();
// 1/4 * [[1, 1], [1, 1]]: plain 2x2 box average.
Kernel2x2 box_average_kernel();

// Correlation of plane with a 2x2 kernel (no flip):
//   out(x, y) = sum_ij k(i, j) * plane(x + j, y + i)
// Output is (width-1) x (height-1); the value at (x, y) describes the
// 2x2 neighborhood whose top-left pixel is (x, y). Throws
// InsufficientDataError if the plane is smaller than 2x2.
Image<double> conv2x2(const Image<double>& plane, const Kernel2x2& k);

// Temporal derivative for a frame pair: box average of (f1 - f0).
// Frames must share geometry.
Image<double> temporal_gradient(const Image<double>& f0, const Image<double>& f1);

// The three derivative planes of one frame pair, co-centered at
// (x + 1/2, y + 1/2, t + 1/2) and reported at the top-left pixel.
struct GradientTriplet {
  Image<double> ix;
  Image<double> iy;
  Image<double> it;
};

// Derivatives for pair (t_index, t_index + 1). The spatial kernels act
// on the two-frame sum f_t + f_{t+1} (each kernel carries the 1/4
// weight, so a unit spatial ramp yields gradient 1); the temporal
// kernel acts on the difference. Throws OutOfRangeError for a bad pair
// index.
GradientTriplet gradients_for_pair(const MovieStack& movie, int t_index);

// In-place separable Gaussian blur, kernel truncated at 3 sigma and
// renormalized where it is clipped by the border. sigma <= 0 is a no-op.
void gaussian_blur(Image<double>& plane, double sigma);

}  // namespace caflow
