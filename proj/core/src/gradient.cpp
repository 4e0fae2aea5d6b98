#include "caflow/gradient.hpp"

#include <cmath>

namespace caflow {

Kernel2x2 x_derivative_kernel() { return {-0.25, 0.25, -0.25, 0.25}; }
Kernel2x2 y_derivative_kernel() { return {-0.25, -0.25, 0.25, 0.25}; }
Kernel2x2 box_average_kernel() { return {0.25, 0.25, 0.25, 0.25}; }

Image<double> conv2x2(const Image<double>& plane, const Kernel2x2& k) {
  if (plane.width() < 2 || plane.height() < 2)
    throw InsufficientDataError("conv2x2 needs a plane of at least 2x2");
  const int ow = plane.width() - 1;
  const int oh = plane.height() - 1;
  Image<double> out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const double* r0 = plane.row(y);
    const double* r1 = plane.row(y + 1);
    double* o = out.row(y);
    for (int x = 0; x < ow; ++x) {
      o[x] = k.k00 * r0[x] + k.k01 * r0[x + 1] + k.k10 * r1[x] + k.k11 * r1[x + 1];
    }
  }
  return out;
}

Image<double> temporal_gradient(const Image<double>& f0, const Image<double>& f1) {
  if (!f0.same_size(f1))
    throw FormatError("temporal_gradient: frames have different sizes");
  Image<double> diff(f0.width(), f0.height());
  for (std::size_t i = 0; i < diff.pixel_count(); ++i)
    diff.pixels()[i] = f1.pixels()[i] - f0.pixels()[i];
  return conv2x2(diff, box_average_kernel());
}

GradientTriplet gradients_for_pair(const MovieStack& movie, int t_index) {
  if (t_index < 0 || t_index + 1 >= movie.frame_count())
    throw OutOfRangeError("pair index " + std::to_string(t_index) +
                          " out of range for " + std::to_string(movie.frame_count()) +
                          " frames");
  const Image<double>& f0 = movie.frames[t_index];
  const Image<double>& f1 = movie.frames[t_index + 1];
  if (!f0.same_size(f1)) throw FormatError("movie frames have mismatched sizes");

  // Spatial derivatives come from the two-frame sum so all three
  // estimates are co-centered at (x+1/2, y+1/2, t+1/2); the 1/4 kernel
  // weights make the pair-level spatial gain exactly 1 on a unit ramp.
  Image<double> sum(f0.width(), f0.height());
  for (std::size_t i = 0; i < sum.pixel_count(); ++i)
    sum.pixels()[i] = f0.pixels()[i] + f1.pixels()[i];

  GradientTriplet g;
  g.ix = conv2x2(sum, x_derivative_kernel());
  g.iy = conv2x2(sum, y_derivative_kernel());
  g.it = temporal_gradient(f0, f1);
  return g;
}

void gaussian_blur(Image<double>& plane, double sigma) {
  if (!(sigma >= 0.0))
    throw ParameterError("blur sigma must be finite and >= 0");
  if (sigma == 0.0) return;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i)
    taps[static_cast<std::size_t>(i + radius)] =
        std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));

  const int w = plane.width();
  const int h = plane.height();
  Image<double> tmp(w, h);

  // horizontal pass, kernel clipped and renormalized at the borders
  for (int y = 0; y < h; ++y) {
    const double* src = plane.row(y);
    double* dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0, norm = 0.0;
      const int lo = std::max(-radius, -x);
      const int hi = std::min(radius, w - 1 - x);
      for (int i = lo; i <= hi; ++i) {
        const double t = taps[static_cast<std::size_t>(i + radius)];
        acc += t * src[x + i];
        norm += t;
      }
      dst[x] = acc / norm;
    }
  }
  // vertical pass
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double acc = 0.0, norm = 0.0;
      const int lo = std::max(-radius, -y);
      const int hi = std::min(radius, h - 1 - y);
      for (int i = lo; i <= hi; ++i) {
        const double t = taps[static_cast<std::size_t>(i + radius)];
        acc += t * tmp(x, y + i);
        norm += t;
      }
      plane(x, y) = acc / norm;
    }
  }
}

}  // namespace caflow
