#include "caflow/flow.hpp"

#include <cmath>
#include <limits>

#include "caflow/parallel.hpp"

namespace caflow {

void FlowParams::validate(int movie_width, int movie_height) const {
  if (window_width < 3 || window_width % 2 == 0)
    throw ParameterError("window width must be odd and >= 3");
  const int gw = movie_width - 1;
  const int gh = movie_height - 1;
  if (window_width > gw || window_width > gh)
    throw ParameterError("window width " + std::to_string(window_width) +
                         " exceeds the " + std::to_string(gw) + "x" +
                         std::to_string(gh) + " gradient plane");
  if (!std::isfinite(eigenvalue_threshold) || eigenvalue_threshold < 0.0)
    throw ParameterError("eigenvalue threshold must be finite and >= 0");
  if (!std::isfinite(pre_smooth_sigma) || pre_smooth_sigma < 0.0)
    throw ParameterError("pre-smooth sigma must be finite and >= 0");
}

WindowWeights::WindowWeights(int width) : width_(width) {
  if (width < 3 || width % 2 == 0)
    throw ParameterError("window width must be odd and >= 3");
  const int half = width / 2;
  const double sigma = static_cast<double>(width) / 6.0;
  weights_.resize(static_cast<std::size_t>(width) * width);
  double sum = 0.0;
  for (int j = 0; j < width; ++j) {
    for (int i = 0; i < width; ++i) {
      const double di = i - half;
      const double dj = j - half;
      const double w = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      weights_[static_cast<std::size_t>(j) * width + i] = w;
      sum += w;
    }
  }
  for (double& w : weights_) w /= sum;
}

LocalSystem assemble_system(const GradientTriplet& g, const WindowWeights& w,
                            int cx, int cy) {
  const int half = w.half_width();
  const int gw = g.ix.width();
  const int gh = g.ix.height();
  if (cx - half < 0 || cy - half < 0 || cx + half >= gw || cy + half >= gh)
    throw OutOfRangeError("window at (" + std::to_string(cx) + "," +
                          std::to_string(cy) + ") overhangs the gradient plane");

  LocalSystem s;
  for (int j = 0; j < w.width(); ++j) {
    const int y = cy - half + j;
    const double* ix = g.ix.row(y) + (cx - half);
    const double* iy = g.iy.row(y) + (cx - half);
    const double* it = g.it.row(y) + (cx - half);
    for (int i = 0; i < w.width(); ++i) {
      const double wi = w.at(i, j);
      const double w2 = wi * wi;
      s.m11 += w2 * ix[i] * ix[i];
      s.m12 += w2 * ix[i] * iy[i];
      s.m22 += w2 * iy[i] * iy[i];
      s.b1 -= w2 * ix[i] * it[i];
      s.b2 -= w2 * iy[i] * it[i];
    }
  }
  return s;
}

EigenPair eigen2x2(double m11, double m12, double m22) {
  const double tr = m11 + m22;
  const double det = m11 * m22 - m12 * m12;
  const double disc = std::max(tr * tr - 4.0 * det, 0.0);
  const double root = std::sqrt(disc);
  return {0.5 * (tr - root), 0.5 * (tr + root)};
}

std::optional<Vec2> solve_flow(const LocalSystem& s) {
  constexpr double det_eps = 1e-12;
  constexpr double tiny = 1e-300;
  const double tr = s.m11 + s.m22;
  const double det = s.m11 * s.m22 - s.m12 * s.m12;

  if (det > det_eps * std::max(tr * tr, tiny)) {
    const double inv = 1.0 / det;
    return Vec2{inv * (s.m22 * s.b1 - s.m12 * s.b2),
                inv * (s.m11 * s.b2 - s.m12 * s.b1)};
  }

  // Near-singular: minimum-norm least squares along the dominant
  // eigenvector (only lambda_max divides, so this stays stable).
  const EigenPair ev = eigen2x2(s.m11, s.m12, s.m22);
  if (!(ev.lambda_max > 0.0)) return std::nullopt;

  double ex = ev.lambda_max - s.m22;
  double ey = s.m12;
  const double ax = s.m12;
  const double ay = ev.lambda_max - s.m11;
  if (ax * ax + ay * ay > ex * ex + ey * ey) {
    ex = ax;
    ey = ay;
  }
  double norm = std::hypot(ex, ey);
  if (norm == 0.0) {  // diagonal matrix: dominant axis directly
    if (s.m11 >= s.m22) {
      ex = 1.0;
      ey = 0.0;
    } else {
      ex = 0.0;
      ey = 1.0;
    }
    norm = 1.0;
  }
  ex /= norm;
  ey /= norm;
  const double coef = (ex * s.b1 + ey * s.b2) / ev.lambda_max;
  return Vec2{coef * ex, coef * ey};
}

FlowSequence compute_flow_field(const MovieStack& movie, const FlowParams& params,
                                int jobs) {
  // structural checks only: synthetic stacks may hold negative samples
  if (movie.frame_count() < 2)
    throw InsufficientDataError("flow needs at least 2 frames");
  if (movie.width < 2 || movie.height < 2)
    throw InsufficientDataError("frames must be at least 2x2");
  for (const auto& f : movie.frames)
    if (f.width() != movie.width || f.height() != movie.height)
      throw FormatError("movie frames have mismatched dimensions");
  movie.calibration.validate();
  params.validate(movie.width, movie.height);

  const MovieStack* input = &movie;
  MovieStack smoothed;
  if (params.pre_smooth_sigma > 0.0) {
    smoothed = movie;
    for (auto& frame : smoothed.frames) gaussian_blur(frame, params.pre_smooth_sigma);
    input = &smoothed;
  }

  const WindowWeights window = gaussian_window(params.window_width);
  const int half = window.half_width();
  const int gw = movie.width - 1;
  const int gh = movie.height - 1;
  const PixelRect valid{half, half, gw - 2 * half, gh - 2 * half};

  FlowSequence seq;
  seq.calibration = movie.calibration;
  seq.fields.reserve(static_cast<std::size_t>(movie.frame_count() - 1));

  for (int t = 0; t + 1 < input->frame_count(); ++t) {
    const GradientTriplet g = gradients_for_pair(*input, t);
    FlowField field(gw, gh, t, valid);
    parallel_for(valid.y0, valid.y0 + valid.height, jobs, [&](int cy) {
      for (int cx = valid.x0; cx < valid.x0 + valid.width; ++cx) {
        const LocalSystem s = assemble_system(g, window, cx, cy);
        const EigenPair ev = eigen2x2(s.m11, s.m12, s.m22);
        field.lambda_min(cx, cy) = std::max(ev.lambda_min, 0.0);
        field.lambda_max(cx, cy) = std::max(ev.lambda_max, 0.0);
        if (const auto flow = solve_flow(s)) {
          field.u(cx, cy) = flow->x;
          field.v(cx, cy) = flow->y;
        }
      }
    });
    seq.fields.push_back(std::move(field));
  }
  return seq;
}

}  // namespace caflow
