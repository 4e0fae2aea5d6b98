#include "caflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace caflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_threshold(double threshold) {
  if (!std::isfinite(threshold) || threshold < 0.0)
    throw ParameterError("eigenvalue threshold must be finite and >= 0");
}

void check_roi(const RegionOfInterest& roi, int plane_w, int plane_h) {
  if (roi.width <= 0 || roi.height <= 0)
    throw ParameterError("ROI extent must be positive");
  if (roi.x0 < 0 || roi.y0 < 0 || roi.x0 + roi.width > plane_w ||
      roi.y0 + roi.height > plane_h)
    throw ParameterError("ROI exceeds the flow plane");
}

bool reliable(const FlowField& f, int x, int y, double threshold) {
  return f.lambda_min(x, y) > threshold && std::isfinite(f.u(x, y)) &&
         std::isfinite(f.v(x, y));
}

Rgb8 hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto q = [&](double t) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t + m, 0.0, 1.0)));
  };
  return {q(r), q(g), q(b)};
}

void draw_line(Image<Rgb8>& img, int x0, int y0, int x1, int y1, Rgb8 color) {
  int dx = std::abs(x1 - x0);
  const int sx = x0 < x1 ? 1 : -1;
  int dy = -std::abs(y1 - y0);
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (img.in_bounds(x0, y0)) img(x0, y0) = color;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

double SpeedHistogram::mode_bin_center() const {
  if (counts.empty()) return kNaN;
  const auto it = std::max_element(counts.begin(), counts.end());
  const auto i = static_cast<std::size_t>(it - counts.begin());
  return 0.5 * (bin_edges[i] + bin_edges[i + 1]);
}

SpeedHistogram roi_speed_histogram(const FlowSequence& seq,
                                   const RegionOfInterest& roi,
                                   double threshold,
                                   std::span<const double> bin_edges) {
  seq.validate();
  check_threshold(threshold);
  check_roi(roi, seq.width(), seq.height());
  if (bin_edges.size() < 2)
    throw ParameterError("need at least two bin edges");
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i)
    if (!(bin_edges[i] < bin_edges[i + 1]))
      throw ParameterError("bin edges must be strictly ascending");

  SpeedHistogram hist;
  hist.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  hist.counts.assign(bin_edges.size() - 1, 0);

  const double scale = seq.calibration.px_per_frame_to_um_per_s();
  for (const FlowField& f : seq.fields) {
    for (int y = roi.y0; y < roi.y0 + roi.height; ++y) {
      for (int x = roi.x0; x < roi.x0 + roi.width; ++x) {
        if (!reliable(f, x, y, threshold)) continue;
        const double speed = std::hypot(f.u(x, y), f.v(x, y)) * scale;
        // out-of-range samples land in the clamped end bins so the
        // total always equals the reliable-vector count
        auto it = std::upper_bound(hist.bin_edges.begin(), hist.bin_edges.end(), speed);
        std::size_t bin = static_cast<std::size_t>(it - hist.bin_edges.begin());
        bin = bin == 0 ? 0 : bin - 1;
        if (bin >= hist.counts.size()) bin = hist.counts.size() - 1;
        ++hist.counts[bin];
        ++hist.total;
      }
    }
  }
  return hist;
}

RoiStats roi_stats(const FlowSequence& seq, const RegionOfInterest& roi,
                   double threshold) {
  seq.validate();
  check_threshold(threshold);
  check_roi(roi, seq.width(), seq.height());

  const double scale = seq.calibration.px_per_frame_to_um_per_s();
  RoiStats st;
  double speed_sum = 0.0, speed_sq_sum = 0.0, u_sum = 0.0, v_sum = 0.0;
  for (const FlowField& f : seq.fields) {
    for (int y = roi.y0; y < roi.y0 + roi.height; ++y) {
      for (int x = roi.x0; x < roi.x0 + roi.width; ++x) {
        if (!reliable(f, x, y, threshold)) continue;
        const double ux = f.u(x, y) * scale;
        const double vy = f.v(x, y) * scale;
        const double speed = std::hypot(ux, vy);
        ++st.count;
        speed_sum += speed;
        speed_sq_sum += speed * speed;
        u_sum += ux;
        v_sum += vy;
      }
    }
  }
  if (st.count == 0) return st;
  const double n = static_cast<double>(st.count);
  st.mean_speed_um_s = speed_sum / n;
  st.stddev_um_s =
      std::sqrt(std::max(speed_sq_sum / n - st.mean_speed_um_s * st.mean_speed_um_s, 0.0));
  st.mean_direction_deg = std::atan2(v_sum, u_sum) * 180.0 / std::numbers::pi;
  return st;
}

Rgb8 rainbow_color(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return hsv_to_rgb(240.0 * (1.0 - s), 1.0, 1.0);
}

Rgb8 diverging_color(double s) {
  s = std::clamp(s, -1.0, 1.0);
  auto q = [](double t) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
  };
  return {q(s < 0.0 ? 1.0 + s : 1.0), q(1.0 - std::fabs(s)),
          q(s > 0.0 ? 1.0 - s : 1.0)};
}

RenderedImage temporal_composite(const FlowSequence& seq, const CompositeOptions& opt) {
  seq.validate();
  check_threshold(opt.threshold);
  if (opt.stride < 1) throw ParameterError("stride must be >= 1");
  if (!std::isfinite(opt.arrow_gain) || opt.arrow_gain < 0.0)
    throw ParameterError("arrow gain must be finite and >= 0");

  const int w = seq.width();
  const int h = seq.height();
  const int pairs = seq.pair_count();
  const double rate = seq.calibration.frame_rate_hz;
  const double max_len = std::hypot(w, h);

  RenderedImage out{Image<Rgb8>(w, h, Rgb8{0, 0, 0}), {}};
  for (int y = 0; y < h; y += opt.stride) {
    for (int x = 0; x < w; x += opt.stride) {
      int first = -1;
      for (int k = 0; k < pairs; ++k) {
        if (reliable(seq.fields[k], x, y, opt.threshold)) {
          first = k;
          break;
        }
      }
      if (first < 0) continue;
      const double s = pairs > 1 ? static_cast<double>(first) / (pairs - 1) : 0.0;
      const Rgb8 color = rainbow_color(s);
      double ax = seq.fields[first].u(x, y) * opt.arrow_gain;
      double ay = seq.fields[first].v(x, y) * opt.arrow_gain;
      const double len = std::hypot(ax, ay);
      if (len > max_len) {  // keep rasterization bounded
        ax *= max_len / len;
        ay *= max_len / len;
      }
      out.pixels(x, y) = color;
      draw_line(out.pixels, x, y, static_cast<int>(std::lround(x + ax)),
                static_cast<int>(std::lround(y + ay)), color);
    }
  }

  std::string meta;
  char line[224];
  std::snprintf(line, sizeof line,
                "render=temporal_composite\npairs=%d\nthreshold=%.9g\nstride=%d\n"
                "arrow_gain=%.9g\ncolormap=hsv_rainbow_blue_to_red\n"
                "color_scale_max_seconds=%.9g\n",
                pairs, opt.threshold, opt.stride, opt.arrow_gain,
                pairs > 1 ? (pairs - 1) / rate : 0.0);
  meta += line;
  for (int k = 0; k < pairs; ++k) {
    const double s = pairs > 1 ? static_cast<double>(k) / (pairs - 1) : 0.0;
    const Rgb8 c = rainbow_color(s);
    std::snprintf(line, sizeof line, "pair=%d t_seconds=%.9g rgb=%d,%d,%d\n", k,
                  (seq.fields[k].t_index) / rate, c.r, c.g, c.b);
    meta += line;
  }
  out.meta_text = std::move(meta);
  return out;
}

RenderedImage didt_render(const MovieStack& movie, int t_index) {
  movie.validate();
  if (t_index < 0 || t_index + 1 >= movie.frame_count())
    throw OutOfRangeError("pair index out of range");

  const Image<double>& f0 = movie.frames[t_index];
  const Image<double>& f1 = movie.frames[t_index + 1];
  const double rate = movie.calibration.frame_rate_hz;

  Image<double> rate_of_change(movie.width, movie.height);
  double limit = 0.0;
  for (std::size_t i = 0; i < rate_of_change.pixel_count(); ++i) {
    const double d = (f1.pixels()[i] - f0.pixels()[i]) * rate;
    rate_of_change.pixels()[i] = d;
    limit = std::max(limit, std::fabs(d));
  }

  RenderedImage out{Image<Rgb8>(movie.width, movie.height), {}};
  for (std::size_t i = 0; i < rate_of_change.pixel_count(); ++i) {
    const double s = limit > 0.0 ? rate_of_change.pixels()[i] / limit : 0.0;
    out.pixels.pixels()[i] = diverging_color(s);
  }

  char meta[256];
  std::snprintf(meta, sizeof meta,
                "render=didt\npair=%d\nunits=counts_per_second\nscale_min=%.9g\n"
                "scale_max=%.9g\ncolormap=diverging_blue_white_red\n",
                t_index, -limit, limit);
  out.meta_text = meta;
  return out;
}

const char* to_string(TraceEnd t) {
  switch (t) {
    case TraceEnd::left_valid_region: return "left_valid_region";
    case TraceEnd::entered_unreliable: return "entered_unreliable";
    case TraceEnd::end_of_movie: return "end_of_movie";
  }
  return "unknown";
}

std::vector<PathTrace> trace_paths(const FlowSequence& seq,
                                   std::span<const Vec2> seeds,
                                   double threshold) {
  seq.validate();
  check_threshold(threshold);
  const PixelRect& valid = seq.valid();
  for (const Vec2& s : seeds) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !valid.contains_point(s.x, s.y))
      throw ParameterError("seed outside the valid region");
  }

  const double rate = seq.calibration.frame_rate_hz;
  const int first_frame = seq.fields.front().t_index;

  std::vector<PathTrace> traces;
  traces.reserve(seeds.size());
  for (const Vec2& seed : seeds) {
    PathTrace trace;
    trace.seed = seed;
    trace.termination = TraceEnd::end_of_movie;
    double x = seed.x, y = seed.y;
    trace.points.push_back({first_frame / rate, x, y});

    for (int k = 0; k < seq.pair_count(); ++k) {
      const FlowField& f = seq.fields[k];
      // bilinear over the reliable stencil neighbors, renormalized
      const int x0 = static_cast<int>(std::floor(x));
      const int y0 = static_cast<int>(std::floor(y));
      const double fx = x - x0;
      const double fy = y - y0;
      double su = 0.0, sv = 0.0, sw = 0.0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
          if (wgt == 0.0) continue;
          const int px = x0 + dx;
          const int py = y0 + dy;
          if (!f.u.in_bounds(px, py) || !reliable(f, px, py, threshold)) continue;
          su += wgt * f.u(px, py);
          sv += wgt * f.v(px, py);
          sw += wgt;
        }
      }
      if (sw == 0.0) {
        trace.termination = TraceEnd::entered_unreliable;
        break;
      }
      x += su / sw;
      y += sv / sw;
      trace.points.push_back({(first_frame + k + 1) / rate, x, y});
      if (!valid.contains_point(x, y)) {
        trace.termination = TraceEnd::left_valid_region;
        break;
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

bool MatchMap::argmax(int& x, int& y, double& value) const {
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < response.height(); ++j) {
    for (int i = 0; i < response.width(); ++i) {
      const double r = response(i, j);
      if (std::isfinite(r) && r > best) {
        best = r;
        x = i;
        y = j;
        found = true;
      }
    }
  }
  if (found) value = best;
  return found;
}

MatchMap clifford_match(const FlowField& field, const FlowField& kernel,
                        double threshold) {
  check_threshold(threshold);
  if (kernel.width % 2 == 0 || kernel.height % 2 == 0)
    throw ParameterError("kernel dimensions must be odd");
  if (kernel.width > field.valid.width || kernel.height > field.valid.height)
    throw ParameterError("kernel larger than the field's valid region");

  // kernel pixels participate where their vector is defined (finite)
  std::size_t footprint = 0;
  double kernel_norm_sq = 0.0;
  for (int j = 0; j < kernel.height; ++j) {
    for (int i = 0; i < kernel.width; ++i) {
      const double ku = kernel.u(i, j);
      const double kv = kernel.v(i, j);
      if (!std::isfinite(ku) || !std::isfinite(kv)) continue;
      ++footprint;
      kernel_norm_sq += ku * ku + kv * kv;
    }
  }
  if (footprint == 0) throw ParameterError("kernel has no defined pixels");
  if (!(kernel_norm_sq > 0.0)) throw ParameterError("kernel norm is zero");
  const double kernel_norm = std::sqrt(kernel_norm_sq);

  const int hw = kernel.width / 2;
  const int hh = kernel.height / 2;
  MatchMap map{Image<double>(field.width, field.height, kNaN), kernel.width,
               kernel.height};

  for (int cy = hh; cy < field.height - hh; ++cy) {
    for (int cx = hw; cx < field.width - hw; ++cx) {
      double dot = 0.0, field_norm_sq = 0.0;
      std::size_t covered = 0;
      for (int j = 0; j < kernel.height; ++j) {
        const int py = cy - hh + j;
        for (int i = 0; i < kernel.width; ++i) {
          const double ku = kernel.u(i, j);
          const double kv = kernel.v(i, j);
          if (!std::isfinite(ku) || !std::isfinite(kv)) continue;
          const int px = cx - hw + i;
          if (!reliable(field, px, py, threshold)) continue;
          const double fu = field.u(px, py);
          const double fv = field.v(px, py);
          dot += ku * fu + kv * fv;
          field_norm_sq += fu * fu + fv * fv;
          ++covered;
        }
      }
      if (2 * covered < footprint || !(field_norm_sq > 0.0)) continue;
      map.response(cx, cy) =
          std::clamp(dot / (kernel_norm * std::sqrt(field_norm_sq)), -1.0, 1.0);
    }
  }
  return map;
}

FlowField divergence_kernel(int width) {
  if (width < 3 || width % 2 == 0)
    throw ParameterError("kernel width must be odd and >= 3");
  FlowField k(width, width, 0, PixelRect{0, 0, width, width});
  const int half = width / 2;
  for (int y = 0; y < width; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - half;
      const double dy = y - half;
      const double r = std::hypot(dx, dy);
      if (r > 0.0) {
        k.u(x, y) = dx / r;
        k.v(x, y) = dy / r;
      } else {
        k.u(x, y) = 0.0;
        k.v(x, y) = 0.0;
      }
    }
  }
  return k;
}

}  // namespace caflow
