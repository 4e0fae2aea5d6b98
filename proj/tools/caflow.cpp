// caflow: dense optical flow for calibrated fluorescence movies.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "caflow/analysis.hpp"
#include "caflow/errors.hpp"
#include "caflow/flow.hpp"
#include "caflow/flow_io.hpp"
#include "caflow/movie.hpp"
#include "caflow/ppm.hpp"
#include "caflow/presets.hpp"
#include "caflow/synth.hpp"

namespace {

using namespace caflow;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw ParameterError(std::string("cannot parse ") + what + " '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

RegionOfInterest parse_roi(const std::string& text) {
  const auto v = parse_double_list(text, "ROI");
  if (v.size() != 4) throw ParameterError("ROI must be x,y,w,h");
  for (double d : v)
    if (d != std::floor(d)) throw ParameterError("ROI values must be integers");
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
          static_cast<int>(v[3])};
}

std::vector<Vec2> parse_seeds(const std::string& text) {
  std::vector<Vec2> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t semi = text.find(';', start);
    const std::string item =
        text.substr(start, semi == std::string::npos ? semi : semi - start);
    const auto v = parse_double_list(item, "seed");
    if (v.size() != 2) throw ParameterError("each seed must be x,y");
    seeds.push_back({v[0], v[1]});
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  if (seeds.empty()) throw ParameterError("no seeds given");
  return seeds;
}

std::size_t count_reliable(const FlowField& f, double threshold) {
  std::size_t n = 0;
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      if (f.lambda_min(x, y) > threshold && std::isfinite(f.u(x, y)) &&
          std::isfinite(f.v(x, y)))
        ++n;
  return n;
}

RegionOfInterest full_plane_roi(const FlowSequence& seq) {
  return {0, 0, seq.width(), seq.height()};
}

// Comment line at the top of the CSV so the physical extent of the analysis
// window travels with the numbers.
std::string roi_comment(const RegionOfInterest& roi, const Calibration& cal,
                        double threshold) {
  const double w_um = roi.width * cal.microns_per_pixel;
  const double h_um = roi.height * cal.microns_per_pixel;
  return "# roi_px=" + std::to_string(roi.x0) + ',' + std::to_string(roi.y0) +
         ',' + std::to_string(roi.width) + ',' + std::to_string(roi.height) +
         " roi_um=" + fmt(w_um) + 'x' + fmt(h_um) + " threshold=" +
         fmt(threshold) + '\n';
}

int cmd_flow(const std::string& movie_dir, const std::string& out_path,
             const std::string& preset_name, std::optional<int> window,
             std::optional<double> threshold, double pre_smooth, int jobs) {
  MovieStack movie = load_movie(movie_dir);

  FlowParams params;
  if (!preset_name.empty()) {
    const auto preset = find_preset(preset_name);
    if (!preset) {
      std::string known;
      for (const Preset& p : presets()) {
        if (!known.empty()) known += ", ";
        known += p.name;
      }
      throw ParameterError("unknown preset '" + preset_name + "' (known: " + known + ")");
    }
    params.window_width = preset->window_width;
    params.eigenvalue_threshold = preset->eigenvalue_threshold;
    if (std::fabs(movie.calibration.frame_rate_hz - preset->frame_rate_hz) > 1e-9) {
      std::fprintf(stderr,
                   "warning: movie frame rate %s Hz differs from preset '%s' "
                   "(%s Hz); using the movie's calibration\n",
                   fmt(movie.calibration.frame_rate_hz).c_str(), preset->name.data(),
                   fmt(preset->frame_rate_hz).c_str());
    }
  } else {
    params.window_width = *window;
  }
  if (threshold) params.eigenvalue_threshold = *threshold;
  params.pre_smooth_sigma = pre_smooth;

  const FlowSequence seq = compute_flow_field(movie, params, jobs);
  write_flow_file(seq, out_path);

  const PixelRect& valid = seq.valid();
  std::printf("valid region: origin (%d,%d) extent %dx%d\n", valid.x0, valid.y0,
              valid.width, valid.height);
  for (const FlowField& f : seq.fields)
    std::printf("pair %d: reliable %zu (threshold %s)\n", f.t_index,
                count_reliable(f, params.eigenvalue_threshold),
                fmt(params.eigenvalue_threshold).c_str());
  std::printf("wrote %s (%d pairs)\n", out_path.c_str(), seq.pair_count());
  return 0;
}

int cmd_mask_sweep(const std::string& flow_path, const std::string& taus_text,
                   const std::string& out_path, const std::string& render_prefix) {
  const auto taus = parse_double_list(taus_text, "threshold list");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus[i]) || taus[i] < 0.0)
      throw ParameterError("thresholds must be finite and >= 0");
    if (i > 0 && !(taus[i] > taus[i - 1]))
      throw ParameterError("thresholds must be strictly ascending");
  }

  const FlowSequence seq = read_flow_file(flow_path);
  std::ofstream csv(out_path, std::ios::trunc);
  if (!csv) throw IoError("cannot create " + out_path);
  csv << "tau,pair,reliable_count\n";
  for (double tau : taus) {
    std::size_t total = 0;
    for (const FlowField& f : seq.fields) {
      const std::size_t n = count_reliable(f, tau);
      total += n;
      csv << fmt(tau) << ',' << f.t_index << ',' << n << '\n';
    }
    std::printf("tau %s: total reliable %zu\n", fmt(tau).c_str(), total);
  }
  if (!csv) throw IoError("short write to " + out_path);

  if (!render_prefix.empty()) {
    // lambda_min grayscale with one contour color per threshold, on a
    // few representative pairs
    double lambda_cap = 0.0;
    for (const FlowField& f : seq.fields)
      for (double l : f.lambda_min.pixels()) lambda_cap = std::max(lambda_cap, l);

    std::vector<int> picks{0, seq.pair_count() / 2, seq.pair_count() - 1};
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (int p : picks) {
      const FlowField& f = seq.fields[static_cast<std::size_t>(p)];
      Image<Rgb8> img(f.width, f.height);
      for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
          const double g =
              lambda_cap > 0.0 ? f.lambda_min(x, y) / lambda_cap : 0.0;
          const auto v = static_cast<std::uint8_t>(std::lround(255.0 * g));
          img(x, y) = {v, v, v};
        }
      }
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const Rgb8 color = rainbow_color(
            taus.size() > 1 ? static_cast<double>(i) / (taus.size() - 1) : 0.0);
        const double tau = taus[i];
        for (int y = 0; y < f.height; ++y) {
          for (int x = 0; x < f.width; ++x) {
            const bool in = f.lambda_min(x, y) > tau;
            const bool edge =
                (x + 1 < f.width && (f.lambda_min(x + 1, y) > tau) != in) ||
                (y + 1 < f.height && (f.lambda_min(x, y + 1) > tau) != in);
            if (edge) img(x, y) = color;
          }
        }
      }
      std::string meta = "render=lambda_min_contours\npair=" + std::to_string(p) +
                         "\nscale_max=" + fmt(lambda_cap) +
                         "\ncolormap=grayscale_lambda_min\n";
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const Rgb8 c = rainbow_color(
            taus.size() > 1 ? static_cast<double>(i) / (taus.size() - 1) : 0.0);
        meta += "contour tau=" + fmt(taus[i]) + " rgb=" + std::to_string(c.r) + "," +
                std::to_string(c.g) + "," + std::to_string(c.b) + "\n";
      }
      char name[32];
      std::snprintf(name, sizeof name, "_pair%06d.ppm", p);
      write_ppm_with_meta(img, meta, render_prefix + name);
      std::printf("wrote %s%s\n", render_prefix.c_str(), name);
    }
  }
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_hist(const std::string& flow_path, double threshold,
             const std::string& roi_text, std::optional<int> bins,
             const std::string& edges_text, const std::string& out_path) {
  const FlowSequence seq = read_flow_file(flow_path);
  const RegionOfInterest roi =
      roi_text.empty() ? full_plane_roi(seq) : parse_roi(roi_text);

  std::vector<double> edges;
  if (!edges_text.empty()) {
    edges = parse_double_list(edges_text, "bin edges");
  } else {
    // uniform bins up to the largest reliable speed in the ROI
    const int n = bins.value_or(20);
    if (n < 1) throw ParameterError("bin count must be >= 1");
    const RoiStats probe = roi_stats(seq, roi, threshold);
    double hi = 0.0;
    if (probe.count > 0) {
      const double scale = seq.calibration.px_per_frame_to_um_per_s();
      for (const FlowField& f : seq.fields)
        for (int y = roi.y0; y < roi.y0 + roi.height; ++y)
          for (int x = roi.x0; x < roi.x0 + roi.width; ++x)
            if (f.lambda_min(x, y) > threshold && std::isfinite(f.u(x, y)) &&
                std::isfinite(f.v(x, y)))
              hi = std::max(hi, std::hypot(f.u(x, y), f.v(x, y)) * scale);
    }
    if (hi <= 0.0) hi = 1.0;
    for (int i = 0; i <= n; ++i) edges.push_back(hi * i / n);
  }

  const SpeedHistogram hist = roi_speed_histogram(seq, roi, threshold, edges);

  std::ofstream csv(out_path, std::ios::trunc);
  if (!csv) throw IoError("cannot create " + out_path);
  csv << roi_comment(roi, seq.calibration, threshold);
  csv << "bin_lo_um_per_s,bin_hi_um_per_s,count\n";
  if (hist.total > 0) {
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
      csv << fmt(hist.bin_edges[i]) << ',' << fmt(hist.bin_edges[i + 1]) << ','
          << hist.counts[i] << '\n';
  }
  if (!csv) throw IoError("short write to " + out_path);

  if (hist.total > 0)
    std::printf("%llu reliable samples, mode bin center %s um/s\n",
                static_cast<unsigned long long>(hist.total),
                fmt(hist.mode_bin_center()).c_str());
  else
    std::printf("no reliable samples in the ROI\n");
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_stats(const std::string& flow_path, double threshold,
              const std::string& roi_text, const std::string& out_path) {
  const FlowSequence seq = read_flow_file(flow_path);
  const RegionOfInterest roi =
      roi_text.empty() ? full_plane_roi(seq) : parse_roi(roi_text);
  const RoiStats st = roi_stats(seq, roi, threshold);

  std::string body = roi_comment(roi, seq.calibration, threshold);
  body += "count,mean_speed_um_per_s,stddev_um_per_s,mean_direction_deg\n";
  if (st.count > 0) {
    body += std::to_string(st.count) + "," + fmt(st.mean_speed_um_s) + "," +
            fmt(st.stddev_um_s) + "," + fmt(st.mean_direction_deg) + "\n";
  }
  if (out_path.empty()) {
    std::fputs(body.c_str(), stdout);
  } else {
    std::ofstream csv(out_path, std::ios::trunc);
    if (!csv) throw IoError("cannot create " + out_path);
    csv << body;
    if (!csv) throw IoError("short write to " + out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_composite(const std::string& flow_path, double threshold, int stride,
                  double gain, const std::string& out_path) {
  const FlowSequence seq = read_flow_file(flow_path);
  CompositeOptions opt;
  opt.threshold = threshold;
  opt.stride = stride;
  opt.arrow_gain = gain;
  const RenderedImage render = temporal_composite(seq, opt);
  write_ppm_with_meta(render.pixels, render.meta_text, out_path);
  std::printf("wrote %s and %s.meta.txt\n", out_path.c_str(), out_path.c_str());
  return 0;
}

int cmd_trace(const std::string& flow_path, const std::string& seeds_text,
              double threshold, const std::string& out_path) {
  const FlowSequence seq = read_flow_file(flow_path);
  const auto seeds = parse_seeds(seeds_text);
  const auto traces = trace_paths(seq, seeds, threshold);

  const double um_per_px = seq.calibration.microns_per_pixel;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const PathTrace& tr = traces[i];
    const PathPoint& a = tr.points.front();
    const PathPoint& b = tr.points.back();
    const double dx_um = (b.x - a.x) * um_per_px;
    const double dy_um = (b.y - a.y) * um_per_px;
    std::printf("seed %zu (%s,%s): %zu steps, displacement (%s, %s) um, "
                "net %s um, termination=%s\n",
                i, fmt(tr.seed.x).c_str(), fmt(tr.seed.y).c_str(),
                tr.points.size() - 1, fmt(dx_um).c_str(), fmt(dy_um).c_str(),
                fmt(std::hypot(dx_um, dy_um)).c_str(), to_string(tr.termination));
  }

  if (!out_path.empty()) {
    std::ofstream csv(out_path, std::ios::trunc);
    if (!csv) throw IoError("cannot create " + out_path);
    csv << "seed_index,point_index,t_seconds,x_px,y_px\n";
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& pts = traces[i].points;
      for (std::size_t j = 0; j < pts.size(); ++j)
        csv << i << ',' << j << ',' << fmt(pts[j].t_seconds) << ','
            << fmt(pts[j].x) << ',' << fmt(pts[j].y) << '\n';
    }
    if (!csv) throw IoError("short write to " + out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_match(const std::string& flow_path, const std::string& kernel_path,
              std::optional<int> divergence_width, int pair, double threshold,
              const std::string& out_path) {
  const FlowSequence seq = read_flow_file(flow_path);
  if (pair < 0 || pair >= seq.pair_count())
    throw OutOfRangeError("pair " + std::to_string(pair) + " out of range (file has " +
                          std::to_string(seq.pair_count()) + ")");

  FlowField kernel;
  if (divergence_width) {
    kernel = divergence_kernel(*divergence_width);
  } else {
    FlowSequence kseq = read_flow_file(kernel_path);
    if (kseq.pair_count() != 1)
      throw ParameterError("kernel file must hold a single pair, got " +
                           std::to_string(kseq.pair_count()));
    kernel = std::move(kseq.fields.front());
  }

  const FlowField& field = seq.fields[static_cast<std::size_t>(pair)];
  const MatchMap map = clifford_match(field, kernel, threshold);

  Image<Rgb8> img(map.response.width(), map.response.height(), Rgb8{0, 0, 0});
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double r = map.response(x, y);
      if (std::isfinite(r)) img(x, y) = diverging_color(r);
    }

  int ax = 0, ay = 0;
  double best = 0.0;
  const bool found = map.argmax(ax, ay, best);
  std::string meta = "render=pattern_match_response\npair=" + std::to_string(pair) +
                     "\nkernel=" + std::to_string(map.kernel_width) + "x" +
                     std::to_string(map.kernel_height) + "\nthreshold=" +
                     fmt(threshold) +
                     "\ncolormap=diverging_blue_white_red\nscale=[-1,1]\n" +
                     "undefined=black\n";
  if (found)
    meta += "argmax=" + std::to_string(ax) + "," + std::to_string(ay) +
            " response=" + fmt(best) + "\n";
  write_ppm_with_meta(img, meta, out_path);

  if (found)
    std::printf("argmax x=%d y=%d response=%s\n", ax, ay, fmt(best).c_str());
  else
    std::printf("no defined response\n");
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_synth(const std::string& kind_name, int width, int height, int frames,
              double noise, std::uint64_t seed, double frame_rate, double um_per_px,
              double background, const std::string& center_text, double blob_sigma,
              double amplitude, const std::string& velocity_text,
              const std::string& coeffs_text, const std::string& origin_text,
              double speed, double annulus_width, const std::string& out_dir) {
  SynthSpec spec;
  spec.width = width;
  spec.height = height;
  spec.frame_count = frames;
  spec.noise_sigma = noise;
  spec.seed = seed;
  spec.calibration = {frame_rate, um_per_px};
  spec.background = background;

  const double cx_default = (width - 1) / 2.0;
  const double cy_default = (height - 1) / 2.0;

  if (kind_name == "constant") {
    spec.kind = SynthKind::constant;
  } else if (kind_name == "blob") {
    spec.kind = SynthKind::translating_blob;
    const auto c = center_text.empty() ? std::vector<double>{cx_default, cy_default}
                                       : parse_double_list(center_text, "center");
    if (c.size() != 2) throw ParameterError("center must be x,y");
    spec.blob_cx = c[0];
    spec.blob_cy = c[1];
    spec.blob_sigma = blob_sigma;
    spec.blob_amplitude = amplitude;
    const auto v = velocity_text.empty() ? std::vector<double>{0.0, 0.0}
                                         : parse_double_list(velocity_text, "velocity");
    if (v.size() != 2) throw ParameterError("velocity must be vx,vy");
    spec.blob_vx = v[0];
    spec.blob_vy = v[1];
  } else if (kind_name == "ramp") {
    spec.kind = SynthKind::space_time_ramp;
    const auto c = coeffs_text.empty()
                       ? std::vector<double>{1.0, 0.0, -0.5}
                       : parse_double_list(coeffs_text, "ramp coefficients");
    if (c.size() != 3) throw ParameterError("coefficients must be a,b,c");
    spec.ramp_a = c[0];
    spec.ramp_b = c[1];
    spec.ramp_c = c[2];
  } else if (kind_name == "wave") {
    spec.kind = SynthKind::radial_wave;
    const auto o = origin_text.empty() ? std::vector<double>{cx_default, cy_default}
                                       : parse_double_list(origin_text, "origin");
    if (o.size() != 2) throw ParameterError("origin must be x,y");
    spec.wave_ox = o[0];
    spec.wave_oy = o[1];
    spec.wave_speed = speed;
    spec.wave_width = annulus_width;
    spec.wave_amplitude = amplitude;
  } else {
    throw ParameterError("unknown kind '" + kind_name +
                         "' (known: constant, blob, ramp, wave)");
  }

  const MovieStack movie = generate(spec);
  const std::size_t clamped = save_movie(movie, out_dir);
  if (clamped > 0)
    std::fprintf(stderr, "warning: %zu samples clamped to the 16-bit range\n", clamped);

  switch (spec.kind) {
    case SynthKind::constant:
      std::printf("ground truth: no motion (constant movie)\n");
      break;
    case SynthKind::translating_blob:
      std::printf("ground truth: uniform velocity (%s, %s) px/frame on the blob\n",
                  fmt(spec.blob_vx).c_str(), fmt(spec.blob_vy).c_str());
      break;
    case SynthKind::space_time_ramp: {
      const GroundTruthFlow gt = ground_truth_flow(spec, 0);
      std::printf("ground truth: minimum-norm velocity (%s, %s) px/frame%s\n",
                  fmt(gt.u(0, 0)).c_str(), fmt(gt.v(0, 0)).c_str(),
                  gt.aperture_ambiguous ? " (direction ambiguous along isophotes)"
                                        : "");
      break;
    }
    case SynthKind::radial_wave:
      std::printf("ground truth: radial expansion at %s px/frame\n",
                  fmt(spec.wave_speed).c_str());
      break;
  }
  std::printf("wrote %d frames to %s\n", movie.frame_count(), out_dir.c_str());
  return 0;
}

int cmd_info(const std::string& path) {
  if (std::filesystem::is_directory(path)) {
    const MovieStack movie = load_movie(path);
    std::printf("movie: %d frames, %dx%d px\n", movie.frame_count(), movie.width,
                movie.height);
    std::printf("calibration: %s Hz, %s um/px\n",
                fmt(movie.calibration.frame_rate_hz).c_str(),
                fmt(movie.calibration.microns_per_pixel).c_str());
    double lo = movie.frames.front().pixels().front();
    double hi = lo;
    for (const auto& f : movie.frames)
      for (double v : f.pixels()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    std::printf("intensity range: [%s, %s]\n", fmt(lo).c_str(), fmt(hi).c_str());
  } else {
    const FlowSequence seq = read_flow_file(path);
    std::printf("flow file: %d pairs, plane %dx%d px\n", seq.pair_count(), seq.width(),
                seq.height());
    const PixelRect& valid = seq.valid();
    std::printf("valid region: origin (%d,%d) extent %dx%d\n", valid.x0, valid.y0,
                valid.width, valid.height);
    std::printf("calibration: %s Hz, %s um/px\n",
                fmt(seq.calibration.frame_rate_hz).c_str(),
                fmt(seq.calibration.microns_per_pixel).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense optical flow for calibrated fluorescence movies"};
  app.require_subcommand(1);
  // let the global --jobs flag appear after the subcommand name too
  app.fallthrough();

  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (0 = all hardware threads)")
      ->capture_default_str();

  std::function<int()> action;

  // flow
  {
    auto* cmd = app.add_subcommand("flow", "estimate flow fields from a movie");
    auto movie_dir = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto preset = std::make_shared<std::string>();
    auto window = std::make_shared<std::optional<int>>();
    auto threshold = std::make_shared<std::optional<double>>();
    auto pre_smooth = std::make_shared<double>(0.0);
    cmd->add_option("movie_dir", *movie_dir, "directory with frame_*.pgm + calibration.txt")
        ->required();
    cmd->add_option("-o,--out", *out, "output flow file")->required();
    auto* opt_preset = cmd->add_option("--preset", *preset, "parameter preset name");
    auto* opt_window = cmd->add_option("--window", *window, "analysis window width (odd)");
    opt_preset->excludes(opt_window);
    opt_window->excludes(opt_preset);
    cmd->add_option("--threshold", *threshold,
                    "reliability eigenvalue threshold (overrides the preset's)");
    cmd->add_option("--pre-smooth", *pre_smooth, "Gaussian pre-smoothing sigma (px)");
    cmd->callback([=, &action, &jobs] {
      if (preset->empty() && !window->has_value())
        throw CLI::ValidationError("flow", "give exactly one of --preset or --window");
      action = [=, &jobs] {
        return cmd_flow(*movie_dir, *out, *preset, *window, *threshold, *pre_smooth,
                        jobs);
      };
    });
  }

  // mask-sweep
  {
    auto* cmd = app.add_subcommand("mask-sweep",
                                   "reliable-pixel counts across thresholds");
    auto flow_path = std::make_shared<std::string>();
    auto taus = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto render_prefix = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    cmd->add_option("--taus", *taus, "ascending thresholds, comma separated")->required();
    cmd->add_option("-o,--out", *out, "output CSV")->required();
    cmd->add_option("--render-prefix", *render_prefix,
                    "also write lambda_min contour renders with this path prefix");
    cmd->callback([=, &action] {
      action = [=] { return cmd_mask_sweep(*flow_path, *taus, *out, *render_prefix); };
    });
  }

  // hist
  {
    auto* cmd = app.add_subcommand("hist", "ROI speed histogram (um/s)");
    auto flow_path = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.0);
    auto roi = std::make_shared<std::string>();
    auto bins = std::make_shared<std::optional<int>>();
    auto edges = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    cmd->add_option("--threshold", *threshold, "reliability threshold")->required();
    cmd->add_option("--roi", *roi, "x,y,w,h in flow-plane px (default: whole plane)");
    auto* opt_bins = cmd->add_option("--bins", *bins, "uniform bin count (default 20)");
    auto* opt_edges = cmd->add_option("--edges", *edges, "explicit bin edges, ascending");
    opt_bins->excludes(opt_edges);
    opt_edges->excludes(opt_bins);
    cmd->add_option("-o,--out", *out, "output CSV")->required();
    cmd->callback([=, &action] {
      action = [=] { return cmd_hist(*flow_path, *threshold, *roi, *bins, *edges, *out); };
    });
  }

  // stats
  {
    auto* cmd = app.add_subcommand("stats", "ROI speed/direction summary");
    auto flow_path = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.0);
    auto roi = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    cmd->add_option("--threshold", *threshold, "reliability threshold")->required();
    cmd->add_option("--roi", *roi, "x,y,w,h in flow-plane px (default: whole plane)");
    cmd->add_option("-o,--out", *out, "output CSV (default: stdout)");
    cmd->callback([=, &action] {
      action = [=] { return cmd_stats(*flow_path, *threshold, *roi, *out); };
    });
  }

  // composite
  {
    auto* cmd = app.add_subcommand("composite",
                                   "temporal composite render (color = first reliable time)");
    auto flow_path = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.0);
    auto stride = std::make_shared<int>(4);
    auto gain = std::make_shared<double>(4.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    cmd->add_option("--threshold", *threshold, "reliability threshold")->required();
    cmd->add_option("--stride", *stride, "pixel subsampling stride")->capture_default_str();
    cmd->add_option("--gain", *gain, "arrow px per px/frame")->capture_default_str();
    cmd->add_option("-o,--out", *out, "output PPM")->required();
    cmd->callback([=, &action] {
      action = [=] { return cmd_composite(*flow_path, *threshold, *stride, *gain, *out); };
    });
  }

  // trace
  {
    auto* cmd = app.add_subcommand("trace", "integrate particle paths through the flow");
    auto flow_path = std::make_shared<std::string>();
    auto seeds = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    cmd->add_option("--seeds", *seeds, "seed points \"x,y;x,y;...\" in flow-plane px")
        ->required();
    cmd->add_option("--threshold", *threshold, "reliability threshold")->required();
    cmd->add_option("-o,--out", *out, "write path points CSV");
    cmd->callback([=, &action] {
      action = [=] { return cmd_trace(*flow_path, *seeds, *threshold, *out); };
    });
  }

  // match
  {
    auto* cmd = app.add_subcommand("match", "normalized vector-pattern match");
    auto flow_path = std::make_shared<std::string>();
    auto kernel_path = std::make_shared<std::string>();
    auto divergence = std::make_shared<std::optional<int>>();
    auto pair = std::make_shared<int>(0);
    auto threshold = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("flow_file", *flow_path)->required();
    auto* opt_kernel =
        cmd->add_option("--kernel", *kernel_path, "single-pair kernel flow file");
    auto* opt_div = cmd->add_option("--divergence", *divergence,
                                    "use a built-in divergence kernel of this width");
    opt_kernel->excludes(opt_div);
    opt_div->excludes(opt_kernel);
    cmd->add_option("--pair", *pair, "pair index to match against")->capture_default_str();
    cmd->add_option("--threshold", *threshold, "reliability threshold")->required();
    cmd->add_option("-o,--out", *out, "output PPM of the response map")->required();
    cmd->callback([=, &action] {
      if (kernel_path->empty() && !divergence->has_value())
        throw CLI::ValidationError("match",
                                   "give exactly one of --kernel or --divergence");
      action = [=] {
        return cmd_match(*flow_path, *kernel_path, *divergence, *pair, *threshold, *out);
      };
    });
  }

  // synth
  {
    auto* cmd = app.add_subcommand("synth", "generate a synthetic ground-truth movie");
    auto kind = std::make_shared<std::string>();
    auto width = std::make_shared<int>(64);
    auto height = std::make_shared<int>(64);
    auto frames = std::make_shared<int>(8);
    auto noise = std::make_shared<double>(0.0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto frame_rate = std::make_shared<double>(8.0);
    auto um_per_px = std::make_shared<double>(1.0);
    auto background = std::make_shared<double>(0.0);
    auto center = std::make_shared<std::string>();
    auto blob_sigma = std::make_shared<double>(3.0);
    auto amplitude = std::make_shared<double>(1000.0);
    auto velocity = std::make_shared<std::string>();
    auto coeffs = std::make_shared<std::string>();
    auto origin = std::make_shared<std::string>();
    auto speed = std::make_shared<double>(1.0);
    auto annulus = std::make_shared<double>(2.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--kind", *kind, "constant | blob | ramp | wave")->required();
    cmd->add_option("--width", *width)->capture_default_str();
    cmd->add_option("--height", *height)->capture_default_str();
    cmd->add_option("--frames", *frames)->capture_default_str();
    cmd->add_option("--noise", *noise, "Gaussian noise sigma (counts)")
        ->capture_default_str();
    cmd->add_option("--rng-seed", *seed, "noise RNG seed")->capture_default_str();
    cmd->add_option("--frame-rate", *frame_rate, "Hz")->capture_default_str();
    cmd->add_option("--microns-per-pixel", *um_per_px)->capture_default_str();
    cmd->add_option("--background", *background, "background level (constant value)")
        ->capture_default_str();
    cmd->add_option("--center", *center, "blob center x,y (default: image center)");
    cmd->add_option("--blob-sigma", *blob_sigma, "blob radius sigma (px)")
        ->capture_default_str();
    cmd->add_option("--amplitude", *amplitude, "blob/wave amplitude")
        ->capture_default_str();
    cmd->add_option("--velocity", *velocity, "blob velocity vx,vy (px/frame)");
    cmd->add_option("--coeffs", *coeffs,
                    "ramp coefficients a,b,c (default 1,0,-0.5)");
    cmd->add_option("--origin", *origin, "wave origin x,y (default: image center)");
    cmd->add_option("--speed", *speed, "wavefront speed (px/frame)")
        ->capture_default_str();
    cmd->add_option("--annulus-width", *annulus, "wavefront Gaussian width (px)")
        ->capture_default_str();
    cmd->add_option("-o,--out", *out, "output movie directory")->required();
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_synth(*kind, *width, *height, *frames, *noise, *seed, *frame_rate,
                         *um_per_px, *background, *center, *blob_sigma, *amplitude,
                         *velocity, *coeffs, *origin, *speed, *annulus, *out);
      };
    });
  }

  // info
  {
    auto* cmd = app.add_subcommand("info", "describe a movie directory or flow file");
    auto path = std::make_shared<std::string>();
    cmd->add_option("path", *path)->required();
    cmd->callback([=, &action] {
      action = [=] { return cmd_info(*path); };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
