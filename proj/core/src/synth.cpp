#include "caflow/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace caflow {

namespace {

// Box-Muller on top of mt19937_64: bit-reproducible across standard
// libraries, unlike std::normal_distribution.
class GaussianNoise {
public:
  explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;          // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double model_value(const SynthSpec& s, double x, double y, double t) {
  switch (s.kind) {
    case SynthKind::constant:
      return s.background;
    case SynthKind::translating_blob: {
      const double dx = x - s.blob_cx - s.blob_vx * t;
      const double dy = y - s.blob_cy - s.blob_vy * t;
      return s.background +
             s.blob_amplitude *
                 std::exp(-(dx * dx + dy * dy) / (2.0 * s.blob_sigma * s.blob_sigma));
    }
    case SynthKind::space_time_ramp:
      return s.ramp_a * x + s.ramp_b * y + s.ramp_c * t;
    case SynthKind::radial_wave: {
      const double r = std::hypot(x - s.wave_ox, y - s.wave_oy);
      const double d = r - s.wave_speed * t;
      return s.background +
             s.wave_amplitude * std::exp(-(d * d) / (2.0 * s.wave_width * s.wave_width));
    }
  }
  return 0.0;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw ParameterError(std::string(what) + " must be finite");
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 2 || height < 2)
    throw ParameterError("synthetic frames must be at least 2x2");
  if (frame_count < 2) throw ParameterError("need at least 2 frames");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
    throw ParameterError("noise sigma must be finite and >= 0");
  calibration.validate();
  require_finite(background, "background");
  switch (kind) {
    case SynthKind::constant:
      break;
    case SynthKind::translating_blob:
      require_finite(blob_cx, "blob center");
      require_finite(blob_cy, "blob center");
      require_finite(blob_amplitude, "blob amplitude");
      require_finite(blob_vx, "blob velocity");
      require_finite(blob_vy, "blob velocity");
      if (!(blob_sigma > 0.0) || !std::isfinite(blob_sigma))
        throw ParameterError("blob sigma must be > 0");
      break;
    case SynthKind::space_time_ramp:
      require_finite(ramp_a, "ramp coefficient");
      require_finite(ramp_b, "ramp coefficient");
      require_finite(ramp_c, "ramp coefficient");
      break;
    case SynthKind::radial_wave:
      require_finite(wave_ox, "wave origin");
      require_finite(wave_oy, "wave origin");
      require_finite(wave_speed, "wave speed");
      require_finite(wave_amplitude, "wave amplitude");
      if (!(wave_width > 0.0) || !std::isfinite(wave_width))
        throw ParameterError("annulus width must be > 0");
      break;
  }
}

MovieStack generate(const SynthSpec& spec) {
  spec.validate();
  MovieStack movie;
  movie.width = spec.width;
  movie.height = spec.height;
  movie.calibration = spec.calibration;
  movie.frames.reserve(static_cast<std::size_t>(spec.frame_count));

  GaussianNoise noise(spec.seed);
  for (int t = 0; t < spec.frame_count; ++t) {
    Image<double> frame(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
      double* row = frame.row(y);
      for (int x = 0; x < spec.width; ++x)
        row[x] = model_value(spec, x, y, t);
    }
    if (spec.noise_sigma > 0.0) {
      for (double& px : frame.pixels()) px += spec.noise_sigma * noise.next();
    }
    movie.frames.push_back(std::move(frame));
  }
  return movie;
}

GroundTruthFlow ground_truth_flow(const SynthSpec& spec, int t_index) {
  spec.validate();
  if (spec.kind == SynthKind::constant)
    throw ParameterError("constant movies have no motion to describe");
  if (t_index < 0 || t_index + 1 >= spec.frame_count)
    throw OutOfRangeError("pair index " + std::to_string(t_index) +
                          " out of range for " + std::to_string(spec.frame_count) +
                          " frames");

  GroundTruthFlow gt{Image<double>(spec.width, spec.height, 0.0),
                     Image<double>(spec.width, spec.height, 0.0),
                     Image<std::uint8_t>(spec.width, spec.height, 0), false};

  constexpr double support_fraction = 0.01;
  switch (spec.kind) {
    case SynthKind::constant:
      break;  // unreachable, rejected above
    case SynthKind::translating_blob: {
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          gt.u(x, y) = spec.blob_vx;
          gt.v(x, y) = spec.blob_vy;
          const double dx = x - spec.blob_cx - spec.blob_vx * t_index;
          const double dy = y - spec.blob_cy - spec.blob_vy * t_index;
          const double profile =
              std::exp(-(dx * dx + dy * dy) / (2.0 * spec.blob_sigma * spec.blob_sigma));
          gt.support(x, y) = profile > support_fraction ? 1 : 0;
        }
      }
      break;
    }
    case SynthKind::space_time_ramp: {
      // I = a x + b y + c t moves only along its spatial gradient; the
      // minimum-norm solution of a u + b v = -c is reported and the
      // one-dimensional ambiguity flagged.
      const double g2 = spec.ramp_a * spec.ramp_a + spec.ramp_b * spec.ramp_b;
      const double u0 = g2 > 0.0 ? -spec.ramp_c * spec.ramp_a / g2 : 0.0;
      const double v0 = g2 > 0.0 ? -spec.ramp_c * spec.ramp_b / g2 : 0.0;
      gt.u.fill(u0);
      gt.v.fill(v0);
      gt.support.fill(1);
      gt.aperture_ambiguous = true;
      break;
    }
    case SynthKind::radial_wave: {
      const double radius_t = spec.wave_speed * t_index;
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const double dx = x - spec.wave_ox;
          const double dy = y - spec.wave_oy;
          const double r = std::hypot(dx, dy);
          const double d = r - radius_t;
          const double profile =
              std::exp(-(d * d) / (2.0 * spec.wave_width * spec.wave_width));
          if (r > 0.0 && profile > support_fraction) {
            gt.u(x, y) = spec.wave_speed * dx / r;
            gt.v(x, y) = spec.wave_speed * dy / r;
            gt.support(x, y) = 1;
          }
        }
      }
      break;
    }
  }
  return gt;
}

}  // namespace caflow
