#include <cmath>
#include <cstring>

#include "caflow/errors.hpp"
#include "caflow/synth.hpp"
#include "doctest.h"

using namespace caflow;

TEST_CASE("constant movies are flat at the background level") {
  SynthSpec s;
  s.kind = SynthKind::constant;
  s.width = 8;
  s.height = 6;
  s.frame_count = 3;
  s.background = 42.0;
  const MovieStack m = generate(s);
  REQUIRE(m.frame_count() == 3);
  for (const auto& f : m.frames)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 8; ++x) CHECK(f(x, y) == 42.0);
  CHECK(m.calibration.frame_rate_hz == 8.0);
}

TEST_CASE("ramp movies sample the plane equation exactly") {
  SynthSpec s;
  s.kind = SynthKind::space_time_ramp;
  s.width = 8;
  s.height = 8;
  s.frame_count = 3;
  s.ramp_a = 2.0;
  s.ramp_b = 0.0;
  s.ramp_c = -1.0;
  const MovieStack m = generate(s);
  CHECK(m.frames[2](3, 5) == 4.0);  // 2*3 + 0*5 - 1*2
  for (int t = 0; t < 3; ++t)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        CHECK(m.frames[t](x, y) == 2.0 * x - 1.0 * t);
}

TEST_CASE("blob translation by a whole pixel reproduces the earlier frame") {
  SynthSpec s;
  s.kind = SynthKind::translating_blob;
  s.width = 32;
  s.height = 32;
  s.frame_count = 3;
  s.background = 5.0;
  s.blob_cx = 12.0;
  s.blob_cy = 16.0;
  s.blob_sigma = 3.0;
  s.blob_amplitude = 900.0;
  s.blob_vx = 0.5;
  s.blob_vy = 0.0;
  const MovieStack m = generate(s);
  // after 2 frames the blob has moved exactly 1 px right
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x + 1 < 32; ++x)
      CHECK(m.frames[2](x + 1, y) == doctest::Approx(m.frames[0](x, y)).epsilon(1e-12));
}

TEST_CASE("noise is reproducible per seed and absent at sigma zero") {
  SynthSpec s;
  s.kind = SynthKind::translating_blob;
  s.width = 16;
  s.height = 16;
  s.frame_count = 2;
  s.blob_cx = 8.0;
  s.blob_cy = 8.0;
  s.blob_amplitude = 100.0;
  s.noise_sigma = 3.0;
  s.seed = 11;

  const MovieStack a = generate(s);
  const MovieStack b = generate(s);
  for (int t = 0; t < 2; ++t)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        CHECK(std::memcmp(&a.frames[t](x, y), &b.frames[t](x, y),
                          sizeof(double)) == 0);

  s.seed = 12;
  const MovieStack c = generate(s);
  int differing = 0;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (c.frames[0](x, y) != a.frames[0](x, y)) ++differing;
  CHECK(differing > 200);  // essentially every sample moves

  s.noise_sigma = 0.0;
  const MovieStack clean = generate(s);
  const double expect =
      100.0 * std::exp(-((3.0 - 8.0) * (3.0 - 8.0) + (8.0 - 8.0)) / (2.0 * 9.0));
  CHECK(clean.frames[0](3, 8) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("noise statistics look like the requested gaussian") {
  SynthSpec s;
  s.kind = SynthKind::constant;
  s.width = 100;
  s.height = 100;
  s.frame_count = 2;
  s.background = 1000.0;
  s.noise_sigma = 5.0;
  s.seed = 42;
  const MovieStack m = generate(s);
  double sum = 0.0, sum2 = 0.0;
  const int n = 100 * 100 * 2;
  for (const auto& f : m.frames)
    for (int y = 0; y < 100; ++y)
      for (int x = 0; x < 100; ++x) {
        sum += f(x, y) - 1000.0;
        sum2 += (f(x, y) - 1000.0) * (f(x, y) - 1000.0);
      }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.2);             // ~5 sigma of the mean estimator
  CHECK(std::sqrt(var) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("blob ground truth is the uniform velocity on its support") {
  SynthSpec s;
  s.kind = SynthKind::translating_blob;
  s.width = 32;
  s.height = 32;
  s.frame_count = 4;
  s.blob_cx = 16.0;
  s.blob_cy = 16.0;
  s.blob_sigma = 3.0;
  s.blob_amplitude = 1000.0;
  s.blob_vx = 0.5;
  s.blob_vy = 0.25;

  const GroundTruthFlow gt = ground_truth_flow(s, 1);
  CHECK(!gt.aperture_ambiguous);
  int on = 0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      if (!gt.support(x, y)) continue;
      ++on;
      CHECK(gt.u(x, y) == 0.5);
      CHECK(gt.v(x, y) == 0.25);
      // support follows the blob: the 1% contour at t=1 has radius
      // sigma * sqrt(2 ln 100) ~ 9.1 px around the advected center
      const double dx = x - (16.0 + 0.5);
      const double dy = y - (16.0 + 0.25);
      CHECK(std::hypot(dx, dy) < 9.2);
    }
  CHECK(on > 200);  // pi * 9.1^2 ~ 260 px
}

TEST_CASE("ramp ground truth is the flagged minimum-norm solution") {
  SynthSpec s;
  s.kind = SynthKind::space_time_ramp;
  s.width = 8;
  s.height = 8;
  s.frame_count = 2;
  s.ramp_a = 2.0;
  s.ramp_b = 0.0;
  s.ramp_c = -1.0;
  const GroundTruthFlow gt = ground_truth_flow(s, 0);
  CHECK(gt.aperture_ambiguous);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      CHECK(gt.support(x, y) == 1);
      CHECK(gt.u(x, y) == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(gt.v(x, y) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("wave ground truth points radially outward at the set speed") {
  SynthSpec s;
  s.kind = SynthKind::radial_wave;
  s.width = 64;
  s.height = 64;
  s.frame_count = 12;
  s.wave_ox = 32.0;
  s.wave_oy = 32.0;
  s.wave_speed = 2.0;
  s.wave_width = 2.0;
  s.wave_amplitude = 500.0;

  const int t = 5;  // ring radius 10 px
  const GroundTruthFlow gt = ground_truth_flow(s, t);
  CHECK(!gt.aperture_ambiguous);

  // on the diagonal at the ring radius the truth is speed/sqrt(2) each way
  const double d = 10.0 / std::sqrt(2.0);
  const int px = static_cast<int>(std::lround(32.0 + d));
  const int py = static_cast<int>(std::lround(32.0 + d));
  REQUIRE(gt.support(px, py) == 1);
  const double ux = gt.u(px, py);
  const double uy = gt.v(px, py);
  CHECK(std::hypot(ux, uy) == doctest::Approx(2.0).epsilon(1e-12));
  const double rx = px - 32.0, ry = py - 32.0;
  const double rn = std::hypot(rx, ry);
  // direction matches the outward radial unit vector
  CHECK(ux == doctest::Approx(2.0 * rx / rn).epsilon(1e-12));
  CHECK(uy == doctest::Approx(2.0 * ry / rn).epsilon(1e-12));

  // support hugs the annulus; far inside and outside are off
  CHECK(gt.support(32, 32) == 0);
  CHECK(gt.support(0, 0) == 0);
  int on = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (gt.support(x, y)) {
        ++on;
        const double r = std::hypot(x - 32.0, y - 32.0);
        CHECK(std::abs(r - 10.0) < 2.0 * std::sqrt(2.0 * std::log(100.0)) + 0.1);
      }
  CHECK(on > 100);
}

TEST_CASE("constant movies have no ground-truth motion") {
  SynthSpec s;
  s.kind = SynthKind::constant;
  CHECK_THROWS_AS(ground_truth_flow(s, 0), ParameterError);
}

TEST_CASE("spec validation rejects malformed scenes") {
  SynthSpec s;
  s.kind = SynthKind::translating_blob;
  s.width = 1;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.width = 16;
  s.height = 16;
  s.frame_count = 1;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.frame_count = 2;
  s.noise_sigma = -1.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.noise_sigma = 0.0;
  s.blob_sigma = 0.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.blob_sigma = 2.0;
  CHECK_NOTHROW(s.validate());
  s.calibration.frame_rate_hz = 0.0;
  CHECK_THROWS_AS(s.validate(), CalibrationError);
}

TEST_CASE("generate rejects an invalid spec and bad pair indices error") {
  SynthSpec s;
  s.kind = SynthKind::radial_wave;
  s.width = 16;
  s.height = 16;
  s.frame_count = 3;
  s.wave_ox = 8.0;
  s.wave_oy = 8.0;
  s.wave_speed = 1.0;
  s.wave_amplitude = 100.0;
  CHECK_NOTHROW(generate(s));
  CHECK_THROWS_AS(ground_truth_flow(s, 2), OutOfRangeError);
  CHECK_THROWS_AS(ground_truth_flow(s, -1), OutOfRangeError);

  s.wave_width = 0.0;
  CHECK_THROWS_AS(generate(s), ParameterError);
}
