#include <cmath>
#include <random>

#include "caflow/errors.hpp"
#include "caflow/gradient.hpp"
#include "caflow/movie.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace caflow;

static Image<double> ramp_frame(int w, int h, double a, double b, double c,
                                int t) {
  Image<double> f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) f(x, y) = a * x + b * y + c * t;
  return f;
}

static MovieStack ramp_movie(int w, int h, int frames, double a, double b,
                             double c) {
  MovieStack m;
  m.width = w;
  m.height = h;
  m.calibration = {8.0, 1.0};
  for (int t = 0; t < frames; ++t)
    m.frames.push_back(ramp_frame(w, h, a, b, c, t));
  return m;
}

TEST_CASE("conv2x2 x-kernel on the documented 2x2 patch") {
  Image<double> p(2, 2);
  p(0, 0) = 1;
  p(1, 0) = 2;
  p(0, 1) = 3;
  p(1, 1) = 4;
  const Image<double> out = conv2x2(p, x_derivative_kernel());
  REQUIRE(out.width() == 1);
  REQUIRE(out.height() == 1);
  // ((2-1) + (4-3)) / 4
  CHECK(out(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  const Image<double> oy = conv2x2(p, y_derivative_kernel());
  CHECK(oy(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const Image<double> ob = conv2x2(p, box_average_kernel());
  CHECK(ob(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("conv2x2 rejects planes smaller than the kernel") {
  Image<double> p(1, 5);
  CHECK_THROWS_AS(conv2x2(p, box_average_kernel()), InsufficientDataError);
  Image<double> q(5, 1);
  CHECK_THROWS_AS(conv2x2(q, box_average_kernel()), InsufficientDataError);
}

TEST_CASE("conv2x2 is linear and shift-consistent") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-10, 10);
  Image<double> p(9, 7), q(9, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) {
      p(x, y) = dist(rng);
      q(x, y) = dist(rng);
    }

  const Kernel2x2 k = x_derivative_kernel();
  Image<double> sum(9, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) sum(x, y) = 2.0 * p(x, y) + q(x, y);

  const Image<double> cp = conv2x2(p, k);
  const Image<double> cq = conv2x2(q, k);
  const Image<double> cs = conv2x2(sum, k);
  for (int y = 0; y < cs.height(); ++y)
    for (int x = 0; x < cs.width(); ++x)
      CHECK(cs(x, y) ==
            doctest::Approx(2.0 * cp(x, y) + cq(x, y)).epsilon(1e-12));

  // output at (x, y) describes the 2x2 block whose top-left is (x, y):
  // convolving a translated copy shifts the output by the same amount
  Image<double> shifted(9, 7);
  shifted.fill(0.0);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 8; ++x) shifted(x + 1, y + 1) = p(x, y);
  const Image<double> cshift = conv2x2(shifted, k);
  for (int y = 1; y < cshift.height(); ++y)
    for (int x = 1; x < cshift.width(); ++x)
      CHECK(cshift(x, y) == doctest::Approx(cp(x - 1, y - 1)).epsilon(1e-12));
}

TEST_CASE("stripe patterns respond with half the contrast") {
  const double amp = 6.0;
  Image<double> p(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) p(x, y) = (x % 2 == 0) ? amp : 0.0;
  const Image<double> gx = conv2x2(p, x_derivative_kernel());
  const Image<double> gy = conv2x2(p, y_derivative_kernel());
  for (int y = 0; y < gx.height(); ++y)
    for (int x = 0; x < gx.width(); ++x) {
      // alternating sign, magnitude amp/2 from the 2x2 average
      const double want = (x % 2 == 0) ? -amp / 2.0 : amp / 2.0;
      CHECK(gx(x, y) == doctest::Approx(want).epsilon(1e-15));
      CHECK(gy(x, y) == 0.0);
    }

  // a diagonal checkerboard is invisible to the averaged stencil
  Image<double> cb(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) cb(x, y) = ((x + y) % 2 == 0) ? amp : 0.0;
  const Image<double> gcb = conv2x2(cb, x_derivative_kernel());
  for (int y = 0; y < gcb.height(); ++y)
    for (int x = 0; x < gcb.width(); ++x) CHECK(gcb(x, y) == 0.0);
}

TEST_CASE("temporal gradient averages the frame difference") {
  Image<double> f0(3, 3), f1(3, 3);
  f0.fill(2.0);
  f1.fill(10.0);
  const Image<double> it = temporal_gradient(f0, f1);
  REQUIRE(it.width() == 2);
  REQUIRE(it.height() == 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) CHECK(it(x, y) == doctest::Approx(8.0));
}

TEST_CASE("pair gradients recover ramp coefficients exactly") {
  // I = 2x + 0.5y - 3t: the derivative planes must be the coefficients
  const MovieStack m = ramp_movie(12, 10, 3, 2.0, 0.5, -3.0);
  for (int t = 0; t < 2; ++t) {
    const GradientTriplet g = gradients_for_pair(m, t);
    REQUIRE(g.ix.width() == 11);
    REQUIRE(g.ix.height() == 9);
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 11; ++x) {
        CHECK(g.ix(x, y) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(g.iy(x, y) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(g.it(x, y) == doctest::Approx(-3.0).epsilon(1e-14));
      }
  }
}

TEST_CASE("constant movies have zero gradients") {
  MovieStack m;
  m.width = 5;
  m.height = 4;
  m.calibration = {8.0, 1.0};
  for (int t = 0; t < 2; ++t) {
    Image<double> f(5, 4);
    f.fill(42.0);
    m.frames.push_back(std::move(f));
  }
  const GradientTriplet g = gradients_for_pair(m, 0);
  for (int y = 0; y < g.ix.height(); ++y)
    for (int x = 0; x < g.ix.width(); ++x) {
      CHECK(g.ix(x, y) == 0.0);
      CHECK(g.iy(x, y) == 0.0);
      CHECK(g.it(x, y) == 0.0);
    }
}

TEST_CASE("pair gradients match the stencil oracle on random data") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> dist(0.0, 4096.0);
  MovieStack m;
  m.width = 17;
  m.height = 13;
  m.calibration = {8.0, 1.0};
  for (int t = 0; t < 2; ++t) {
    Image<double> f(17, 13);
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 17; ++x) f(x, y) = dist(rng);
    m.frames.push_back(std::move(f));
  }

  const GradientTriplet actual = gradients_for_pair(m, 0);
  const GradientTriplet expect = oracle::gradient_planes(m.frames[0], m.frames[1]);
  for (int y = 0; y < actual.ix.height(); ++y)
    for (int x = 0; x < actual.ix.width(); ++x) {
      CHECK(actual.ix(x, y) == doctest::Approx(expect.ix(x, y)).epsilon(1e-12));
      CHECK(actual.iy(x, y) == doctest::Approx(expect.iy(x, y)).epsilon(1e-12));
      CHECK(actual.it(x, y) == doctest::Approx(expect.it(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("pair index is range-checked") {
  const MovieStack m = ramp_movie(6, 6, 3, 1, 0, 0);
  CHECK_THROWS_AS(gradients_for_pair(m, -1), OutOfRangeError);
  CHECK_THROWS_AS(gradients_for_pair(m, 2), OutOfRangeError);
  CHECK_NOTHROW(gradients_for_pair(m, 1));
}

TEST_CASE("gaussian blur preserves mass on constants and smooths peaks") {
  Image<double> f(21, 21);
  f.fill(3.0);
  gaussian_blur(f, 1.5);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x)
      CHECK(f(x, y) == doctest::Approx(3.0).epsilon(1e-12));

  Image<double> spike(21, 21);
  spike.fill(0.0);
  spike(10, 10) = 100.0;
  gaussian_blur(spike, 1.0);
  CHECK(spike(10, 10) < 100.0);
  CHECK(spike(10, 10) > spike(9, 10));
  CHECK(spike(9, 10) == doctest::Approx(spike(11, 10)).epsilon(1e-12));
  CHECK(spike(10, 9) == doctest::Approx(spike(10, 11)).epsilon(1e-12));

  Image<double> noop(5, 5);
  noop.fill(1.0);
  noop(2, 2) = 7.0;
  Image<double> copy = noop;
  gaussian_blur(noop, 0.0);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) CHECK(noop(x, y) == copy(x, y));

  CHECK_THROWS_AS(gaussian_blur(noop, -1.0), ParameterError);
}
