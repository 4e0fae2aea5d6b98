#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "caflow/errors.hpp"
#include "caflow/flow_io.hpp"
#include "caflow/movie.hpp"
#include "caflow/pgm.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/tmpdir.hpp"

using namespace caflow;
namespace fs = std::filesystem;

static void write_bytes(const fs::path& file, const std::string& bytes) {
  std::ofstream out(file, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

static std::string read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

TEST_CASE("pgm reader decodes 8-bit rasters unchanged") {
  const auto dir = testsupport::scratch_dir("pgm8");
  std::string raw = "P5\n3 2\n255\n";
  raw += std::string({'\x00', '\x7f', '\xff', '\x01', '\x02', '\x03'});
  write_bytes(dir / "a.pgm", raw);

  const Image<double> img = read_pgm(dir / "a.pgm");
  REQUIRE(img.width() == 3);
  REQUIRE(img.height() == 2);
  CHECK(img(0, 0) == 0.0);
  CHECK(img(1, 0) == 127.0);
  CHECK(img(2, 0) == 255.0);
  CHECK(img(0, 1) == 1.0);
  CHECK(img(2, 1) == 3.0);
}

TEST_CASE("pgm reader decodes 16-bit big-endian samples") {
  const auto dir = testsupport::scratch_dir("pgm16");
  std::string raw = "P5\n# a comment line\n2 1\n65535\n";
  raw += std::string({'\x01', '\x2c', '\xff', '\xff'});  // 300, 65535
  write_bytes(dir / "a.pgm", raw);

  const Image<double> img = read_pgm(dir / "a.pgm");
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 1);
  CHECK(img(0, 0) == 300.0);
  CHECK(img(1, 0) == 65535.0);
}

TEST_CASE("pgm reader rejects malformed files") {
  const auto dir = testsupport::scratch_dir("pgmbad");
  CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);

  write_bytes(dir / "magic.pgm", "P6\n2 2\n255\n----");
  CHECK_THROWS_AS(read_pgm(dir / "magic.pgm"), FormatError);

  write_bytes(dir / "short.pgm", std::string("P5\n2 2\n255\n") + "\x01\x02");
  CHECK_THROWS_AS(read_pgm(dir / "short.pgm"), FormatError);

  write_bytes(dir / "maxval.pgm", std::string("P5\n1 1\n70000\n") + "\x01\x02");
  CHECK_THROWS_AS(read_pgm(dir / "maxval.pgm"), FormatError);
}

TEST_CASE("pgm writer rounds, clamps and reports the clamp count") {
  const auto dir = testsupport::scratch_dir("pgmw");
  Image<double> img(3, 2);
  img(0, 0) = 0.0;
  img(1, 0) = 299.6;      // rounds to 300
  img(2, 0) = -4.0;       // clamps to 0
  img(0, 1) = 70000.0;    // clamps to 65535
  img(1, 1) = 12.49;      // rounds to 12
  img(2, 1) = std::nan("");  // clamps to 0

  const std::size_t clamped = write_pgm16(img, dir / "w.pgm");
  CHECK(clamped == 3);

  const oracle::RawPgm raw = oracle::decode_pgm(dir / "w.pgm");
  REQUIRE(raw.width == 3);
  REQUIRE(raw.height == 2);
  CHECK(raw.maxval == 65535);
  const std::vector<std::uint32_t> expect = {0, 300, 0, 65535, 12, 0};
  CHECK(raw.samples == expect);
}

TEST_CASE("movie save/load round-trips integer data and calibration") {
  const auto dir = testsupport::scratch_dir("movie_rt");
  MovieStack m;
  m.width = 4;
  m.height = 3;
  m.calibration = {16.4, 1.3};
  for (int t = 0; t < 3; ++t) {
    Image<double> f(4, 3);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) f(x, y) = 100.0 * t + 10.0 * y + x;
    m.frames.push_back(std::move(f));
  }
  CHECK(save_movie(m, dir) == 0);

  const MovieStack back = load_movie(dir);
  REQUIRE(back.frame_count() == 3);
  REQUIRE(back.width == 4);
  REQUIRE(back.height == 3);
  CHECK(back.calibration.frame_rate_hz == doctest::Approx(16.4).epsilon(1e-15));
  CHECK(back.calibration.microns_per_pixel == doctest::Approx(1.3).epsilon(1e-15));
  for (int t = 0; t < 3; ++t)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(back.frames[t](x, y) == m.frames[t](x, y));
}

TEST_CASE("movie loader sorts frames by index, not directory order") {
  const auto dir = testsupport::scratch_dir("movie_sort");
  auto put_frame = [&](const std::string& name, double value) {
    Image<double> f(2, 2);
    f.fill(value);
    write_pgm16(f, dir / name);
  };
  // deliberately written out of order, with a gap in the numbering
  put_frame("frame_000010.pgm", 30.0);
  put_frame("frame_000000.pgm", 10.0);
  put_frame("frame_000002.pgm", 20.0);
  write_bytes(dir / "calibration.txt",
              "# sidecar\nframe_rate_hz = 8\nmicrons_per_pixel = 1.3\n");

  const MovieStack m = load_movie(dir);
  REQUIRE(m.frame_count() == 3);
  CHECK(m.frames[0](0, 0) == 10.0);
  CHECK(m.frames[1](0, 0) == 20.0);
  CHECK(m.frames[2](0, 0) == 30.0);
}

TEST_CASE("movie loader needs at least two frames and a calibration") {
  const auto dir = testsupport::scratch_dir("movie_min");
  Image<double> f(2, 2);
  f.fill(1.0);
  write_pgm16(f, dir / "frame_000000.pgm");
  write_bytes(dir / "calibration.txt",
              "frame_rate_hz = 8\nmicrons_per_pixel = 1\n");
  CHECK_THROWS_AS(load_movie(dir), InsufficientDataError);

  write_pgm16(f, dir / "frame_000001.pgm");
  CHECK_NOTHROW(load_movie(dir));

  fs::remove(dir / "calibration.txt");
  CHECK_THROWS(load_movie(dir));
}

TEST_CASE("calibration parser handles comments and rejects bad input") {
  const auto dir = testsupport::scratch_dir("calib");
  write_bytes(dir / "good.txt",
              "# acquisition sidecar\nframe_rate_hz = 16.4\n\n"
              "microns_per_pixel = 1.3\n");
  const Calibration c = load_calibration(dir / "good.txt");
  CHECK(c.frame_rate_hz == doctest::Approx(16.4).epsilon(1e-15));
  CHECK(c.microns_per_pixel == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(c.px_per_frame_to_um_per_s() == doctest::Approx(21.32).epsilon(1e-12));

  write_bytes(dir / "missing.txt", "frame_rate_hz = 8\n");
  CHECK_THROWS_AS(load_calibration(dir / "missing.txt"), CalibrationError);

  write_bytes(dir / "neg.txt",
              "frame_rate_hz = -8\nmicrons_per_pixel = 1\n");
  CHECK_THROWS_AS(load_calibration(dir / "neg.txt"), CalibrationError);

  write_bytes(dir / "junk.txt",
              "frame_rate_hz = fast\nmicrons_per_pixel = 1\n");
  CHECK_THROWS_AS(load_calibration(dir / "junk.txt"), CalibrationError);
}

static FlowSequence tiny_sequence() {
  FlowSequence seq;
  seq.calibration = {8.0, 1.3};
  FlowField f(6, 5, 0, PixelRect{1, 1, 4, 3});
  f.u(3, 4) = 0.5;  // outside valid: loader must still accept the file
  f.u(1, 1) = 1.0;
  f.v(1, 1) = 2.0;
  f.lambda_min(1, 1) = 0.25;
  f.lambda_max(1, 1) = 0.5;
  f.u(3, 2) = -1.5;
  f.v(3, 2) = 0.25;
  f.lambda_min(3, 2) = 4.0;
  f.lambda_max(3, 2) = 8.0;
  seq.fields.push_back(std::move(f));
  return seq;
}

TEST_CASE("flow file round-trips geometry, calibration and planes") {
  const auto dir = testsupport::scratch_dir("cafl_rt");
  const FlowSequence seq = tiny_sequence();
  write_flow_file(seq, dir / "f.cafl");

  const FlowSequence back = read_flow_file(dir / "f.cafl");
  REQUIRE(back.pair_count() == 1);
  CHECK(back.width() == 6);
  CHECK(back.height() == 5);
  CHECK(back.valid().x0 == 1);
  CHECK(back.valid().y0 == 1);
  CHECK(back.valid().width == 4);
  CHECK(back.valid().height == 3);
  CHECK(back.calibration.frame_rate_hz == 8.0);
  CHECK(back.calibration.microns_per_pixel == 1.3);

  const FlowField& f = back.fields[0];
  // all stored values above are exactly representable in float32
  CHECK(f.u(1, 1) == 1.0);
  CHECK(f.v(1, 1) == 2.0);
  CHECK(f.lambda_min(1, 1) == 0.25);
  CHECK(f.lambda_max(1, 1) == 0.5);
  CHECK(f.u(3, 2) == -1.5);
  CHECK(f.lambda_min(3, 2) == 4.0);
  CHECK(std::isnan(f.u(0, 0)));
  CHECK(std::isnan(f.v(5, 4)));
  CHECK(f.lambda_min(0, 0) == 0.0);
}

TEST_CASE("flow file writes are byte-stable") {
  const auto dir = testsupport::scratch_dir("cafl_stable");
  const FlowSequence seq = tiny_sequence();
  write_flow_file(seq, dir / "a.cafl");
  write_flow_file(seq, dir / "b.cafl");
  CHECK(read_bytes(dir / "a.cafl") == read_bytes(dir / "b.cafl"));

  // and a read-back write reproduces the same bytes (NaN canonicalized)
  write_flow_file(read_flow_file(dir / "a.cafl"), dir / "c.cafl");
  CHECK(read_bytes(dir / "a.cafl") == read_bytes(dir / "c.cafl"));
}

TEST_CASE("flow file reader rejects corruption") {
  const auto dir = testsupport::scratch_dir("cafl_bad");
  write_flow_file(tiny_sequence(), dir / "f.cafl");
  std::string bytes = read_bytes(dir / "f.cafl");

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  write_bytes(dir / "magic.cafl", bad_magic);
  CHECK_THROWS_AS(read_flow_file(dir / "magic.cafl"), FormatError);

  std::string bad_version = bytes;
  bad_version[4] = '\x09';
  write_bytes(dir / "version.cafl", bad_version);
  CHECK_THROWS_AS(read_flow_file(dir / "version.cafl"), FormatError);

  write_bytes(dir / "short.cafl", bytes.substr(0, bytes.size() - 7));
  CHECK_THROWS_AS(read_flow_file(dir / "short.cafl"), FormatError);

  CHECK_THROWS_AS(read_flow_file(dir / "nope.cafl"), IoError);
}

TEST_CASE("csv export lists reliable vectors in (t, y, x) order") {
  const auto dir = testsupport::scratch_dir("csv");
  const FlowSequence seq = tiny_sequence();

  const std::size_t rows = export_reliable_csv(seq, 0.0, dir / "all.csv");
  CHECK(rows == 2);
  std::ifstream in(dir / "all.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "t_index,x,y,u_px_per_frame,v_px_per_frame,lambda_min,lambda_max");
  std::getline(in, line);
  CHECK(line == "0,1,1,1,2,0.25,0.5");
  std::getline(in, line);
  CHECK(line == "0,3,2,-1.5,0.25,4,8");
  CHECK(!std::getline(in, line));

  // raising the threshold keeps a subset of the rows
  const std::size_t fewer = export_reliable_csv(seq, 1.0, dir / "hi.csv");
  CHECK(fewer == 1);
  std::ifstream in2(dir / "hi.csv");
  std::set<std::string> all_rows, hi_rows;
  std::ifstream in1(dir / "all.csv");
  std::getline(in1, line);  // headers
  std::getline(in2, line);
  while (std::getline(in1, line)) all_rows.insert(line);
  while (std::getline(in2, line)) hi_rows.insert(line);
  for (const auto& r : hi_rows) CHECK(all_rows.count(r) == 1);
}
