#include "caflow/flow_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace caflow {

namespace {

constexpr char kMagic[4] = {'C', 'A', 'F', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kCanonicalNaN = 0x7FC00000u;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if (std::isnan(v)) bits = kCanonicalNaN;
  put_u32(out, bits);
}

void put_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  put_u32(out, static_cast<std::uint32_t>(bits & 0xffffffffu));
  put_u32(out, static_cast<std::uint32_t>(bits >> 32));
}

class Reader {
public:
  Reader(std::ifstream& in, std::string name) : in_(in), name_(std::move(name)) {}

  void bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw FormatError(name_ + ": truncated flow file");
  }

  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  double f64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return std::bit_cast<double>(lo | (hi << 32));
  }

  void f32_plane(Image<double>& plane) {
    const std::size_t n = plane.pixel_count();
    buf_.resize(n * 4);
    bytes(buf_.data(), buf_.size());
    double* out = plane.pixels().data();
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bits = static_cast<std::uint32_t>(buf_[4 * i]) |
                                 (static_cast<std::uint32_t>(buf_[4 * i + 1]) << 8) |
                                 (static_cast<std::uint32_t>(buf_[4 * i + 2]) << 16) |
                                 (static_cast<std::uint32_t>(buf_[4 * i + 3]) << 24);
      out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }

  const std::string& name() const { return name_; }

private:
  std::ifstream& in_;
  std::string name_;
  std::vector<unsigned char> buf_;
};

}  // namespace

void write_flow_file(const FlowSequence& seq, const std::filesystem::path& file) {
  seq.validate();
  const FlowField& first = seq.fields.front();

  std::string out;
  out.reserve(44 + seq.fields.size() * first.u.pixel_count() * 16);
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(first.width));
  put_u32(out, static_cast<std::uint32_t>(first.height));
  put_u32(out, static_cast<std::uint32_t>(seq.pair_count()));
  put_u32(out, static_cast<std::uint32_t>(first.valid.x0));
  put_u32(out, static_cast<std::uint32_t>(first.valid.y0));
  put_u32(out, static_cast<std::uint32_t>(first.valid.width));
  put_u32(out, static_cast<std::uint32_t>(first.valid.height));
  put_f64(out, seq.calibration.frame_rate_hz);
  put_f64(out, seq.calibration.microns_per_pixel);

  for (const FlowField& f : seq.fields) {
    for (const Image<double>* plane : {&f.u, &f.v, &f.lambda_min, &f.lambda_max}) {
      for (double v : plane->pixels()) put_f32(out, static_cast<float>(v));
    }
  }

  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot create " + file.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write to " + file.string());
}

FlowSequence read_flow_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  Reader r(in, file.string());

  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError(file.string() + ": not a flow file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError(file.string() + ": unsupported flow file version " +
                      std::to_string(version));

  const std::uint32_t width = r.u32();
  const std::uint32_t height = r.u32();
  const std::uint32_t pairs = r.u32();
  const std::uint32_t vx = r.u32();
  const std::uint32_t vy = r.u32();
  const std::uint32_t vw = r.u32();
  const std::uint32_t vh = r.u32();
  constexpr std::uint32_t dim_cap = 1u << 20;
  if (width == 0 || height == 0 || width > dim_cap || height > dim_cap)
    throw FormatError(file.string() + ": implausible plane dimensions");
  if (pairs == 0 || pairs > dim_cap)
    throw FormatError(file.string() + ": implausible pair count");
  if (vw == 0 || vh == 0 || vx + vw > width || vy + vh > height)
    throw FormatError(file.string() + ": valid region exceeds the plane");

  FlowSequence seq;
  seq.calibration.frame_rate_hz = r.f64();
  seq.calibration.microns_per_pixel = r.f64();
  try {
    seq.calibration.validate();
  } catch (const CalibrationError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }

  const PixelRect valid{static_cast<int>(vx), static_cast<int>(vy),
                        static_cast<int>(vw), static_cast<int>(vh)};
  seq.fields.reserve(pairs);
  for (std::uint32_t p = 0; p < pairs; ++p) {
    FlowField f(static_cast<int>(width), static_cast<int>(height),
                static_cast<int>(p), valid);
    r.f32_plane(f.u);
    r.f32_plane(f.v);
    r.f32_plane(f.lambda_min);
    r.f32_plane(f.lambda_max);
    for (double l : f.lambda_min.pixels())
      if (!(l >= 0.0))
        throw FormatError(file.string() + ": negative or NaN lambda_min");
    for (double l : f.lambda_max.pixels())
      if (!(l >= 0.0))
        throw FormatError(file.string() + ": negative or NaN lambda_max");
    seq.fields.push_back(std::move(f));
  }
  return seq;
}

std::size_t export_reliable_csv(const FlowSequence& seq, double threshold,
                                const std::filesystem::path& file) {
  seq.validate();
  if (!std::isfinite(threshold) || threshold < 0.0)
    throw ParameterError("eigenvalue threshold must be finite and >= 0");

  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot create " + file.string());
  out << "t_index,x,y,u_px_per_frame,v_px_per_frame,lambda_min,lambda_max\n";

  std::size_t rows = 0;
  char line[256];
  for (const FlowField& f : seq.fields) {
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        if (!(f.lambda_min(x, y) > threshold)) continue;
        if (!std::isfinite(f.u(x, y)) || !std::isfinite(f.v(x, y))) continue;
        std::snprintf(line, sizeof line, "%d,%d,%d,%.9g,%.9g,%.9g,%.9g\n",
                      f.t_index, x, y, f.u(x, y), f.v(x, y), f.lambda_min(x, y),
                      f.lambda_max(x, y));
        out << line;
        ++rows;
      }
    }
  }
  if (!out) throw IoError("short write to " + file.string());
  return rows;
}

}  // namespace caflow
