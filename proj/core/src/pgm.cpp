#include "caflow/pgm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace caflow {

namespace {

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
  }
  if (c == '#') in.unget();
  return tok;
}

int parse_header_int(std::istream& in, const char* what, long max_value,
                     const std::filesystem::path& file) {
  const std::string tok = next_token(in);
  if (tok.empty())
    throw FormatError(file.string() + ": truncated PGM header (" + what + ")");
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || value <= 0 || value > max_value)
    throw FormatError(file.string() + ": bad PGM " + what + " '" + tok + "'");
  return static_cast<int>(value);
}

}  // namespace

Image<double> read_pgm(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());

  const std::string magic = next_token(in);
  if (magic != "P5")
    throw FormatError(file.string() + ": not a binary PGM (magic '" + magic + "')");

  const int width = parse_header_int(in, "width", 1 << 20, file);
  const int height = parse_header_int(in, "height", 1 << 20, file);
  // the raster follows one whitespace byte, consumed as this token's terminator
  const int maxval = parse_header_int(in, "maxval", 65535, file);

  const bool wide = maxval > 255;
  const std::size_t sample_count = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> raw(sample_count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw FormatError(file.string() + ": truncated PGM raster");

  Image<double> img(width, height);
  double* out = img.pixels().data();
  if (wide) {
    for (std::size_t i = 0; i < sample_count; ++i)
      out[i] = static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]);  // big-endian
  } else {
    for (std::size_t i = 0; i < sample_count; ++i)
      out[i] = static_cast<double>(raw[i]);
  }
  return img;
}

std::size_t write_pgm16(const Image<double>& img, const std::filesystem::path& file) {
  if (img.empty()) throw ParameterError("cannot write an empty image");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + file.string());

  char header[64];
  const int n = std::snprintf(header, sizeof header, "P5\n%d %d\n65535\n",
                              img.width(), img.height());
  out.write(header, n);

  std::size_t clamped = 0;
  std::vector<unsigned char> raw(img.pixel_count() * 2);
  const double* px = img.pixels().data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    double r = std::round(px[i]);
    if (!(r >= 0.0)) {  // negative or NaN
      r = 0.0;
      ++clamped;
    } else if (r > 65535.0) {
      r = 65535.0;
      ++clamped;
    }
    const auto s = static_cast<std::uint16_t>(r);
    raw[2 * i] = static_cast<unsigned char>(s >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("short write to " + file.string());
  return clamped;
}

}  // namespace caflow
