#include "caflow/movie.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "caflow/pgm.hpp"

namespace caflow {

void Calibration::validate() const {
  if (!std::isfinite(frame_rate_hz) || frame_rate_hz <= 0.0)
    throw CalibrationError("frame_rate_hz must be finite and > 0");
  if (!std::isfinite(microns_per_pixel) || microns_per_pixel <= 0.0)
    throw CalibrationError("microns_per_pixel must be finite and > 0");
}

void MovieStack::validate() const {
  if (frame_count() < 2)
    throw InsufficientDataError("movie needs at least 2 frames");
  if (width < 2 || height < 2)
    throw InsufficientDataError("frames must be at least 2x2");
  for (const auto& f : frames) {
    if (f.width() != width || f.height() != height)
      throw FormatError("movie frames have mismatched dimensions");
    for (double v : f.pixels())
      if (!std::isfinite(v)) throw FormatError("movie contains non-finite samples");
  }
  calibration.validate();
}

namespace {

// frame_<digits>.pgm -> digits, or -1
long frame_index_of(const std::string& name) {
  constexpr std::string_view prefix = "frame_";
  constexpr std::string_view suffix = ".pgm";
  if (name.size() <= prefix.size() + suffix.size()) return -1;
  if (name.compare(0, prefix.size(), prefix) != 0) return -1;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return -1;
  const char* first = name.data() + prefix.size();
  const char* last = name.data() + name.size() - suffix.size();
  long idx = -1;
  const auto [ptr, ec] = std::from_chars(first, last, idx);
  if (ec != std::errc{} || ptr != last || idx < 0) return -1;
  return idx;
}

}  // namespace

Calibration load_calibration(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw CalibrationError("missing calibration sidecar " + file.string());

  Calibration cal{};
  bool have_rate = false, have_pitch = false;
  std::string line;
  while (std::getline(in, line)) {
    // trim, ignore blanks and comments
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto eq = line.find('=', begin);
    if (eq == std::string::npos)
      throw CalibrationError(file.string() + ": malformed line '" + line + "'");
    std::string key = line.substr(begin, eq - begin);
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = line.substr(eq + 1);
    double parsed = 0.0;
    try {
      std::size_t pos = 0;
      parsed = std::stod(value, &pos);
      while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
        ++pos;
      if (pos != value.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw CalibrationError(file.string() + ": bad value for '" + key + "'");
    }
    if (key == "frame_rate_hz") {
      cal.frame_rate_hz = parsed;
      have_rate = true;
    } else if (key == "microns_per_pixel") {
      cal.microns_per_pixel = parsed;
      have_pitch = true;
    }
    // unknown keys are permitted for forward compatibility
  }
  if (!have_rate) throw CalibrationError(file.string() + ": missing frame_rate_hz");
  if (!have_pitch) throw CalibrationError(file.string() + ": missing microns_per_pixel");
  cal.validate();
  return cal;
}

MovieStack load_movie(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError(dir.string() + " is not a directory");

  std::vector<std::pair<long, std::filesystem::path>> entries;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const long idx = frame_index_of(e.path().filename().string());
    if (idx >= 0) entries.emplace_back(idx, e.path());
  }
  std::sort(entries.begin(), entries.end());
  if (entries.size() < 2)
    throw InsufficientDataError(dir.string() + ": found " +
                                std::to_string(entries.size()) +
                                " frame files, need at least 2");

  MovieStack movie;
  movie.calibration = load_calibration(dir / "calibration.txt");
  movie.frames.reserve(entries.size());
  for (const auto& [idx, path] : entries) {
    Image<double> frame = read_pgm(path);
    if (movie.frames.empty()) {
      movie.width = frame.width();
      movie.height = frame.height();
    } else if (frame.width() != movie.width || frame.height() != movie.height) {
      throw FormatError(path.string() + ": frame size differs from the first frame");
    }
    movie.frames.push_back(std::move(frame));
  }
  movie.validate();
  return movie;
}

std::size_t save_movie(const MovieStack& movie, const std::filesystem::path& dir) {
  movie.calibration.validate();
  if (movie.frames.empty()) throw InsufficientDataError("no frames to save");
  std::filesystem::create_directories(dir);

  std::size_t clamped = 0;
  for (int t = 0; t < movie.frame_count(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06d.pgm", t);
    clamped += write_pgm16(movie.frames[t], dir / name);
  }

  std::ofstream cal(dir / "calibration.txt", std::ios::trunc);
  if (!cal) throw IoError("cannot create calibration.txt in " + dir.string());
  char buf[128];
  std::snprintf(buf, sizeof buf, "frame_rate_hz=%.17g\nmicrons_per_pixel=%.17g\n",
                movie.calibration.frame_rate_hz, movie.calibration.microns_per_pixel);
  cal << buf;
  return clamped;
}

}  // namespace caflow
