#include "caflow/ppm.hpp"

#include <cstdio>
#include <fstream>

namespace caflow {

static_assert(sizeof(Rgb8) == 3, "Rgb8 must be tightly packed for raw raster writes");

void write_ppm(const Image<Rgb8>& img, const std::filesystem::path& file) {
  if (img.empty()) throw ParameterError("cannot write an empty image");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + file.string());

  char header[64];
  const int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n",
                              img.width(), img.height());
  out.write(header, n);
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixel_count() * 3));
  if (!out) throw IoError("short write to " + file.string());
}

void write_ppm_with_meta(const Image<Rgb8>& img, const std::string& meta_text,
                         const std::filesystem::path& file) {
  write_ppm(img, file);
  std::filesystem::path meta_path = file;
  meta_path += ".meta.txt";
  std::ofstream meta(meta_path, std::ios::trunc);
  if (!meta) throw IoError("cannot create " + meta_path.string());
  meta << meta_text;
  if (!meta) throw IoError("short write to " + meta_path.string());
}

}  // namespace caflow
