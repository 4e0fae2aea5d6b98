#pragma once

#include <filesystem>
#include <string>

#include "caflow/image.hpp"

namespace caflow {

// Binary PPM ("P6", maxval 255) writer. Throws IoError.
void write_ppm(const Image<Rgb8>& img, const std::filesystem::path& file);

// Writes img to file and its sidecar text (scale, colormap, legend, ...)
// to "<file>.meta.txt".
void write_ppm_with_meta(const Image<Rgb8>& img, const std::string& meta_text,
                         const std::filesystem::path& file);

}  // namespace caflow
