#pragma once

#include <filesystem>

#include "caflow/image.hpp"

namespace caflow {

// Binary PGM ("P5") reader. Accepts maxval 1..65535; 16-bit samples are
// big-endian per the format. Values are widened to double unchanged (no
// rescaling). Throws IoError / FormatError.
Image<double> read_pgm(const std::filesystem::path& file);

// 16-bit binary PGM writer (maxval 65535, big-endian samples). Samples
// are rounded to nearest and clamped to [0, 65535]; returns how many
// were clamped.
std::size_t write_pgm16(const Image<double>& img, const std::filesystem::path& file);

}  // namespace caflow
