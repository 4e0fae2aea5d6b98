#pragma once

#include <filesystem>

#include "caflow/flow_field.hpp"

namespace caflow {

// Binary flow-field container, all integers and floats little-endian:
//
//   magic   "CAFL" (4 bytes)
//   u32     version (currently 1)
//   u32     plane width
//   u32     plane height
//   u32     pair count (>= 1)
//   u32 x2  valid origin (x, y)
//   u32 x2  valid extent (w, h)
//   f64     frame_rate_hz
//   f64     microns_per_pixel
//   then per pair, four row-major float32 planes:
//   u, v, lambda_min, lambda_max
//
// NaNs are canonicalized to 0x7FC00000 on write so files round-trip
// byte-identically.
void write_flow_file(const FlowSequence& seq, const std::filesystem::path& file);

FlowSequence read_flow_file(const std::filesystem::path& file);

// CSV export of reliable vectors (lambda_min > threshold), header
// t_index,x,y,u_px_per_frame,v_px_per_frame,lambda_min,lambda_max
// rows ordered by (t, y, x). Returns row count.
std::size_t export_reliable_csv(const FlowSequence& seq, double threshold,
                                const std::filesystem::path& file);

}  // namespace caflow
