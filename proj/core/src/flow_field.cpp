#include "caflow/flow_field.hpp"

#include <cmath>
#include <limits>

namespace caflow {

FlowField::FlowField(int w, int h, int t, PixelRect valid_rect)
    : width(w),
      height(h),
      t_index(t),
      valid(valid_rect),
      u(w, h, std::numeric_limits<double>::quiet_NaN()),
      v(w, h, std::numeric_limits<double>::quiet_NaN()),
      lambda_min(w, h, 0.0),
      lambda_max(w, h, 0.0) {
  if (valid.x0 < 0 || valid.y0 < 0 || valid.empty() ||
      valid.x0 + valid.width > w || valid.y0 + valid.height > h)
    throw ParameterError("valid region does not fit in the flow plane");
}

void FlowSequence::validate() const {
  if (fields.empty()) throw InsufficientDataError("flow sequence has no pairs");
  calibration.validate();
  const FlowField& first = fields.front();
  for (const FlowField& f : fields) {
    if (f.width != first.width || f.height != first.height ||
        f.valid.x0 != first.valid.x0 || f.valid.y0 != first.valid.y0 ||
        f.valid.width != first.valid.width || f.valid.height != first.valid.height)
      throw FormatError("flow fields have mismatched geometry");
    if (!f.u.same_size(f.v) || !f.u.same_size(f.lambda_min) ||
        !f.u.same_size(f.lambda_max) || f.u.width() != f.width ||
        f.u.height() != f.height)
      throw FormatError("flow field planes have mismatched sizes");
    for (double l : f.lambda_min.pixels())
      if (!(l >= 0.0)) throw FormatError("lambda_min plane has negative or NaN entries");
    for (double l : f.lambda_max.pixels())
      if (!(l >= 0.0)) throw FormatError("lambda_max plane has negative or NaN entries");
  }
}

Image<std::uint8_t> reliability_mask(const FlowField& field, double threshold) {
  if (!std::isfinite(threshold) || threshold < 0.0)
    throw ParameterError("eigenvalue threshold must be finite and >= 0");
  Image<std::uint8_t> mask(field.width, field.height, 0);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      mask(x, y) = (field.lambda_min(x, y) > threshold &&
                    std::isfinite(field.u(x, y)) && std::isfinite(field.v(x, y)))
                       ? 1
                       : 0;
    }
  }
  return mask;
}

PhysicalVelocity to_physical(const FlowField& field, const Calibration& cal) {
  cal.validate();
  const double scale = cal.px_per_frame_to_um_per_s();
  PhysicalVelocity out{Image<double>(field.width, field.height),
                       Image<double>(field.width, field.height)};
  for (std::size_t i = 0; i < field.u.pixel_count(); ++i) {
    out.x.pixels()[i] = field.u.pixels()[i] * scale;
    out.y.pixels()[i] = field.v.pixels()[i] * scale;
  }
  return out;
}

}  // namespace caflow
