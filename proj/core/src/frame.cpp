#include "rscorrect/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rscorrect/error.hpp"

namespace rscorrect {

Frame::Frame(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 2 || width < 2) {
    throw DimensionError("frame must be at least 2x2, got " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw DimensionError("frame must have 1 or 3 channels, got " +
                         std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Frame flip_vertical(const Frame& frame) {
  Frame out(frame.height(), frame.width(), frame.channels());
  for (int r = 0; r < frame.height(); ++r) {
    auto src = frame.row(frame.height() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void require_same_shape(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch (" +
                         std::to_string(a.height()) + "x" +
                         std::to_string(a.width()) + "x" +
                         std::to_string(a.channels()) + " vs " +
                         std::to_string(b.height()) + "x" +
                         std::to_string(b.width()) + "x" +
                         std::to_string(b.channels()) + ")");
  }
}

FlowField::FlowField(int h, int w, float fill_u, float fill_v)
    : height(h), width(w) {
  if (h < 1 || w < 1) {
    throw DimensionError("flow field must be non-empty");
  }
  const auto n = static_cast<std::size_t>(h) * w;
  u.assign(n, fill_u);
  v.assign(n, fill_v);
  valid.assign(n, 1);
}

void ScanConfig::validate() const {
  if (height < 2) {
    throw ConfigError("scan config needs at least 2 rows");
  }
  if (width < 1) {
    throw ConfigError("scan config needs a positive width");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("scan readout time tau must be positive");
  }
  if (!std::isfinite(t_mid)) {
    throw ConfigError("scan midpoint must be finite");
  }
}

RowDisplacementMap::RowDisplacementMap(std::vector<double> v)
    : values(std::move(v)) {
  for (double d : values) {
    if (!(d >= -1.0 && d <= 1.0)) {
      throw RangeError("time displacement outside [-1, 1]");
    }
  }
}

double RowDisplacementMap::at(double row0) const {
  const int n = rows();
  if (n == 1) {
    return values[0];
  }
  int lo = static_cast<int>(std::floor(row0));
  lo = std::clamp(lo, 0, n - 2);
  const double f = row0 - lo;
  return (1.0 - f) * values[lo] + f * values[lo + 1];
}

TimeMap::TimeMap(std::vector<double> v) : values(std::move(v)) {
  for (double t : values) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw RangeError("time map value outside [0, 1]");
    }
  }
}

TimeMap TimeMap::complement() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](double t) { return 1.0 - t; });
  return TimeMap(std::move(out));
}

TimeMap TimeMap::flipped() const {
  return TimeMap(std::vector<double>(values.rbegin(), values.rend()));
}

RowMask::RowMask(std::vector<double> v) : values(std::move(v)) {
  for (double x : values) {
    if (x != 0.0 && x != 1.0) {
      throw RangeError("row mask must be binary");
    }
  }
}

RowMask RowMask::flipped() const {
  return RowMask(std::vector<double>(values.rbegin(), values.rend()));
}

FusionMask::FusionMask(int h, int w, float fill) : height(h), width(w) {
  m.assign(static_cast<std::size_t>(h) * w, fill);
}

}  // namespace rscorrect
