#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rscorrect {

enum class ScanDirection { TopToBottom, BottomToTop };

/// H x W x C raster of intensities in [0,1], row-major with interleaved
/// channels. Frames returned by public operations keep every sample finite
/// and inside [0,1].
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, int channels, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int row, int col, int ch) {
    return data_[index(row, col, ch)];
  }
  float at(int row, int col, int ch) const {
    return data_[index(row, col, ch)];
  }

  std::span<float> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * row_stride(),
            row_stride()};
  }
  std::span<const float> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * row_stride(),
            row_stride()};
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  bool same_shape(const Frame& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  bool operator==(const Frame& other) const = default;

 private:
  std::size_t row_stride() const {
    return static_cast<std::size_t>(width_) * channels_;
  }
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

Frame flip_vertical(const Frame& frame);

// Throws DimensionError unless both frames have identical shape.
void require_same_shape(const Frame& a, const Frame& b, const char* what);

/// Dense per-pixel displacement in pixels. `u` is horizontal (columns),
/// `v` vertical (rows). A flow on grid A pointing into image B means
/// A(p) ~ B(p + flow(p)).
struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> u;
  std::vector<float> v;
  std::vector<std::uint8_t> valid;

  FlowField() = default;
  FlowField(int height, int width, float fill_u = 0.0f, float fill_v = 0.0f);

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width + col;
  }
  std::size_t size() const { return u.size(); }
};

/// Rolling-shutter readout geometry. Row times are centred on `t_mid`.
struct ScanConfig {
  int height = 0;
  int width = 0;
  double tau = 0.0;  // seconds between consecutive rows
  ScanDirection direction = ScanDirection::TopToBottom;
  double t_mid = 0.0;

  void validate() const;
  double start_time() const { return t_mid - tau * (height - 1) / 2.0; }
  double end_time() const { return t_mid + tau * (height - 1) / 2.0; }
  double duration() const { return tau * (height - 1); }
};

/// Per-row signed time offset to the target scanline, in units of one full
/// scan. Values lie in [-1, 1].
struct RowDisplacementMap {
  std::vector<double> values;

  RowDisplacementMap() = default;
  explicit RowDisplacementMap(std::vector<double> v);

  int rows() const { return static_cast<int>(values.size()); }
  // Linear interpolation on a continuous 0-based row; extrapolates linearly
  // past both ends.
  double at(double row0) const;
};

/// Per-row interpolation time in [0,1].
struct TimeMap {
  std::vector<double> values;

  TimeMap() = default;
  explicit TimeMap(std::vector<double> v);

  int rows() const { return static_cast<int>(values.size()); }
  TimeMap complement() const;
  TimeMap flipped() const;
};

/// Binary per-row mask.
struct RowMask {
  std::vector<double> values;

  RowMask() = default;
  explicit RowMask(std::vector<double> v);

  int rows() const { return static_cast<int>(values.size()); }
  RowMask flipped() const;
};

/// Per-pixel blending weight in [0,1] for the first fused operand.
struct FusionMask {
  int height = 0;
  int width = 0;
  std::vector<float> m;

  FusionMask() = default;
  FusionMask(int height, int width, float fill);

  float at(int row, int col) const {
    return m[static_cast<std::size_t>(row) * width + col];
  }
};

}  // namespace rscorrect
