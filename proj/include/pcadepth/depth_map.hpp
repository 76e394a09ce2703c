#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pcadepth/errors.hpp"

namespace pcadepth {

using Index = Eigen::Index;

// Row-major pixel ordering, fixed once and shared by the basis matrix, the
// prediction matrix and the observation operator.
inline Index to_linear(Index row, Index col, Index width) {
  if (width <= 0 || row < 0 || col < 0 || col >= width)
    throw std::out_of_range("to_linear: (" + std::to_string(row) + "," +
                            std::to_string(col) + ") out of bounds for width " +
                            std::to_string(width));
  return row * width + col;
}

inline std::pair<Index, Index> from_linear(Index p, Index width) {
  if (width <= 0 || p < 0)
    throw std::out_of_range("from_linear: bad linear index " + std::to_string(p));
  return {p / width, p % width};
}

/// Dense H x W depth grid with a validity mask.
///
/// The mask is authoritative: whatever sentinel an invalid pixel carries
/// (0 for KITTI-style files, NaN for others) is never interpreted. Values are
/// metres, or disparity pixels when a pipeline runs in disparity mode.
/// Instances are immutable after construction.
class DepthMap {
 public:
  DepthMap(Index height, Index width, Eigen::VectorXd values,
           std::vector<std::uint8_t> valid)
      : height_(height),
        width_(width),
        values_(std::move(values)),
        valid_(std::move(valid)) {
    if (height_ <= 0 || width_ <= 0)
      throw std::invalid_argument("DepthMap: dimensions must be positive");
    if (values_.size() != height_ * width_ ||
        static_cast<Index>(valid_.size()) != height_ * width_)
      throw std::invalid_argument("DepthMap: values/mask length must be H*W");
    valid_count_ = 0;
    for (Index p = 0; p < values_.size(); ++p) {
      if (!valid_[static_cast<std::size_t>(p)]) continue;
      if (!std::isfinite(values_[p]))
        throw std::invalid_argument("DepthMap: non-finite value marked valid");
      ++valid_count_;
    }
  }

  /// Fully-valid map from a value vector.
  static DepthMap dense(Index height, Index width, Eigen::VectorXd values) {
    if (height <= 0 || width <= 0)
      throw std::invalid_argument("DepthMap: dimensions must be positive");
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(height * width), 1);
    return DepthMap(height, width, std::move(values), std::move(valid));
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index size() const { return height_ * width_; }
  Index valid_count() const { return valid_count_; }
  bool fully_valid() const { return valid_count_ == size(); }

  const Eigen::VectorXd& values() const { return values_; }
  const std::vector<std::uint8_t>& valid() const { return valid_; }

  double value(Index row, Index col) const {
    return values_[to_linear(row, col, width_)];
  }
  bool is_valid(Index row, Index col) const {
    return valid_[static_cast<std::size_t>(to_linear(row, col, width_))] != 0;
  }

 private:
  Index height_;
  Index width_;
  Eigen::VectorXd values_;
  std::vector<std::uint8_t> valid_;
  Index valid_count_ = 0;
};

struct Sample {
  Index row = 0;
  Index col = 0;
  double depth = 0.0;
};

inline bool operator==(const Sample& a, const Sample& b) {
  return a.row == b.row && a.col == b.col && a.depth == b.depth;
}

/// Sparse depth observations on a fixed H x W grid. Duplicate pixels are
/// rejected at construction; depths must be finite and positive. An empty
/// entry list is representable (a subsampling result can be empty) but every
/// fitting operation requires at least one entry.
class SparseSamples {
 public:
  SparseSamples(Index height, Index width, std::vector<Sample> entries)
      : height_(height), width_(width), entries_(std::move(entries)) {
    if (height_ <= 0 || width_ <= 0)
      throw std::invalid_argument("SparseSamples: dimensions must be positive");
    std::unordered_set<Index> seen;
    seen.reserve(entries_.size());
    for (const Sample& s : entries_) {
      if (s.row < 0 || s.row >= height_ || s.col < 0 || s.col >= width_)
        throw std::invalid_argument(
            "SparseSamples: entry (" + std::to_string(s.row) + "," +
            std::to_string(s.col) + ") outside " + std::to_string(height_) +
            "x" + std::to_string(width_) + " grid");
      if (!std::isfinite(s.depth) || s.depth <= 0.0)
        throw std::invalid_argument(
            "SparseSamples: depth must be finite and positive at (" +
            std::to_string(s.row) + "," + std::to_string(s.col) + ")");
      if (!seen.insert(s.row * width_ + s.col).second)
        throw std::invalid_argument(
            "SparseSamples: duplicate entry at (" + std::to_string(s.row) +
            "," + std::to_string(s.col) + ")");
    }
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Sample>& entries() const { return entries_; }

  /// Observation vector d0, in entry order.
  Eigen::VectorXd depths() const {
    Eigen::VectorXd d(size());
    for (Index i = 0; i < size(); ++i)
      d[i] = entries_[static_cast<std::size_t>(i)].depth;
    return d;
  }

  /// Linear pixel index per entry, in entry order.
  std::vector<Index> linear_indices() const {
    std::vector<Index> idx;
    idx.reserve(entries_.size());
    for (const Sample& s : entries_) idx.push_back(s.row * width_ + s.col);
    return idx;
  }

 private:
  Index height_;
  Index width_;
  std::vector<Sample> entries_;
};

/// H x W x 3 guidance image, intensities in [0,1], row-major and
/// channel-interleaved.
class ColourImage {
 public:
  ColourImage(Index height, Index width, Eigen::VectorXd interleaved)
      : height_(height), width_(width), intensities_(std::move(interleaved)) {
    if (height_ <= 0 || width_ <= 0)
      throw std::invalid_argument("ColourImage: dimensions must be positive");
    if (intensities_.size() != 3 * height_ * width_)
      throw std::invalid_argument("ColourImage: intensity length must be 3*H*W");
    for (Index i = 0; i < intensities_.size(); ++i) {
      const double v = intensities_[i];
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("ColourImage: intensity outside [0,1]");
    }
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index pixel_count() const { return height_ * width_; }
  const Eigen::VectorXd& intensities() const { return intensities_; }

  double intensity(Index row, Index col, int channel) const {
    return intensities_[3 * to_linear(row, col, width_) + channel];
  }

 private:
  Index height_;
  Index width_;
  Eigen::VectorXd intensities_;
};

/// Keep valid pixels whose row and column are both divisible by `stride`.
/// A map with no valid pixels at all is an error; a nonempty map whose valid
/// pixels simply miss the stride grid yields an empty sample list.
inline SparseSamples subsample_grid(const DepthMap& depth, Index stride) {
  if (stride < 1)
    throw std::invalid_argument("subsample_grid: stride must be >= 1");
  if (depth.valid_count() == 0)
    throw Error("subsample_grid: depth map has no valid pixels");
  std::vector<Sample> picked;
  for (Index r = 0; r < depth.height(); r += stride)
    for (Index c = 0; c < depth.width(); c += stride)
      if (depth.is_valid(r, c)) picked.push_back({r, c, depth.value(r, c)});
  return SparseSamples(depth.height(), depth.width(), std::move(picked));
}

}  // namespace pcadepth
