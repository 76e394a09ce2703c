#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pcadepth/depth_map.hpp"
#include "pcadepth/errors.hpp"

namespace pcadepth {

inline constexpr double kOrthonormalityTol = 1e-10;
inline constexpr double kRankRtol = 1e-10;

/// Orthonormal full-resolution depth basis tied to a fixed grid size.
///
/// Column 0 is the unit-normalized corpus mean; the remaining columns are
/// principal directions of the mean-centred corpus, QR-polished so that
/// A^T A = I holds to machine precision. `singular_values()[0]` stores the
/// norm of the unnormalized mean image; entries 1..k-1 hold the centred
/// singular values in descending order.
class BasisSet {
 public:
  BasisSet(Index height, Index width, Eigen::MatrixXd columns,
           Eigen::VectorXd singular_values, std::string source_tag = {})
      : height_(height),
        width_(width),
        columns_(std::move(columns)),
        singular_values_(std::move(singular_values)),
        source_tag_(std::move(source_tag)) {
    if (height_ <= 0 || width_ <= 0)
      throw std::invalid_argument("BasisSet: dimensions must be positive");
    if (columns_.rows() != height_ * width_)
      throw std::invalid_argument("BasisSet: column length must be H*W");
    if (columns_.cols() < 1)
      throw std::invalid_argument("BasisSet: need at least one column");
    if (columns_.cols() > columns_.rows())
      throw std::invalid_argument("BasisSet: more columns than pixels");
    if (singular_values_.size() != columns_.cols())
      throw std::invalid_argument("BasisSet: one singular value per column");
    const Index k = columns_.cols();
    Eigen::MatrixXd gram = columns_.transpose() * columns_;
    gram -= Eigen::MatrixXd::Identity(k, k);
    if (gram.cwiseAbs().maxCoeff() > kOrthonormalityTol)
      throw std::invalid_argument("BasisSet: columns are not orthonormal");
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index pixel_count() const { return height_ * width_; }
  Index k() const { return columns_.cols(); }
  const Eigen::MatrixXd& columns() const { return columns_; }
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  const std::string& source_tag() const { return source_tag_; }

 private:
  Index height_;
  Index width_;
  Eigen::MatrixXd columns_;
  Eigen::VectorXd singular_values_;
  std::string source_tag_;
};

/// Uniform-size training maps; at least two maps, each at least 1% valid.
class TrainingCorpus {
 public:
  explicit TrainingCorpus(std::vector<DepthMap> maps) : maps_(std::move(maps)) {
    if (maps_.size() < 2)
      throw std::invalid_argument("TrainingCorpus: need at least 2 maps");
    const Index h = maps_.front().height();
    const Index w = maps_.front().width();
    for (const DepthMap& m : maps_) {
      if (m.height() != h || m.width() != w)
        throw std::invalid_argument("TrainingCorpus: maps must share dimensions");
      if (100 * m.valid_count() < m.size())
        throw std::invalid_argument(
            "TrainingCorpus: map has fewer than 1% valid pixels");
    }
  }

  Index height() const { return maps_.front().height(); }
  Index width() const { return maps_.front().width(); }
  Index size() const { return static_cast<Index>(maps_.size()); }
  const std::vector<DepthMap>& maps() const { return maps_; }

 private:
  std::vector<DepthMap> maps_;
};

/// Fill holes by Jacobi iteration of 4-neighbour averaging, keeping valid
/// pixels fixed, until the largest update drops below tol relative to the
/// largest valid magnitude (or max_iters is hit). Fully-valid input is
/// returned unchanged.
inline DepthMap diffusion_fill(const DepthMap& depth, double tol = 1e-6,
                               Index max_iters = 10000) {
  if (depth.valid_count() == 0)
    throw Error("diffusion_fill: depth map has no valid pixels");
  if (depth.fully_valid()) return depth;

  const Index h = depth.height();
  const Index w = depth.width();
  const auto& mask = depth.valid();

  double valid_sum = 0.0;
  double scale = 0.0;
  for (Index p = 0; p < depth.size(); ++p) {
    if (!mask[static_cast<std::size_t>(p)]) continue;
    valid_sum += depth.values()[p];
    scale = std::max(scale, std::abs(depth.values()[p]));
  }
  const double init = valid_sum / static_cast<double>(depth.valid_count());
  const double threshold = tol * (scale > 0.0 ? scale : 1.0);

  Eigen::VectorXd cur = depth.values();
  std::vector<Index> holes;
  holes.reserve(static_cast<std::size_t>(depth.size() - depth.valid_count()));
  for (Index p = 0; p < depth.size(); ++p) {
    if (!mask[static_cast<std::size_t>(p)]) {
      cur[p] = init;
      holes.push_back(p);
    }
  }

  Eigen::VectorXd next = cur;
  for (Index iter = 0; iter < max_iters; ++iter) {
    double max_delta = 0.0;
    for (Index p : holes) {
      const Index r = p / w;
      const Index c = p % w;
      double sum = 0.0;
      int count = 0;
      if (r > 0) { sum += cur[p - w]; ++count; }
      if (r + 1 < h) { sum += cur[p + w]; ++count; }
      if (c > 0) { sum += cur[p - 1]; ++count; }
      if (c + 1 < w) { sum += cur[p + 1]; ++count; }
      const double v = sum / count;
      max_delta = std::max(max_delta, std::abs(v - cur[p]));
      next[p] = v;
    }
    cur.swap(next);
    if (max_delta < threshold) break;
  }
  return DepthMap::dense(h, w, std::move(cur));
}

namespace detail {

// Deterministic sign convention: largest-magnitude entry positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0.0) v = -v;
}

}  // namespace detail

/// Learn a k-column basis: the normalized corpus mean in column 0 followed by
/// the leading principal directions of the mean-centred corpus, orthonormalized
/// together by Householder QR. Throws RankError (listing the achievable k)
/// when the corpus cannot support the request.
inline BasisSet learn_bases(const TrainingCorpus& corpus, Index k,
                            std::string source_tag = {}) {
  const Index n = corpus.size();
  const Index hw = corpus.height() * corpus.width();
  if (k < 1) throw std::invalid_argument("learn_bases: k must be >= 1");
  for (const DepthMap& m : corpus.maps())
    if (!m.fully_valid())
      throw std::invalid_argument(
          "learn_bases: corpus map has holes; run diffusion_fill first");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(hw);
  for (const DepthMap& m : corpus.maps()) mean += m.values();
  mean /= static_cast<double>(n);
  const double mean_norm = mean.norm();
  if (mean_norm == 0.0)
    throw RankError("learn_bases: corpus mean is identically zero", 0);

  Eigen::MatrixXd centred(hw, n);
  for (Index j = 0; j < n; ++j)
    centred.col(j) = corpus.maps()[static_cast<std::size_t>(j)].values() - mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  Index centred_rank = 0;
  if (sv.size() > 0 && sv[0] > 0.0) {
    for (Index i = 0; i < sv.size(); ++i)
      if (sv[i] > kRankRtol * sv[0]) ++centred_rank;
  }

  // Stack the normalized mean with as many leading directions as requested
  // (capped by the centred rank), then QR-orthonormalize. A near-zero R
  // diagonal marks the first direction that is linearly dependent on the
  // mean; the literal construction cannot go past it.
  const Index m = std::min<Index>(k - 1, centred_rank);
  Eigen::MatrixXd stack(hw, 1 + m);
  stack.col(0) = mean / mean_norm;
  for (Index i = 0; i < m; ++i) {
    stack.col(1 + i) = svd.matrixU().col(i);
    detail::fix_sign(stack.col(1 + i));
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stack);
  const Eigen::MatrixXd& qrm = qr.matrixQR();
  Index independent = 0;
  for (Index i = 0; i < stack.cols(); ++i) {
    if (std::abs(qrm(i, i)) <= 1e-8) break;
    ++independent;
  }
  const Index achievable = independent;
  if (k > achievable)
    throw RankError("learn_bases: requested k=" + std::to_string(k) +
                        " exceeds achievable k=" + std::to_string(achievable),
                    achievable);

  Eigen::MatrixXd thin_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(hw, stack.cols());
  for (Index i = 0; i < stack.cols(); ++i)
    if (qrm(i, i) < 0.0) thin_q.col(i) = -thin_q.col(i);

  Eigen::VectorXd reported(k);
  reported[0] = mean_norm;
  for (Index i = 1; i < k; ++i) reported[i] = sv[i - 1];

  return BasisSet(corpus.height(), corpus.width(), thin_q.leftCols(k),
                  std::move(reported), std::move(source_tag));
}

/// Diagnostic projection w = A^T d for a fully-valid map.
inline Eigen::VectorXd project_depth(const BasisSet& basis,
                                     const DepthMap& depth) {
  if (depth.height() != basis.height() || depth.width() != basis.width())
    throw std::invalid_argument("project_depth: resolution mismatch");
  if (!depth.fully_valid())
    throw std::invalid_argument("project_depth: depth map must be fully valid");
  return basis.columns().transpose() * depth.values();
}

}  // namespace pcadepth
