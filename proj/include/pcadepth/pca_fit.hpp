#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <utility>
#include <vector>

#include "pcadepth/basis.hpp"
#include "pcadepth/depth_map.hpp"

namespace pcadepth {

// Relative cutoff for pseudo-inverse singular values.
inline constexpr double kPinvRtol = 1e-10;

/// Basis rows gathered at the sample pixels, in entry order.
struct SampledBasis {
  Eigen::MatrixXd rows;               // n x k
  std::vector<Index> pixel_indices;   // linear pixel index per row
};

struct FitResult {
  Eigen::VectorXd weights;
  double residual_norm = 0.0;
  Index rank = 0;
};

inline SampledBasis sample_rows(const BasisSet& basis,
                                const SparseSamples& samples) {
  if (samples.height() != basis.height() || samples.width() != basis.width())
    throw std::invalid_argument(
        "sample_rows: sample grid does not match basis resolution");
  SampledBasis out;
  out.rows.resize(samples.size(), basis.k());
  out.pixel_indices.reserve(static_cast<std::size_t>(samples.size()));
  for (Index i = 0; i < samples.size(); ++i) {
    const Sample& s = samples.entries()[static_cast<std::size_t>(i)];
    const Index p = to_linear(s.row, s.col, basis.width());
    out.rows.row(i) = basis.columns().row(p);
    out.pixel_indices.push_back(p);
  }
  return out;
}

/// Minimum-norm least-squares weights via the SVD pseudo-inverse. Singular
/// values below kPinvRtol times the largest are treated as zero, so collinear
/// sample rows reduce the effective rank instead of blowing up.
inline FitResult fit_weights(const SampledBasis& sampled,
                             const Eigen::VectorXd& depths) {
  if (sampled.rows.rows() < 1)
    throw std::invalid_argument("fit_weights: need at least one sample");
  if (sampled.rows.rows() != depths.size())
    throw std::invalid_argument("fit_weights: row/depth count mismatch");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(sampled.rows,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kPinvRtol);
  FitResult fit;
  fit.weights = svd.solve(depths);
  fit.rank = svd.rank();
  fit.residual_norm = (sampled.rows * fit.weights - depths).norm();
  return fit;
}

/// Dense prediction d = A w, all pixels valid.
inline DepthMap synthesize(const BasisSet& basis,
                           const Eigen::VectorXd& weights) {
  if (weights.size() != basis.k())
    throw std::invalid_argument("synthesize: weight length must equal k");
  return DepthMap::dense(basis.height(), basis.width(),
                         basis.columns() * weights);
}

/// Fit weights to the samples and synthesize the dense map.
inline std::pair<DepthMap, FitResult> pca_complete(
    const BasisSet& basis, const SparseSamples& samples) {
  if (samples.empty())
    throw std::invalid_argument("pca_complete: samples must be nonempty");
  SampledBasis sampled = sample_rows(basis, samples);
  FitResult fit = fit_weights(sampled, samples.depths());
  DepthMap dense = synthesize(basis, fit.weights);
  return {std::move(dense), std::move(fit)};
}

}  // namespace pcadepth
