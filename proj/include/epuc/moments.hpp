#pragma once

#include <cstddef>
#include <vector>

#include "epuc/core.hpp"

namespace epuc {

enum class VarianceNormalisation {
  kBessel,      ///< 1/(S-1), the default everywhere.
  kPopulation,  ///< 1/S, for cross-checks against closed-form moments.
};

/// Per-input Monte Carlo moments of the K class probabilities.
///
/// covariance and correlation are K x K, row-major. variance[k] is
/// covariance[k][k] bit for bit. third_moment always uses 1/S.
struct MomentSummary {
  std::size_t n_classes = 0;
  std::size_t n_samples = 0;
  VarianceNormalisation normalisation = VarianceNormalisation::kBessel;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> covariance;
  std::vector<double> correlation;
  std::vector<double> third_moment;

  double cov(std::size_t i, std::size_t j) const { return covariance[i * n_classes + j]; }
  double corr(std::size_t i, std::size_t j) const { return correlation[i * n_classes + j]; }
};

MomentSummary compute_moments(const SampleBlock& block,
                              VarianceNormalisation norm = VarianceNormalisation::kBessel);

MomentSummary compute_moments(const SampleTensor& tensor, std::size_t input_index,
                              VarianceNormalisation norm = VarianceNormalisation::kBessel);

/// compute_moments for every input, in input order.
std::vector<MomentSummary> compute_all_moments(const SampleTensor& tensor, unsigned threads = 1,
                                               VarianceNormalisation norm = VarianceNormalisation::kBessel);

}  // namespace epuc
