#include "epuc/moments.hpp"

#include <algorithm>
#include <cmath>

#include "epuc/parallel.hpp"

namespace epuc {

MomentSummary compute_moments(const SampleBlock& block, VarianceNormalisation norm) {
  const std::size_t S = block.n_samples();
  const std::size_t K = block.n_classes();

  MomentSummary m;
  m.n_classes = K;
  m.n_samples = S;
  m.normalisation = norm;
  m.mean = mean_vector(block);
  m.variance.assign(K, 0.0);
  m.covariance.assign(K * K, 0.0);
  m.correlation.assign(K * K, 0.0);
  m.third_moment.assign(K, 0.0);

  std::vector<double> dev(K);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t k = 0; k < K; ++k) dev[k] = block.at(s, k) - m.mean[k];
    for (std::size_t i = 0; i < K; ++i) {
      if (dev[i] == 0.0) continue;
      m.third_moment[i] += dev[i] * dev[i] * dev[i];
      for (std::size_t j = i; j < K; ++j) m.covariance[i * K + j] += dev[i] * dev[j];
    }
  }

  const double denom = norm == VarianceNormalisation::kBessel ? static_cast<double>(S - 1) : static_cast<double>(S);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i; j < K; ++j) {
      const double c = m.covariance[i * K + j] / denom;
      m.covariance[i * K + j] = c;
      m.covariance[j * K + i] = c;
    }
    m.variance[i] = m.covariance[i * K + i];
    m.third_moment[i] /= static_cast<double>(S);
  }

  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      const double scale = std::sqrt(m.variance[i]) * std::sqrt(m.variance[j]);
      double r = 0.0;
      if (i == j) {
        r = m.variance[i] > 0.0 ? 1.0 : 0.0;
      } else if (scale > 0.0) {
        r = std::clamp(m.covariance[i * K + j] / scale, -1.0, 1.0);
      }
      m.correlation[i * K + j] = r;
    }
  }
  return m;
}

MomentSummary compute_moments(const SampleTensor& tensor, std::size_t input_index, VarianceNormalisation norm) {
  return compute_moments(tensor.block(input_index), norm);
}

std::vector<MomentSummary> compute_all_moments(const SampleTensor& tensor, unsigned threads,
                                               VarianceNormalisation norm) {
  std::vector<MomentSummary> out(tensor.n_inputs());
  parallel_for(tensor.n_inputs(), threads, [&](std::size_t i) { out[i] = compute_moments(tensor.block(i), norm); });
  return out;
}

}  // namespace epuc
