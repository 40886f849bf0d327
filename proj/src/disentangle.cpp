#include "epuc/disentangle.hpp"

#include <algorithm>
#include <cmath>

#include "epuc/errors.hpp"
#include "epuc/parallel.hpp"

namespace epuc {
namespace {

double epistemic(const NoiseSweepPoint& p, EpistemicMetric metric) {
  return metric == EpistemicMetric::kMI ? p.mean_epistemic_mi : p.mean_epistemic_csum;
}

}  // namespace

NoiseSweepPoint sweep_point(const SampleTensor& tensor, double alpha, const CSumAggregation& aggregation,
                            unsigned threads) {
  const std::size_t N = tensor.n_inputs();
  std::vector<double> alea(N), mi(N), csum(N);
  parallel_for(N, threads, [&](std::size_t i) {
    const auto block = tensor.block(i);
    const auto m = compute_moments(block);
    alea[i] = expected_entropy(block);
    mi[i] = mutual_information_exact(block);
    csum[i] = aggregate_c(c_vector(m), m.mean, aggregation);
  });
  NoiseSweepPoint p;
  p.alpha = alpha;
  if (N == 0) return p;
  // Serial accumulation keeps the sums independent of the thread count.
  for (std::size_t i = 0; i < N; ++i) {
    p.mean_aleatoric += alea[i];
    p.mean_epistemic_mi += mi[i];
    p.mean_epistemic_csum += csum[i];
  }
  const double n = static_cast<double>(N);
  p.mean_aleatoric /= n;
  p.mean_epistemic_mi /= n;
  p.mean_epistemic_csum /= n;
  return p;
}

std::optional<double> relative_ratio(const NoiseSweepPoint& baseline, const NoiseSweepPoint& noisy,
                                     EpistemicMetric metric) {
  const double e0 = epistemic(baseline, metric);
  const double a0 = baseline.mean_aleatoric;
  const double da = noisy.mean_aleatoric - a0;
  if (e0 == 0.0 || a0 == 0.0 || da == 0.0) return std::nullopt;
  return ((epistemic(noisy, metric) - e0) / e0) / (da / a0);
}

std::optional<double> absolute_ratio(const NoiseSweepPoint& baseline, const NoiseSweepPoint& noisy,
                                     EpistemicMetric metric) {
  const double da = noisy.mean_aleatoric - baseline.mean_aleatoric;
  if (da == 0.0) return std::nullopt;
  return (epistemic(noisy, metric) - epistemic(baseline, metric)) / da;
}

std::optional<double> baseline_inflation(const NoiseSweepPoint& point) {
  if (point.mean_epistemic_mi == 0.0) return std::nullopt;
  return point.mean_epistemic_csum / point.mean_epistemic_mi;
}

std::vector<SweepRow> sweep_table(std::span<const NoiseSweepPoint> points) {
  const auto zeros = std::count_if(points.begin(), points.end(), [](const auto& p) { return p.alpha == 0.0; });
  if (zeros != 1) {
    throw DomainError("a sweep needs exactly one alpha = 0 point, found " + std::to_string(zeros));
  }
  for (const auto& p : points) {
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw DomainError("noise rate outside [0, 1]");
  }
  const auto& base = *std::find_if(points.begin(), points.end(), [](const auto& p) { return p.alpha == 0.0; });

  std::vector<SweepRow> rows;
  for (const auto& p : points) {
    SweepRow row;
    row.point = p;
    row.inflation = baseline_inflation(p);
    if (p.alpha != 0.0) {
      row.r_rel_mi = relative_ratio(base, p, EpistemicMetric::kMI);
      row.r_rel_csum = relative_ratio(base, p, EpistemicMetric::kCSum);
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.point.alpha < b.point.alpha; });
  return rows;
}

}  // namespace epuc
