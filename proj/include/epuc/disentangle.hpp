#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "epuc/core.hpp"
#include "epuc/metrics.hpp"

namespace epuc {

/// Dataset-level means at one label-noise rate.
struct NoiseSweepPoint {
  double alpha = 0.0;
  double mean_aleatoric = 0.0;       ///< mean expected per-pass entropy
  double mean_epistemic_mi = 0.0;    ///< mean exact MI
  double mean_epistemic_csum = 0.0;  ///< mean aggregated C
};

enum class EpistemicMetric { kMI, kCSum };

NoiseSweepPoint sweep_point(const SampleTensor& tensor, double alpha = 0.0,
                            const CSumAggregation& aggregation = CSumAggregation::full(), unsigned threads = 1);

/// Relative ratio: relative change in epistemic mean over relative change in
/// aleatoric mean. nullopt when a baseline mean or the aleatoric delta is 0.
std::optional<double> relative_ratio(const NoiseSweepPoint& baseline, const NoiseSweepPoint& noisy,
                                     EpistemicMetric metric);

/// Unnormalised delta ratio, kept for comparison only. nullopt on zero aleatoric delta.
std::optional<double> absolute_ratio(const NoiseSweepPoint& baseline, const NoiseSweepPoint& noisy,
                                     EpistemicMetric metric);

/// Mean aggregated C over mean MI; nullopt when the MI mean is 0.
std::optional<double> baseline_inflation(const NoiseSweepPoint& point);

struct SweepRow {
  NoiseSweepPoint point;
  std::optional<double> r_rel_mi;
  std::optional<double> r_rel_csum;
  std::optional<double> inflation;
};

/// Rows sorted by alpha, each compared with the alpha = 0 point. The sweep
/// must contain alpha = 0 exactly once (DomainError otherwise).
std::vector<SweepRow> sweep_table(std::span<const NoiseSweepPoint> points);

}  // namespace epuc
