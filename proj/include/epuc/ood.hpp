#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epuc/metrics.hpp"

namespace epuc {

/// P(ood score > id score), ties counted 1/2, from tie-averaged ranks
/// (Mann-Whitney U / (n m)). Empty or non-finite inputs throw DomainError.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

/// mean(ood) / mean(id). A non-positive ID mean throws DomainError.
double mean_ratio(std::span<const double> id_scores, std::span<const double> ood_scores);

struct OodResult {
  double mean_id = 0.0;
  double mean_ood = 0.0;
  double ratio = 0.0;
  double auroc = 0.0;
};

OodResult evaluate_ood(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Scalar detection scores, higher = more likely OoD.
enum class OodMetric { kNegMsp, kMI, kEUVar, kCSum };

inline constexpr OodMetric kOodMetrics[] = {OodMetric::kNegMsp, OodMetric::kMI, OodMetric::kEUVar, OodMetric::kCSum};

std::string ood_metric_name(OodMetric m);

/// NegMsp = 1 - max_k mu_k, MI exact, EUVar = sum of variances, CSum = sum of C_k.
std::vector<double> ood_scores(std::span<const UncertaintyReport> reports, OodMetric metric);

/// The class-k component C_k as the score.
OodResult per_class_ood(std::span<const UncertaintyReport> id_reports, std::span<const UncertaintyReport> ood_reports,
                        std::size_t k);

struct OodTable {
  std::vector<OodResult> metrics;    ///< in kOodMetrics order
  std::vector<OodResult> per_class;  ///< one per class
};

OodTable ood_table(std::span<const UncertaintyReport> id_reports, std::span<const UncertaintyReport> ood_reports);

/// Mean and sample std of each cell across seeds.
struct OodAggregate {
  OodTable mean;
  OodTable std;
  std::size_t n_seeds = 0;
};

OodAggregate aggregate_seeds(std::span<const OodTable> per_seed);

/// Median rho_k in each population and the relative shift median_ood / median_id - 1
/// (absent when the ID median is 0).
struct RhoShift {
  std::size_t cls = 0;
  double median_id = 0.0;
  double median_ood = 0.0;
  double relative_shift = 0.0;
  bool shift_defined = false;
};

std::vector<RhoShift> rho_shift(std::span<const UncertaintyReport> id_reports,
                                std::span<const UncertaintyReport> ood_reports);

}  // namespace epuc
