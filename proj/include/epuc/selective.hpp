#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epuc/core.hpp"
#include "epuc/metrics.hpp"

namespace epuc {

inline constexpr std::size_t kDefaultGridSize = 200;
inline constexpr std::size_t kDefaultResamples = 200;

/// Which per-coverage series a curve integral or lookup refers to.
enum class RiskField { kCriticalFnr, kCriticalErr, kErrorRate, kAccuracy, kMacroF1 };

std::string_view risk_field_name(RiskField f);
std::optional<RiskField> parse_risk_field(std::string_view name);

/// Coverage-indexed selective metrics for one deferral policy.
///
/// coverage[g] = (g + 1) / grid_size, and the kept set at that level is
/// the first ceil(coverage * N) inputs in kept-first order. Ratios with a
/// zero denominator are reported as 0.
struct RiskCurve {
  std::string policy_name;
  std::vector<double> coverage;
  std::vector<double> critical_fnr;
  std::vector<double> critical_err;
  std::vector<double> error_rate;
  std::vector<double> accuracy;
  std::vector<double> macro_f1;
  std::vector<std::size_t> kept_total;
  std::vector<std::size_t> kept_critical;

  const std::vector<double>& series(RiskField f) const;
};

/// Levels 1/n, 2/n, ..., 1.
std::vector<double> coverage_grid(std::size_t grid_size);

/// ceil(level / grid_size * n_inputs) in exact integer arithmetic.
std::size_t kept_count(std::size_t level, std::size_t grid_size, std::size_t n_inputs);

/// Kept-first order: ascending score, ties by ascending input index.
/// Non-finite scores throw DomainError.
std::vector<std::size_t> deferral_order(std::span<const double> scores);

RiskCurve risk_curve(std::span<const std::size_t> order, std::span<const std::size_t> true_labels,
                     std::span<const std::size_t> predicted_labels, const ClassPartition& partition,
                     std::size_t grid_size = kDefaultGridSize, std::string policy_name = {});

RiskCurve risk_curve(std::span<const std::size_t> order, const LabelSet& labels, const ClassPartition& partition,
                     std::size_t grid_size = kDefaultGridSize, std::string policy_name = {});

/// Trapezoidal integral of one series from the first grid point to 1.
double ausc(const RiskCurve& curve, RiskField field = RiskField::kCriticalFnr);
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Series value at the grid level closest to `coverage` (lower level on ties).
double value_at_coverage(const RiskCurve& curve, RiskField field, double coverage);

/// Per-input scores of one policy.
struct PolicyInput {
  std::string name;
  std::vector<double> scores;
};

/// Deferral scores for every policy present in the reports, in kAllPolicies order.
std::vector<PolicyInput> policy_inputs(std::span<const UncertaintyReport> reports);

struct BootstrapOptions {
  std::size_t n_resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  std::size_t grid_size = kDefaultGridSize;
  RiskField field = RiskField::kCriticalFnr;
  double operating_coverage = 0.8;
  unsigned threads = 1;
};

struct PolicyBootstrap {
  std::string name;
  double ausc_full = 0.0;  ///< on the original sample
  double ausc_mean = 0.0;
  double ausc_std = 0.0;
  double ausc_ci_low = 0.0;
  double ausc_ci_high = 0.0;
  double best_fraction = 0.0;  ///< resamples where this policy has the lowest AUSC; ties split
  double operating_full = 0.0;  ///< field value at operating_coverage
  double operating_ci_low = 0.0;
  double operating_ci_high = 0.0;
  std::vector<double> ausc_samples;
};

struct BootstrapSummary {
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  RiskField field = RiskField::kCriticalFnr;
  double operating_coverage = 0.8;
  std::vector<PolicyBootstrap> policies;
  /// win_matrix[i * P + j] = P(AUSC_i < AUSC_j) over paired resamples; ties count 0.5.
  std::vector<double> win_matrix;

  double win(std::size_t i, std::size_t j) const { return win_matrix[i * policies.size() + j]; }
};

/// Paired bootstrap: each replicate draws one index resample shared by every
/// policy. Replicate r uses Rng(seed, r), so results do not depend on threads.
BootstrapSummary bootstrap(std::span<const PolicyInput> policies, std::span<const std::size_t> true_labels,
                           std::span<const std::size_t> predicted_labels, const ClassPartition& partition,
                           const BootstrapOptions& options = {});

/// K x K table with per-row presence flags.
struct ClassMatrix {
  std::size_t n_classes = 0;
  std::vector<double> values;
  std::vector<std::size_t> counts;  ///< inputs contributing to each row
  std::vector<bool> present;

  double at(std::size_t i, std::size_t j) const { return values[i * n_classes + j]; }
};

/// Row i: mean of C_k / sum_j C_j over inputs with true label i. Inputs with
/// sum C = 0 are skipped; rows with no contributing inputs are absent.
ClassMatrix epistemic_profiles(std::span<const UncertaintyReport> reports, std::span<const std::size_t> true_labels,
                               std::size_t n_classes);

/// Mean C vector per (true, predicted) cell.
struct SignatureTable {
  std::size_t n_classes = 0;
  std::vector<std::size_t> counts;  ///< K x K
  std::vector<double> values;       ///< K x K x K

  bool present(std::size_t true_cls, std::size_t pred_cls) const { return counts[true_cls * n_classes + pred_cls] > 0; }
  std::span<const double> signature(std::size_t true_cls, std::size_t pred_cls) const {
    return std::span<const double>(values).subspan((true_cls * n_classes + pred_cls) * n_classes, n_classes);
  }
};

SignatureTable error_signatures(std::span<const UncertaintyReport> reports, std::span<const std::size_t> true_labels,
                                std::span<const std::size_t> predicted_labels, std::size_t n_classes);

/// E_ij = mean over inputs of sqrt(C_i C_j) max(0, -corr_ij); zero diagonal.
ClassMatrix epistemic_confusion(std::span<const UncertaintyReport> reports, std::size_t n_classes);

struct ReliabilityRow {
  std::size_t cls = 0;
  std::size_t count = 0;
  bool present = false;
  double median = 0.0;
  double mean = 0.0;
  double p90 = 0.0;
  double fraction_reliable = 0.0;  ///< rho_k < threshold
};

struct ReliabilitySummary {
  double threshold = kDefaultReliabilityThreshold;
  bool by_true_class = true;
  std::vector<ReliabilityRow> rows;
  double fraction_all_reliable = 0.0;  ///< inputs with every rho_k < threshold
};

/// Row k summarises rho_k over inputs whose true label is k. With no labels,
/// row k covers every input.
ReliabilitySummary reliability_summary(std::span<const UncertaintyReport> reports,
                                       std::span<const std::size_t> true_labels, std::size_t n_classes,
                                       double threshold = kDefaultReliabilityThreshold);

}  // namespace epuc
