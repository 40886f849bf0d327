#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epuc/core.hpp"
#include "epuc/moments.hpp"

namespace epuc {

/// Added to mu_k in the C_k denominator and to mu_k^2 in the third-order term.
inline constexpr double kCEpsilon = 1e-10;

/// Negative MI within this margin is float cancellation and clamps to 0.
inline constexpr double kMiClampTolerance = 1e-9;

/// Default rho_k above which C_k is flagged unreliable. Gates nothing.
inline constexpr double kDefaultReliabilityThreshold = 0.3;

/// Deferral policies; higher score means defer first.
enum class Policy : std::size_t {
  kEntropy,
  kMI,
  kMaxProb,
  kSaleEUGlobal,
  kVarCrit,
  kSaleEUCrit,
  kOvAMI,
  kCCritSum,
  kCCritMax,
  kCBEC,
};

inline constexpr std::size_t kPolicyCount = 10;

inline constexpr std::array<Policy, kPolicyCount> kAllPolicies = {
    Policy::kEntropy,    Policy::kMI,    Policy::kMaxProb,  Policy::kSaleEUGlobal, Policy::kVarCrit,
    Policy::kSaleEUCrit, Policy::kOvAMI, Policy::kCCritSum, Policy::kCCritMax,     Policy::kCBEC,
};

std::string_view policy_name(Policy p);
std::optional<Policy> parse_policy(std::string_view name);

/// True for policies that restrict attention to the critical set.
bool needs_partition(Policy p);

struct PolicyScore {
  Policy policy;
  double value;
};

/// Shannon entropy in nats, with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// Entropy of the Bernoulli(p) variable.
double binary_entropy(double p);

/// Mean per-pass entropy (the aleatoric term).
double expected_entropy(const SampleBlock& block);

/// H[mean] - mean_s H[p^(s)]. Values in [-kMiClampTolerance, 0) clamp to 0;
/// anything more negative throws DomainError.
double mutual_information_exact(const SampleBlock& block);

/// C_k = Var[p_k] / (2 (mu_k + eps)), 0 when Var[p_k] = 0.
std::vector<double> c_vector(const MomentSummary& m, double epsilon = kCEpsilon);

/// C_k^(3) = Var/(2(mu+eps)) - m3/(6(mu^2+eps)). Diagnostic only; may be negative.
std::vector<double> c_third_order(const MomentSummary& m, double epsilon = kCEpsilon);

/// rho_k = |m3_k| / (3 mu_k Var[p_k]); 0 when Var[p_k] = 0.
std::vector<double> skewness_rho(const MomentSummary& m);

/// Sum over safe i, critical j of sqrt(C_i C_j) max(0, -corr_ij).
double cbec(const MomentSummary& m, const ClassPartition& partition, std::span<const double> c);

/// Sum over critical k of the one-vs-all binary MI of (p_k, 1 - p_k).
double ova_binary_mi(const SampleBlock& block, const ClassPartition& partition);

/// How the per-class vector is collapsed to a scalar.
struct CSumAggregation {
  enum class Mode { kFull, kTopK, kMeanWeighted };
  Mode mode = Mode::kFull;
  std::size_t top_k = 0;  ///< classes kept by kTopK, ranked by mean

  static CSumAggregation full() { return {}; }
  static CSumAggregation top(std::size_t k) { return {Mode::kTopK, k}; }
  static CSumAggregation mean_weighted() { return {Mode::kMeanWeighted, 0}; }
};

/// Full sum, sum over the top-k classes by mean (ties to lower index),
/// or sum of mu_k C_k.
double aggregate_c(std::span<const double> c, std::span<const double> mean, const CSumAggregation& how);

/// Scores for the requested policies, in request order. A critical-targeted
/// policy without a partition (or with an empty critical set) throws LabelError.
std::vector<PolicyScore> policy_scores(const SampleBlock& block, const MomentSummary& m, std::span<const double> c,
                                       const ClassPartition* partition,
                                       std::span<const Policy> requested = kAllPolicies);

/// Everything computed for one input.
struct UncertaintyReport {
  MomentSummary moments;
  double entropy_of_mean = 0.0;
  double expected_entropy = 0.0;
  double mutual_information = 0.0;
  std::vector<double> c_vector;
  double c_sum = 0.0;
  std::vector<double> c_third_order;
  std::vector<double> rho;
  std::optional<double> cbec;  ///< needs a partition with both sets nonempty
  std::vector<PolicyScore> policy_scores;

  std::optional<double> score(Policy p) const;
  /// Classes whose rho_k exceeds the threshold.
  std::vector<std::size_t> unreliable_classes(double threshold = kDefaultReliabilityThreshold) const;
};

/// Builds the report for one input. Without a partition only the
/// partition-free policies are scored.
UncertaintyReport report(const SampleTensor& tensor, std::size_t input_index, const ClassPartition* partition);
UncertaintyReport report(const SampleBlock& block, const ClassPartition* partition);

std::vector<UncertaintyReport> report_all(const SampleTensor& tensor, const ClassPartition* partition,
                                          unsigned threads = 1);

}  // namespace epuc
