#include "epuc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epuc/errors.hpp"
#include "epuc/parallel.hpp"

namespace epuc {
namespace {

constexpr std::array<std::string_view, kPolicyCount> kPolicyNames = {
    "Entropy", "MI", "MaxProb", "SaleEUGlobal", "VarCrit", "SaleEUCrit", "OvAMI", "CCritSum", "CCritMax", "CBEC",
};

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double clamp_mi(double mi) {
  if (mi >= 0.0) return mi;
  if (mi >= -kMiClampTolerance) return 0.0;
  std::ostringstream msg;
  msg.precision(12);
  msg << "mutual information " << mi << " is negative beyond float error; input is corrupted";
  throw DomainError(msg.str());
}

}  // namespace

std::string_view policy_name(Policy p) { return kPolicyNames[static_cast<std::size_t>(p)]; }

std::optional<Policy> parse_policy(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyCount; ++i) {
    if (kPolicyNames[i] == name) return static_cast<Policy>(i);
  }
  return std::nullopt;
}

bool needs_partition(Policy p) {
  switch (p) {
    case Policy::kEntropy:
    case Policy::kMI:
    case Policy::kMaxProb:
    case Policy::kSaleEUGlobal:
      return false;
    default:
      return true;
  }
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

double binary_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

double expected_entropy(const SampleBlock& block) {
  double acc = 0.0;
  for (std::size_t s = 0; s < block.n_samples(); ++s) acc += entropy(block.pass(s));
  return acc / static_cast<double>(block.n_samples());
}

double mutual_information_exact(const SampleBlock& block) {
  const auto mean = mean_vector(block);
  return clamp_mi(entropy(mean) - expected_entropy(block));
}

std::vector<double> c_vector(const MomentSummary& m, double epsilon) {
  std::vector<double> c(m.n_classes, 0.0);
  for (std::size_t k = 0; k < m.n_classes; ++k) {
    if (m.variance[k] > 0.0) c[k] = 0.5 * m.variance[k] / (m.mean[k] + epsilon);
  }
  return c;
}

std::vector<double> c_third_order(const MomentSummary& m, double epsilon) {
  std::vector<double> c3(m.n_classes, 0.0);
  for (std::size_t k = 0; k < m.n_classes; ++k) {
    if (m.variance[k] <= 0.0) continue;
    const double mu = m.mean[k];
    c3[k] = 0.5 * m.variance[k] / (mu + epsilon) - m.third_moment[k] / (6.0 * (mu * mu + epsilon));
  }
  return c3;
}

std::vector<double> skewness_rho(const MomentSummary& m) {
  std::vector<double> rho(m.n_classes, 0.0);
  for (std::size_t k = 0; k < m.n_classes; ++k) {
    // Var > 0 forces mu > 0; the guard only catches underflow.
    const double denom = 3.0 * m.mean[k] * m.variance[k];
    if (m.variance[k] > 0.0 && denom > 0.0) {
      const double r = std::abs(m.third_moment[k]) / denom;
      if (std::isfinite(r)) rho[k] = r;
    }
  }
  return rho;
}

double cbec(const MomentSummary& m, const ClassPartition& partition, std::span<const double> c) {
  if (c.size() != m.n_classes || partition.n_classes() != m.n_classes) {
    throw DimensionError("cbec: class count mismatch");
  }
  double total = 0.0;
  for (std::size_t i : partition.safe()) {
    for (std::size_t j : partition.critical()) {
      const double gate = std::max(0.0, -m.corr(i, j));
      if (gate > 0.0) total += std::sqrt(c[i] * c[j]) * gate;
    }
  }
  return total;
}

double ova_binary_mi(const SampleBlock& block, const ClassPartition& partition) {
  const double S = static_cast<double>(block.n_samples());
  const auto mean = mean_vector(block);
  double total = 0.0;
  for (std::size_t k : partition.critical()) {
    double per_pass = 0.0;
    for (std::size_t s = 0; s < block.n_samples(); ++s) per_pass += binary_entropy(block.at(s, k));
    total += clamp_mi(binary_entropy(mean[k]) - per_pass / S);
  }
  return total;
}

double aggregate_c(std::span<const double> c, std::span<const double> mean, const CSumAggregation& how) {
  if (c.size() != mean.size()) throw DimensionError("aggregate_c: class count mismatch");
  switch (how.mode) {
    case CSumAggregation::Mode::kFull:
      return std::accumulate(c.begin(), c.end(), 0.0);
    case CSumAggregation::Mode::kTopK: {
      if (how.top_k == 0) throw DomainError("top-k aggregation needs k >= 1");
      std::vector<std::size_t> idx(c.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
      const std::size_t keep = std::min(how.top_k, idx.size());
      double total = 0.0;
      for (std::size_t r = 0; r < keep; ++r) total += c[idx[r]];
      return total;
    }
    case CSumAggregation::Mode::kMeanWeighted: {
      double total = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) total += mean[k] * c[k];
      return total;
    }
  }
  return 0.0;
}

std::vector<PolicyScore> policy_scores(const SampleBlock& block, const MomentSummary& m, std::span<const double> c,
                                       const ClassPartition* partition, std::span<const Policy> requested) {
  const bool any_critical = std::any_of(requested.begin(), requested.end(), needs_partition);
  if (any_critical) {
    if (partition == nullptr) throw LabelError("a critical-class policy was requested without a class partition");
    partition->require_critical();
    if (partition->n_classes() != m.n_classes) throw DimensionError("partition class count mismatch");
  }

  std::vector<PolicyScore> out;
  out.reserve(requested.size());
  for (Policy p : requested) {
    double v = 0.0;
    switch (p) {
      case Policy::kEntropy:
        v = entropy(m.mean);
        break;
      case Policy::kMI:
        v = mutual_information_exact(block);
        break;
      case Policy::kMaxProb:
        v = 1.0 - *std::max_element(m.mean.begin(), m.mean.end());
        break;
      case Policy::kSaleEUGlobal:
        v = std::accumulate(m.variance.begin(), m.variance.end(), 0.0);
        break;
      case Policy::kVarCrit:
        for (std::size_t k : partition->critical()) v = std::max(v, m.variance[k]);
        break;
      case Policy::kSaleEUCrit:
        for (std::size_t k : partition->critical()) v += m.variance[k];
        break;
      case Policy::kOvAMI:
        v = ova_binary_mi(block, *partition);
        break;
      case Policy::kCCritSum:
        for (std::size_t k : partition->critical()) v += c[k];
        break;
      case Policy::kCCritMax:
        for (std::size_t k : partition->critical()) v = std::max(v, c[k]);
        break;
      case Policy::kCBEC:
        v = cbec(m, *partition, c);
        break;
    }
    out.push_back({p, v});
  }
  return out;
}

std::optional<double> UncertaintyReport::score(Policy p) const {
  for (const auto& s : policy_scores) {
    if (s.policy == p) return s.value;
  }
  return std::nullopt;
}

std::vector<std::size_t> UncertaintyReport::unreliable_classes(double threshold) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (rho[k] > threshold) out.push_back(k);
  }
  return out;
}

UncertaintyReport report(const SampleBlock& block, const ClassPartition* partition) {
  UncertaintyReport r;
  r.moments = compute_moments(block);
  r.entropy_of_mean = entropy(r.moments.mean);
  r.expected_entropy = expected_entropy(block);
  r.mutual_information = mutual_information_exact(block);
  r.c_vector = c_vector(r.moments);
  r.c_sum = std::accumulate(r.c_vector.begin(), r.c_vector.end(), 0.0);
  r.c_third_order = c_third_order(r.moments);
  r.rho = skewness_rho(r.moments);

  static constexpr std::array<Policy, 4> kGlobal = {Policy::kEntropy, Policy::kMI, Policy::kMaxProb,
                                                    Policy::kSaleEUGlobal};
  if (partition != nullptr) {
    if (partition->n_classes() != block.n_classes()) throw DimensionError("partition class count mismatch");
    r.cbec = cbec(r.moments, *partition, r.c_vector);
  }
  if (partition != nullptr && !partition->critical().empty()) {
    r.policy_scores = policy_scores(block, r.moments, r.c_vector, partition);
  } else {
    r.policy_scores = policy_scores(block, r.moments, r.c_vector, partition, kGlobal);
  }
  return r;
}

UncertaintyReport report(const SampleTensor& tensor, std::size_t input_index, const ClassPartition* partition) {
  return report(tensor.block(input_index), partition);
}

std::vector<UncertaintyReport> report_all(const SampleTensor& tensor, const ClassPartition* partition,
                                          unsigned threads) {
  std::vector<UncertaintyReport> out(tensor.n_inputs());
  parallel_for(tensor.n_inputs(), threads, [&](std::size_t i) { out[i] = report(tensor.block(i), partition); });
  return out;
}

}  // namespace epuc
