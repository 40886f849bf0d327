#include "epuc/selective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "epuc/errors.hpp"
#include "epuc/parallel.hpp"
#include "epuc/random.hpp"
#include "epuc/stats.hpp"

namespace epuc {
namespace {

constexpr std::array<std::string_view, 5> kFieldNames = {"critical_fnr", "critical_err", "error_rate", "accuracy",
                                                         "macro_f1"};

double ratio_or_zero(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_labels(std::span<const std::size_t> labels, std::size_t n_classes, const char* what) {
  for (std::size_t y : labels) {
    if (y >= n_classes) throw LabelError(std::string(what) + " label " + std::to_string(y) + " out of range");
  }
}

}  // namespace

std::string_view risk_field_name(RiskField f) { return kFieldNames[static_cast<std::size_t>(f)]; }

std::optional<RiskField> parse_risk_field(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return static_cast<RiskField>(i);
  }
  return std::nullopt;
}

const std::vector<double>& RiskCurve::series(RiskField f) const {
  switch (f) {
    case RiskField::kCriticalFnr:
      return critical_fnr;
    case RiskField::kCriticalErr:
      return critical_err;
    case RiskField::kErrorRate:
      return error_rate;
    case RiskField::kAccuracy:
      return accuracy;
    case RiskField::kMacroF1:
      return macro_f1;
  }
  return critical_fnr;
}

std::vector<double> coverage_grid(std::size_t grid_size) {
  if (grid_size == 0) throw DomainError("coverage grid needs at least one level");
  std::vector<double> grid(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) grid[g] = static_cast<double>(g + 1) / static_cast<double>(grid_size);
  return grid;
}

std::size_t kept_count(std::size_t level, std::size_t grid_size, std::size_t n_inputs) {
  return (level * n_inputs + grid_size - 1) / grid_size;
}

std::vector<std::size_t> deferral_order(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DomainError("non-finite deferral score at input " + std::to_string(i));
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

RiskCurve risk_curve(std::span<const std::size_t> order, std::span<const std::size_t> true_labels,
                     std::span<const std::size_t> predicted_labels, const ClassPartition& partition,
                     std::size_t grid_size, std::string policy_name) {
  const std::size_t N = order.size();
  const std::size_t K = partition.n_classes();
  if (N == 0) throw DimensionError("risk curve over an empty dataset");
  if (true_labels.size() != N || predicted_labels.size() != N) {
    throw DimensionError("risk curve: order and label lengths differ");
  }
  check_labels(true_labels, K, "true");
  check_labels(predicted_labels, K, "predicted");

  RiskCurve curve;
  curve.policy_name = std::move(policy_name);
  curve.coverage = coverage_grid(grid_size);
  for (auto* v : {&curve.critical_fnr, &curve.critical_err, &curve.error_rate, &curve.accuracy, &curve.macro_f1}) {
    v->reserve(grid_size);
  }

  std::vector<std::size_t> tp(K, 0), pred_count(K, 0), true_count(K, 0);
  std::size_t kept = 0, correct = 0, crit = 0, crit_missed = 0, crit_wrong = 0;

  for (std::size_t g = 0; g < grid_size; ++g) {
    const std::size_t target = kept_count(g + 1, grid_size, N);
    for (; kept < target; ++kept) {
      const std::size_t n = order[kept];
      if (n >= N) throw DimensionError("deferral order holds an out-of-range index");
      const std::size_t y = true_labels[n];
      const std::size_t yhat = predicted_labels[n];
      ++true_count[y];
      ++pred_count[yhat];
      if (y == yhat) {
        ++correct;
        ++tp[y];
      }
      if (partition.is_critical(y)) {
        ++crit;
        if (!partition.is_critical(yhat)) ++crit_missed;
        if (yhat != y) ++crit_wrong;
      }
    }
    double f1_sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t denom = 2 * tp[k] + (pred_count[k] - tp[k]) + (true_count[k] - tp[k]);
      f1_sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp[k]) / static_cast<double>(denom);
    }
    curve.critical_fnr.push_back(ratio_or_zero(crit_missed, crit));
    curve.critical_err.push_back(ratio_or_zero(crit_wrong, crit));
    curve.accuracy.push_back(ratio_or_zero(correct, kept));
    curve.error_rate.push_back(1.0 - curve.accuracy.back());
    curve.macro_f1.push_back(f1_sum / static_cast<double>(K));
    curve.kept_total.push_back(kept);
    curve.kept_critical.push_back(crit);
  }
  return curve;
}

RiskCurve risk_curve(std::span<const std::size_t> order, const LabelSet& labels, const ClassPartition& partition,
                     std::size_t grid_size, std::string policy_name) {
  return risk_curve(order, labels.true_labels(), labels.predicted_labels(), partition, grid_size,
                    std::move(policy_name));
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("trapezoid: length mismatch");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

double ausc(const RiskCurve& curve, RiskField field) { return trapezoid(curve.coverage, curve.series(field)); }

double value_at_coverage(const RiskCurve& curve, RiskField field, double coverage) {
  if (curve.coverage.empty()) throw DimensionError("empty risk curve");
  std::size_t best = 0;
  for (std::size_t g = 1; g < curve.coverage.size(); ++g) {
    if (std::abs(curve.coverage[g] - coverage) < std::abs(curve.coverage[best] - coverage)) best = g;
  }
  return curve.series(field)[best];
}

std::vector<PolicyInput> policy_inputs(std::span<const UncertaintyReport> reports) {
  std::vector<PolicyInput> out;
  if (reports.empty()) return out;
  for (Policy p : kAllPolicies) {
    if (!reports.front().score(p)) continue;
    PolicyInput in{std::string(policy_name(p)), {}};
    in.scores.reserve(reports.size());
    for (const auto& r : reports) {
      const auto v = r.score(p);
      if (!v) throw DomainError("policy " + in.name + " missing from some reports");
      in.scores.push_back(*v);
    }
    out.push_back(std::move(in));
  }
  return out;
}

BootstrapSummary bootstrap(std::span<const PolicyInput> policies, std::span<const std::size_t> true_labels,
                           std::span<const std::size_t> predicted_labels, const ClassPartition& partition,
                           const BootstrapOptions& options) {
  const std::size_t N = true_labels.size();
  const std::size_t P = policies.size();
  const std::size_t R = options.n_resamples;
  if (N == 0) throw DimensionError("bootstrap over an empty dataset");
  if (R == 0) throw DomainError("bootstrap needs at least one resample");
  for (const auto& p : policies) {
    if (p.scores.size() != N) throw DimensionError("policy " + p.name + " has the wrong number of scores");
  }

  BootstrapSummary out;
  out.n_resamples = R;
  out.seed = options.seed;
  out.grid_size = options.grid_size;
  out.field = options.field;
  out.operating_coverage = options.operating_coverage;
  out.policies.resize(P);

  // Full-sample point estimates.
  for (std::size_t p = 0; p < P; ++p) {
    const auto curve = risk_curve(deferral_order(policies[p].scores), true_labels, predicted_labels, partition,
                                  options.grid_size, policies[p].name);
    out.policies[p].name = policies[p].name;
    out.policies[p].ausc_full = ausc(curve, options.field);
    out.policies[p].operating_full = value_at_coverage(curve, options.field, options.operating_coverage);
  }

  std::vector<double> ausc_rp(R * P);
  std::vector<double> op_rp(R * P);
  parallel_for(R, options.threads, [&](std::size_t r) {
    Rng rng(options.seed, r);
    std::vector<std::size_t> idx(N);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(N));
    std::vector<std::size_t> y(N), yhat(N);
    for (std::size_t n = 0; n < N; ++n) {
      y[n] = true_labels[idx[n]];
      yhat[n] = predicted_labels[idx[n]];
    }
    std::vector<double> scores(N);
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t n = 0; n < N; ++n) scores[n] = policies[p].scores[idx[n]];
      const auto curve = risk_curve(deferral_order(scores), y, yhat, partition, options.grid_size);
      ausc_rp[r * P + p] = ausc(curve, options.field);
      op_rp[r * P + p] = value_at_coverage(curve, options.field, options.operating_coverage);
    }
  });

  for (std::size_t p = 0; p < P; ++p) {
    auto& pb = out.policies[p];
    pb.ausc_samples.resize(R);
    std::vector<double> op(R);
    for (std::size_t r = 0; r < R; ++r) {
      pb.ausc_samples[r] = ausc_rp[r * P + p];
      op[r] = op_rp[r * P + p];
    }
    pb.ausc_mean = stats::mean(pb.ausc_samples);
    pb.ausc_std = stats::sample_std(pb.ausc_samples);
    pb.ausc_ci_low = stats::percentile(pb.ausc_samples, 0.025);
    pb.ausc_ci_high = stats::percentile(pb.ausc_samples, 0.975);
    pb.operating_ci_low = stats::percentile(op, 0.025);
    pb.operating_ci_high = stats::percentile(op, 0.975);
  }

  out.win_matrix.assign(P * P, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    const double* row = ausc_rp.data() + r * P;
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t j = 0; j < P; ++j) {
        if (row[i] < row[j]) {
          out.win_matrix[i * P + j] += 1.0;
        } else if (row[i] == row[j]) {
          out.win_matrix[i * P + j] += 0.5;
        }
      }
    }
    if (P > 0) {
      const double best = *std::min_element(row, row + P);
      const auto winners = static_cast<double>(std::count(row, row + P, best));
      for (std::size_t i = 0; i < P; ++i) {
        if (row[i] == best) out.policies[i].best_fraction += 1.0 / winners;
      }
    }
  }
  for (auto& w : out.win_matrix) w /= static_cast<double>(R);
  for (auto& pb : out.policies) pb.best_fraction /= static_cast<double>(R);
  return out;
}

ClassMatrix epistemic_profiles(std::span<const UncertaintyReport> reports, std::span<const std::size_t> true_labels,
                               std::size_t n_classes) {
  if (reports.size() != true_labels.size()) throw DimensionError("profiles: reports and labels differ in length");
  const std::size_t K = n_classes;
  ClassMatrix m{K, std::vector<double>(K * K, 0.0), std::vector<std::size_t>(K, 0), std::vector<bool>(K, false)};
  for (std::size_t n = 0; n < reports.size(); ++n) {
    const auto& r = reports[n];
    const std::size_t y = true_labels[n];
    if (y >= K || r.c_vector.size() != K) throw DimensionError("profiles: class count mismatch");
    const double total = std::accumulate(r.c_vector.begin(), r.c_vector.end(), 0.0);
    if (!(total > 0.0)) continue;
    for (std::size_t k = 0; k < K; ++k) m.values[y * K + k] += r.c_vector[k] / total;
    ++m.counts[y];
  }
  for (std::size_t i = 0; i < K; ++i) {
    m.present[i] = m.counts[i] > 0;
    for (std::size_t k = 0; k < K; ++k) {
      m.values[i * K + k] = m.present[i] ? m.values[i * K + k] / static_cast<double>(m.counts[i]) : 0.0;
    }
  }
  return m;
}

SignatureTable error_signatures(std::span<const UncertaintyReport> reports, std::span<const std::size_t> true_labels,
                                std::span<const std::size_t> predicted_labels, std::size_t n_classes) {
  if (reports.size() != true_labels.size() || reports.size() != predicted_labels.size()) {
    throw DimensionError("signatures: reports and labels differ in length");
  }
  const std::size_t K = n_classes;
  SignatureTable t{K, std::vector<std::size_t>(K * K, 0), std::vector<double>(K * K * K, 0.0)};
  for (std::size_t n = 0; n < reports.size(); ++n) {
    const std::size_t i = true_labels[n];
    const std::size_t j = predicted_labels[n];
    if (i >= K || j >= K || reports[n].c_vector.size() != K) throw DimensionError("signatures: class count mismatch");
    const std::size_t cell = i * K + j;
    ++t.counts[cell];
    for (std::size_t k = 0; k < K; ++k) t.values[cell * K + k] += reports[n].c_vector[k];
  }
  for (std::size_t cell = 0; cell < K * K; ++cell) {
    if (t.counts[cell] == 0) continue;
    for (std::size_t k = 0; k < K; ++k) t.values[cell * K + k] /= static_cast<double>(t.counts[cell]);
  }
  return t;
}

ClassMatrix epistemic_confusion(std::span<const UncertaintyReport> reports, std::size_t n_classes) {
  const std::size_t K = n_classes;
  ClassMatrix m{K, std::vector<double>(K * K, 0.0), std::vector<std::size_t>(K, reports.size()),
                std::vector<bool>(K, !reports.empty())};
  for (const auto& r : reports) {
    if (r.c_vector.size() != K || r.moments.n_classes != K) throw DimensionError("confusion: class count mismatch");
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = i + 1; j < K; ++j) {
        const double gate = std::max(0.0, -r.moments.corr(i, j));
        if (gate == 0.0) continue;
        const double v = std::sqrt(r.c_vector[i] * r.c_vector[j]) * gate;
        m.values[i * K + j] += v;
        m.values[j * K + i] += v;
      }
    }
  }
  if (!reports.empty()) {
    for (auto& v : m.values) v /= static_cast<double>(reports.size());
  }
  return m;
}

ReliabilitySummary reliability_summary(std::span<const UncertaintyReport> reports,
                                       std::span<const std::size_t> true_labels, std::size_t n_classes,
                                       double threshold) {
  const bool by_class = !true_labels.empty();
  if (by_class && true_labels.size() != reports.size()) {
    throw DimensionError("reliability: reports and labels differ in length");
  }
  ReliabilitySummary out;
  out.threshold = threshold;
  out.by_true_class = by_class;

  std::vector<std::vector<double>> groups(n_classes);
  std::size_t all_ok = 0;
  for (std::size_t n = 0; n < reports.size(); ++n) {
    const auto& rho = reports[n].rho;
    if (rho.size() != n_classes) throw DimensionError("reliability: class count mismatch");
    if (std::all_of(rho.begin(), rho.end(), [&](double r) { return r < threshold; })) ++all_ok;
    if (by_class) {
      const std::size_t y = true_labels[n];
      if (y >= n_classes) throw LabelError("reliability: label out of range");
      groups[y].push_back(rho[y]);
    } else {
      for (std::size_t k = 0; k < n_classes; ++k) groups[k].push_back(rho[k]);
    }
  }
  out.fraction_all_reliable = ratio_or_zero(all_ok, reports.size());

  for (std::size_t k = 0; k < n_classes; ++k) {
    ReliabilityRow row;
    row.cls = k;
    row.count = groups[k].size();
    row.present = !groups[k].empty();
    if (row.present) {
      row.median = stats::percentile(groups[k], 0.5);
      row.mean = stats::mean(groups[k]);
      row.p90 = stats::percentile(groups[k], 0.9);
      const auto ok = std::count_if(groups[k].begin(), groups[k].end(), [&](double r) { return r < threshold; });
      row.fraction_reliable = ratio_or_zero(static_cast<std::size_t>(ok), groups[k].size());
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace epuc
