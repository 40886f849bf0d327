#include "epuc/ood.hpp"

#include <cmath>
#include <numeric>

#include "epuc/errors.hpp"
#include "epuc/stats.hpp"

namespace epuc {
namespace {

void check_scores(std::span<const double> s, const char* which) {
  if (s.empty()) throw DomainError(std::string(which) + " score list is empty");
  for (double v : s) {
    if (!std::isfinite(v)) throw DomainError(std::string(which) + " score list holds a non-finite value");
  }
}

std::size_t class_count(std::span<const UncertaintyReport> a, std::span<const UncertaintyReport> b) {
  if (a.empty() || b.empty()) throw DomainError("OoD evaluation needs both populations nonempty");
  const std::size_t K = a.front().c_vector.size();
  if (b.front().c_vector.size() != K) throw DimensionError("ID and OoD tensors differ in class count");
  return K;
}

}  // namespace

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_scores(id_scores, "ID");
  check_scores(ood_scores, "OoD");
  std::vector<double> pooled(id_scores.begin(), id_scores.end());
  pooled.insert(pooled.end(), ood_scores.begin(), ood_scores.end());
  const auto ranks = stats::average_ranks(pooled);
  // Ranks are half-integers, so these sums are exact for any realistic size.
  double rank_sum = 0.0;
  for (std::size_t i = id_scores.size(); i < pooled.size(); ++i) rank_sum += ranks[i];
  const double m = static_cast<double>(ood_scores.size());
  const double n = static_cast<double>(id_scores.size());
  const double u = rank_sum - m * (m + 1.0) / 2.0;
  return u / (n * m);
}

double mean_ratio(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_scores(id_scores, "ID");
  check_scores(ood_scores, "OoD");
  const double id_mean = stats::mean(id_scores);
  if (!(id_mean > 0.0)) throw DomainError("OoD/ID ratio undefined: ID mean is not positive");
  return stats::mean(ood_scores) / id_mean;
}

OodResult evaluate_ood(std::span<const double> id_scores, std::span<const double> ood_scores) {
  OodResult r;
  r.mean_id = stats::mean(id_scores);
  r.mean_ood = stats::mean(ood_scores);
  r.ratio = mean_ratio(id_scores, ood_scores);
  r.auroc = auroc(id_scores, ood_scores);
  return r;
}

std::string ood_metric_name(OodMetric m) {
  switch (m) {
    case OodMetric::kNegMsp:
      return "NegMSP";
    case OodMetric::kMI:
      return "MI";
    case OodMetric::kEUVar:
      return "EUvar";
    case OodMetric::kCSum:
      return "CSum";
  }
  return "";
}

std::vector<double> ood_scores(std::span<const UncertaintyReport> reports, OodMetric metric) {
  std::vector<double> out;
  out.reserve(reports.size());
  for (const auto& r : reports) {
    switch (metric) {
      case OodMetric::kNegMsp:
        out.push_back(*r.score(Policy::kMaxProb));
        break;
      case OodMetric::kMI:
        out.push_back(r.mutual_information);
        break;
      case OodMetric::kEUVar:
        out.push_back(*r.score(Policy::kSaleEUGlobal));
        break;
      case OodMetric::kCSum:
        out.push_back(r.c_sum);
        break;
    }
  }
  return out;
}

OodResult per_class_ood(std::span<const UncertaintyReport> id_reports, std::span<const UncertaintyReport> ood_reports,
                        std::size_t k) {
  const std::size_t K = class_count(id_reports, ood_reports);
  if (k >= K) throw DomainError("class index out of range");
  std::vector<double> id, ood;
  for (const auto& r : id_reports) id.push_back(r.c_vector.at(k));
  for (const auto& r : ood_reports) ood.push_back(r.c_vector.at(k));
  return evaluate_ood(id, ood);
}

OodTable ood_table(std::span<const UncertaintyReport> id_reports, std::span<const UncertaintyReport> ood_reports) {
  const std::size_t K = class_count(id_reports, ood_reports);
  OodTable t;
  for (OodMetric m : kOodMetrics) t.metrics.push_back(evaluate_ood(ood_scores(id_reports, m), ood_scores(ood_reports, m)));
  for (std::size_t k = 0; k < K; ++k) t.per_class.push_back(per_class_ood(id_reports, ood_reports, k));
  return t;
}

OodAggregate aggregate_seeds(std::span<const OodTable> per_seed) {
  if (per_seed.empty()) throw DomainError("no seeds to aggregate");
  OodAggregate agg;
  agg.n_seeds = per_seed.size();
  agg.mean = per_seed.front();
  agg.std = per_seed.front();
  auto reduce = [&](auto member_rows) {
    const std::size_t rows = (per_seed.front().*member_rows).size();
    for (const auto& t : per_seed) {
      if ((t.*member_rows).size() != rows) throw DimensionError("seed tables differ in shape");
    }
    for (std::size_t i = 0; i < rows; ++i) {
      auto field = [&](auto member, OodResult& m_out, OodResult& s_out) {
        std::vector<double> v;
        for (const auto& t : per_seed) v.push_back((t.*member_rows)[i].*member);
        m_out.*member = stats::mean(v);
        s_out.*member = stats::sample_std(v);
      };
      auto& mo = (agg.mean.*member_rows)[i];
      auto& so = (agg.std.*member_rows)[i];
      field(&OodResult::mean_id, mo, so);
      field(&OodResult::mean_ood, mo, so);
      field(&OodResult::ratio, mo, so);
      field(&OodResult::auroc, mo, so);
    }
  };
  reduce(&OodTable::metrics);
  reduce(&OodTable::per_class);
  return agg;
}

std::vector<RhoShift> rho_shift(std::span<const UncertaintyReport> id_reports,
                                std::span<const UncertaintyReport> ood_reports) {
  const std::size_t K = class_count(id_reports, ood_reports);
  std::vector<RhoShift> out;
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> id, ood;
    for (const auto& r : id_reports) id.push_back(r.rho.at(k));
    for (const auto& r : ood_reports) ood.push_back(r.rho.at(k));
    RhoShift s;
    s.cls = k;
    s.median_id = stats::percentile(id, 0.5);
    s.median_ood = stats::percentile(ood, 0.5);
    s.shift_defined = s.median_id > 0.0;
    if (s.shift_defined) s.relative_shift = s.median_ood / s.median_id - 1.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace epuc
