#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "epuc/cli/app.hpp"
#include "epuc/disentangle.hpp"
#include "epuc/io.hpp"
#include "epuc/metrics.hpp"
#include "epuc/ood.hpp"
#include "epuc/selective.hpp"
#include "epuc/selftest.hpp"
#include "epuc/synth.hpp"

namespace epuc::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using io::format_double;
using io::round9;
using io::write_csv_row;

bool wants(const RunConfig& c, const std::string& format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

fs::path out_dir(const RunConfig& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

Json opt_json(const std::optional<double>& v) { return v ? Json(round9(*v)) : Json(nullptr); }

Json vec_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(round9(x));
  return a;
}

std::unique_ptr<ClassPartition> make_partition(const RunConfig& c, std::size_t n_classes) {
  if (c.safe.empty() && c.critical.empty()) return nullptr;
  return std::make_unique<ClassPartition>(ClassPartition::make(c.safe, c.critical, n_classes));
}

io::Dataset load(const std::string& path) {
  if (path.empty()) throw UsageError("no input file given");
  return io::ingest(path);
}

CSumAggregation parse_aggregation(const std::string& spec) {
  if (spec == "full") return CSumAggregation::full();
  if (spec == "weighted") return CSumAggregation::mean_weighted();
  if (spec.rfind("top:", 0) == 0) {
    try {
      const auto k = std::stoul(spec.substr(4));
      if (k > 0) return CSumAggregation::top(k);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("aggregation must be full, weighted or top:<k>, got '" + spec + "'");
}

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void cmd_score(const RunConfig& config) {
  const auto data = load(config.input);
  const auto& t = data.tensor;
  const std::size_t K = t.n_classes();
  const auto partition = make_partition(config, K);
  const auto reports = report_all(t, partition.get(), config.threads);
  const auto predicted = predicted_labels(t);
  const auto dir = out_dir(config);

  std::vector<Policy> policies;
  if (!reports.empty()) {
    for (const auto& s : reports.front().policy_scores) policies.push_back(s.policy);
  }

  if (wants(config, "csv")) {
    auto out = open_out(dir / "scores.csv");
    std::vector<std::string> header = {"id", "label", "predicted", "entropy", "aleatoric", "mi", "c_sum"};
    for (std::size_t k = 0; k < K; ++k) header.push_back("c_" + std::to_string(k));
    for (std::size_t k = 0; k < K; ++k) header.push_back("rho_" + std::to_string(k));
    header.push_back("cbec");
    for (Policy p : policies) header.push_back("policy_" + std::string(policy_name(p)));
    header.push_back("unreliable_classes");
    write_csv_row(out, header);

    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      std::vector<std::string> row = {t.id(i), data.labels ? std::to_string((*data.labels)[i]) : "",
                                      std::to_string(predicted[i]), format_double(r.entropy_of_mean),
                                      format_double(r.expected_entropy), format_double(r.mutual_information),
                                      format_double(r.c_sum)};
      for (double c : r.c_vector) row.push_back(format_double(c));
      for (double rho : r.rho) row.push_back(format_double(rho));
      row.push_back(opt(r.cbec));
      for (const auto& s : r.policy_scores) row.push_back(format_double(s.value));
      row.push_back(join_indices(r.unreliable_classes(config.threshold)));
      write_csv_row(out, row);
    }
  }

  if (wants(config, "json")) {
    Json records = Json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      Json j;
      j["id"] = t.id(i);
      j["label"] = data.labels ? Json((*data.labels)[i]) : Json(nullptr);
      j["predicted"] = predicted[i];
      j["entropy"] = round9(r.entropy_of_mean);
      j["aleatoric"] = round9(r.expected_entropy);
      j["mi"] = round9(r.mutual_information);
      j["c_sum"] = round9(r.c_sum);
      j["c"] = vec_json(r.c_vector);
      j["c_third_order"] = vec_json(r.c_third_order);
      j["rho"] = vec_json(r.rho);
      j["cbec"] = opt_json(r.cbec);
      Json scores;
      for (const auto& s : r.policy_scores) scores[std::string(policy_name(s.policy))] = round9(s.value);
      j["policies"] = scores;
      j["unreliable_classes"] = r.unreliable_classes(config.threshold);
      records.push_back(std::move(j));
    }
    Json doc;
    doc["n_inputs"] = t.n_inputs();
    doc["n_samples"] = t.n_samples();
    doc["n_classes"] = K;
    doc["reliability_threshold"] = round9(config.threshold);
    doc["inputs"] = std::move(records);
    write_json(dir / "scores.json", doc);
  }
}

void cmd_selective(const RunConfig& config) {
  const auto data = load(config.input);
  if (!data.labels) throw UsageError("selective evaluation needs labelled inputs");
  const auto& t = data.tensor;
  const std::size_t K = t.n_classes();
  const auto partition = make_partition(config, K);
  if (!partition || partition->critical().empty()) throw UsageError("selective evaluation needs --critical classes");
  const auto field = parse_risk_field(config.risk);
  if (!field) throw UsageError("unknown risk field '" + config.risk + "'");

  const auto labels = LabelSet::from(t, *data.labels);
  const auto reports = report_all(t, partition.get(), config.threads);
  const auto inputs = policy_inputs(reports);
  const auto dir = out_dir(config);

  // Per-policy curves.
  std::vector<RiskCurve> curves;
  for (const auto& p : inputs) {
    curves.push_back(risk_curve(deferral_order(p.scores), labels, *partition, config.grid_size, p.name));
  }

  BootstrapOptions bo;
  bo.n_resamples = config.resamples;
  bo.seed = config.seed;
  bo.grid_size = config.grid_size;
  bo.field = *field;
  bo.operating_coverage = config.operating_coverage;
  bo.threads = config.threads;
  const auto boot = bootstrap(inputs, labels.true_labels(), labels.predicted_labels(), *partition, bo);

  const auto profiles = epistemic_profiles(reports, labels.true_labels(), K);
  const auto signatures = error_signatures(reports, labels.true_labels(), labels.predicted_labels(), K);
  const auto confusion = epistemic_confusion(reports, K);
  const auto reliability = reliability_summary(reports, labels.true_labels(), K, config.threshold);

  const std::vector<RiskField> fields = {RiskField::kCriticalFnr, RiskField::kCriticalErr, RiskField::kErrorRate,
                                         RiskField::kAccuracy, RiskField::kMacroF1};

  if (wants(config, "csv")) {
    for (const auto& c : curves) {
      auto out = open_out(dir / ("curve_" + c.policy_name + ".csv"));
      write_csv_row(out, {"coverage", "kept", "kept_critical", "critical_fnr", "critical_err", "error_rate",
                          "accuracy", "macro_f1"});
      for (std::size_t g = 0; g < c.coverage.size(); ++g) {
        write_csv_row(out, {format_double(c.coverage[g]), std::to_string(c.kept_total[g]),
                            std::to_string(c.kept_critical[g]), format_double(c.critical_fnr[g]),
                            format_double(c.critical_err[g]), format_double(c.error_rate[g]),
                            format_double(c.accuracy[g]), format_double(c.macro_f1[g])});
      }
    }
    {
      auto out = open_out(dir / "ausc.csv");
      std::vector<std::string> header = {"policy"};
      for (auto f : fields) header.push_back("ausc_" + std::string(risk_field_name(f)));
      for (auto f : fields) header.push_back(std::string(risk_field_name(f)) + "_at_op");
      write_csv_row(out, header);
      for (const auto& c : curves) {
        std::vector<std::string> row = {c.policy_name};
        for (auto f : fields) row.push_back(format_double(ausc(c, f)));
        for (auto f : fields) row.push_back(format_double(value_at_coverage(c, f, config.operating_coverage)));
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "bootstrap.csv");
      write_csv_row(out, {"policy", "ausc", "ausc_mean", "ausc_std", "ausc_ci_low", "ausc_ci_high", "best_fraction",
                          "op_value", "op_ci_low", "op_ci_high"});
      for (const auto& p : boot.policies) {
        write_csv_row(out, {p.name, format_double(p.ausc_full), format_double(p.ausc_mean), format_double(p.ausc_std),
                            format_double(p.ausc_ci_low), format_double(p.ausc_ci_high),
                            format_double(p.best_fraction), format_double(p.operating_full),
                            format_double(p.operating_ci_low), format_double(p.operating_ci_high)});
      }
    }
    {
      auto out = open_out(dir / "win_matrix.csv");
      std::vector<std::string> header = {"row_beats_col"};
      for (const auto& p : boot.policies) header.push_back(p.name);
      write_csv_row(out, header);
      for (std::size_t i = 0; i < boot.policies.size(); ++i) {
        std::vector<std::string> row = {boot.policies[i].name};
        for (std::size_t j = 0; j < boot.policies.size(); ++j) row.push_back(format_double(boot.win(i, j)));
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "profiles.csv");
      std::vector<std::string> header = {"true_class", "present", "count"};
      for (std::size_t k = 0; k < K; ++k) header.push_back("share_" + std::to_string(k));
      write_csv_row(out, header);
      for (std::size_t i = 0; i < K; ++i) {
        std::vector<std::string> row = {std::to_string(i), profiles.present[i] ? "1" : "0",
                                        std::to_string(profiles.counts[i])};
        for (std::size_t k = 0; k < K; ++k) row.push_back(profiles.present[i] ? format_double(profiles.at(i, k)) : "");
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "signatures.csv");
      std::vector<std::string> header = {"true_class", "predicted_class", "present", "count"};
      for (std::size_t k = 0; k < K; ++k) header.push_back("c_" + std::to_string(k));
      write_csv_row(out, header);
      for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < K; ++j) {
          const bool present = signatures.present(i, j);
          std::vector<std::string> row = {std::to_string(i), std::to_string(j), present ? "1" : "0",
                                          std::to_string(signatures.counts[i * K + j])};
          for (double v : signatures.signature(i, j)) row.push_back(present ? format_double(v) : "");
          write_csv_row(out, row);
        }
      }
    }
    {
      auto out = open_out(dir / "confusion.csv");
      std::vector<std::string> header = {"class"};
      for (std::size_t k = 0; k < K; ++k) header.push_back("e_" + std::to_string(k));
      write_csv_row(out, header);
      for (std::size_t i = 0; i < K; ++i) {
        std::vector<std::string> row = {std::to_string(i)};
        for (std::size_t j = 0; j < K; ++j) row.push_back(format_double(confusion.at(i, j)));
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "reliability.csv");
      write_csv_row(out, {"class", "present", "count", "median_rho", "mean_rho", "p90_rho", "fraction_reliable"});
      for (const auto& r : reliability.rows) {
        write_csv_row(out, {std::to_string(r.cls), r.present ? "1" : "0", std::to_string(r.count),
                            r.present ? format_double(r.median) : "", r.present ? format_double(r.mean) : "",
                            r.present ? format_double(r.p90) : "",
                            r.present ? format_double(r.fraction_reliable) : ""});
      }
    }
  }

  if (wants(config, "json")) {
    Json b;
    b["n_resamples"] = boot.n_resamples;
    b["seed"] = boot.seed;
    b["grid_size"] = boot.grid_size;
    b["risk"] = std::string(risk_field_name(boot.field));
    b["operating_coverage"] = round9(boot.operating_coverage);
    Json pols = Json::array();
    for (const auto& p : boot.policies) {
      Json j;
      j["name"] = p.name;
      j["ausc"] = round9(p.ausc_full);
      j["ausc_mean"] = round9(p.ausc_mean);
      j["ausc_std"] = round9(p.ausc_std);
      j["ausc_ci95"] = {round9(p.ausc_ci_low), round9(p.ausc_ci_high)};
      j["best_fraction"] = round9(p.best_fraction);
      j["op_value"] = round9(p.operating_full);
      j["op_ci95"] = {round9(p.operating_ci_low), round9(p.operating_ci_high)};
      j["ausc_samples"] = vec_json(p.ausc_samples);
      pols.push_back(std::move(j));
    }
    b["policies"] = std::move(pols);
    Json wm = Json::array();
    for (std::size_t i = 0; i < boot.policies.size(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < boot.policies.size(); ++j) row.push_back(round9(boot.win(i, j)));
      wm.push_back(std::move(row));
    }
    b["win_matrix"] = std::move(wm);
    write_json(dir / "bootstrap.json", b);

    Json s;
    Json table = Json::array();
    for (const auto& c : curves) {
      Json j;
      j["policy"] = c.policy_name;
      for (auto f : fields) j["ausc_" + std::string(risk_field_name(f))] = round9(ausc(c, f));
      for (auto f : fields) {
        j[std::string(risk_field_name(f)) + "_at_op"] = round9(value_at_coverage(c, f, config.operating_coverage));
      }
      table.push_back(std::move(j));
    }
    s["ausc"] = std::move(table);
    Json rel;
    rel["threshold"] = round9(reliability.threshold);
    rel["fraction_all_reliable"] = round9(reliability.fraction_all_reliable);
    Json rows = Json::array();
    for (const auto& r : reliability.rows) {
      Json j;
      j["class"] = r.cls;
      j["count"] = r.count;
      j["present"] = r.present;
      j["median"] = r.present ? Json(round9(r.median)) : Json(nullptr);
      j["mean"] = r.present ? Json(round9(r.mean)) : Json(nullptr);
      j["p90"] = r.present ? Json(round9(r.p90)) : Json(nullptr);
      j["fraction_reliable"] = r.present ? Json(round9(r.fraction_reliable)) : Json(nullptr);
      rows.push_back(std::move(j));
    }
    rel["classes"] = std::move(rows);
    s["reliability"] = std::move(rel);
    write_json(dir / "selective.json", s);
  }
}

void cmd_ood(const RunConfig& config) {
  if (config.id_inputs.empty() || config.ood_inputs.empty()) {
    throw UsageError("ood evaluation needs both --id and --ood inputs");
  }
  if (config.id_inputs.size() != config.ood_inputs.size()) {
    throw UsageError("--id and --ood must be given the same number of times (one pair per seed)");
  }

  std::vector<std::vector<UncertaintyReport>> id_runs, ood_runs;
  std::size_t K = 0;
  for (std::size_t s = 0; s < config.id_inputs.size(); ++s) {
    const auto id = load(config.id_inputs[s]);
    const auto ood = load(config.ood_inputs[s]);
    if (id.tensor.n_classes() != ood.tensor.n_classes() || (K != 0 && id.tensor.n_classes() != K)) {
      throw UsageError("ID and OoD inputs must share one class count");
    }
    K = id.tensor.n_classes();
    id_runs.push_back(report_all(id.tensor, nullptr, config.threads));
    ood_runs.push_back(report_all(ood.tensor, nullptr, config.threads));
  }

  OodAggregate agg;
  std::vector<RhoShift> shift;
  if (config.pool_seeds || id_runs.size() == 1) {
    std::vector<UncertaintyReport> id_all, ood_all;
    for (auto& r : id_runs) id_all.insert(id_all.end(), r.begin(), r.end());
    for (auto& r : ood_runs) ood_all.insert(ood_all.end(), r.begin(), r.end());
    const auto table = ood_table(id_all, ood_all);
    agg = aggregate_seeds(std::span<const OodTable>(&table, 1));
    shift = rho_shift(id_all, ood_all);
  } else {
    std::vector<OodTable> tables;
    for (std::size_t s = 0; s < id_runs.size(); ++s) tables.push_back(ood_table(id_runs[s], ood_runs[s]));
    agg = aggregate_seeds(tables);
    std::vector<UncertaintyReport> id_all, ood_all;
    for (auto& r : id_runs) id_all.insert(id_all.end(), r.begin(), r.end());
    for (auto& r : ood_runs) ood_all.insert(ood_all.end(), r.begin(), r.end());
    shift = rho_shift(id_all, ood_all);
  }
  const std::size_t n_seeds = config.pool_seeds ? 1 : id_runs.size();
  const auto dir = out_dir(config);

  std::vector<std::string> names;
  for (OodMetric m : kOodMetrics) names.push_back(ood_metric_name(m));

  auto row_fields = [&](const OodResult& m, const OodResult& sd) {
    return std::vector<std::string>{format_double(m.mean_id), format_double(m.mean_ood), format_double(m.ratio),
                                    format_double(sd.ratio),  format_double(m.auroc),    format_double(sd.auroc)};
  };
  const std::vector<std::string> value_header = {"mean_id", "mean_ood", "ratio", "ratio_std", "auroc", "auroc_std"};

  if (wants(config, "csv")) {
    {
      auto out = open_out(dir / "ood_metrics.csv");
      std::vector<std::string> header = {"metric"};
      header.insert(header.end(), value_header.begin(), value_header.end());
      header.push_back("n_seeds");
      write_csv_row(out, header);
      for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<std::string> row = {names[i]};
        const auto f = row_fields(agg.mean.metrics[i], agg.std.metrics[i]);
        row.insert(row.end(), f.begin(), f.end());
        row.push_back(std::to_string(n_seeds));
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "ood_per_class.csv");
      std::vector<std::string> header = {"class"};
      header.insert(header.end(), value_header.begin(), value_header.end());
      header.push_back("n_seeds");
      write_csv_row(out, header);
      for (std::size_t k = 0; k < K; ++k) {
        std::vector<std::string> row = {"C_" + std::to_string(k)};
        const auto f = row_fields(agg.mean.per_class[k], agg.std.per_class[k]);
        row.insert(row.end(), f.begin(), f.end());
        row.push_back(std::to_string(n_seeds));
        write_csv_row(out, row);
      }
    }
    {
      auto out = open_out(dir / "rho_shift.csv");
      write_csv_row(out, {"class", "median_rho_id", "median_rho_ood", "relative_shift"});
      for (const auto& s : shift) {
        write_csv_row(out, {std::to_string(s.cls), format_double(s.median_id), format_double(s.median_ood),
                            s.shift_defined ? format_double(s.relative_shift) : ""});
      }
    }
  }

  if (wants(config, "json")) {
    auto cell = [](const OodResult& m, const OodResult& sd) {
      Json j;
      j["mean_id"] = round9(m.mean_id);
      j["mean_ood"] = round9(m.mean_ood);
      j["ratio"] = round9(m.ratio);
      j["ratio_std"] = round9(sd.ratio);
      j["auroc"] = round9(m.auroc);
      j["auroc_std"] = round9(sd.auroc);
      return j;
    };
    Json doc;
    doc["n_seeds"] = n_seeds;
    doc["pooled"] = config.pool_seeds;
    Json metrics = Json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      Json j = cell(agg.mean.metrics[i], agg.std.metrics[i]);
      j["metric"] = names[i];
      metrics.push_back(std::move(j));
    }
    doc["metrics"] = std::move(metrics);
    Json per_class = Json::array();
    for (std::size_t k = 0; k < K; ++k) {
      Json j = cell(agg.mean.per_class[k], agg.std.per_class[k]);
      j["class"] = k;
      per_class.push_back(std::move(j));
    }
    doc["per_class"] = std::move(per_class);
    Json rs = Json::array();
    for (const auto& s : shift) {
      Json j;
      j["class"] = s.cls;
      j["median_rho_id"] = round9(s.median_id);
      j["median_rho_ood"] = round9(s.median_ood);
      j["relative_shift"] = s.shift_defined ? Json(round9(s.relative_shift)) : Json(nullptr);
      rs.push_back(std::move(j));
    }
    doc["rho_shift"] = std::move(rs);
    write_json(dir / "ood.json", doc);
  }
}

void cmd_disentangle(const RunConfig& config) {
  if (config.manifest.empty()) throw UsageError("disentangle needs --manifest");
  std::ifstream in(config.manifest);
  if (!in) throw UsageError("cannot open manifest " + config.manifest);
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
  }
  if (!manifest.is_array() || manifest.empty()) throw ParseError("manifest must be a nonempty JSON list", 0);

  const auto aggregation = parse_aggregation(config.aggregation);
  const fs::path base = fs::path(config.manifest).parent_path();
  std::vector<NoiseSweepPoint> points;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& e = manifest[i];
    if (!e.is_object() || !e.contains("alpha") || !e["alpha"].is_number() || !e.contains("path") ||
        !e["path"].is_string()) {
      throw ParseError("manifest entry " + std::to_string(i) + " needs numeric 'alpha' and string 'path'", i);
    }
    const double alpha = e["alpha"].get<double>();
    if (alpha == 0.0) ++zeros;
    fs::path p = e["path"].get<std::string>();
    if (p.is_relative()) p = base / p;
    const auto data = io::ingest(p);
    points.push_back(sweep_point(data.tensor, alpha, aggregation, config.threads));
  }
  if (zeros != 1) throw UsageError("manifest must contain exactly one alpha = 0 entry, found " + std::to_string(zeros));

  const auto rows = sweep_table(points);
  const auto dir = out_dir(config);
  if (wants(config, "csv")) {
    auto out = open_out(dir / "disentangle.csv");
    write_csv_row(out, {"alpha", "mean_aleatoric", "mean_mi", "mean_csum", "r_rel_mi", "r_rel_csum", "inflation"});
    for (const auto& r : rows) {
      write_csv_row(out, {format_double(r.point.alpha), format_double(r.point.mean_aleatoric),
                          format_double(r.point.mean_epistemic_mi), format_double(r.point.mean_epistemic_csum),
                          opt(r.r_rel_mi), opt(r.r_rel_csum), opt(r.inflation)});
    }
  }
  if (wants(config, "json")) {
    Json doc;
    doc["aggregation"] = config.aggregation;
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["alpha"] = round9(r.point.alpha);
      j["mean_aleatoric"] = round9(r.point.mean_aleatoric);
      j["mean_mi"] = round9(r.point.mean_epistemic_mi);
      j["mean_csum"] = round9(r.point.mean_epistemic_csum);
      j["r_rel_mi"] = opt_json(r.r_rel_mi);
      j["r_rel_csum"] = opt_json(r.r_rel_csum);
      j["inflation"] = opt_json(r.inflation);
      arr.push_back(std::move(j));
    }
    doc["sweep"] = std::move(arr);
    write_json(dir / "disentangle.json", doc);
  }
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  SelfTestOptions options;
  options.seed = config.seed == 0 ? options.seed : config.seed;
  options.threads = config.threads;
  options.epsilon = config.epsilon;
  const auto results = run_self_test(options);
  std::size_t failed = 0;
  std::string text;
  for (const auto& r : results) {
    text += (r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail + "\n";
    if (!r.passed) ++failed;
  }
  text += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " checks passed\n";
  out << text;
  if (config.out_dir != ".") {
    auto file = open_out(out_dir(config) / "validate.txt");
    file << text;
  }
  return failed == 0 ? kSuccess : kValidationFailure;
}

void cmd_synth(const SynthConfig& config) {
  if (config.out.empty()) throw UsageError("synth needs --out");
  io::Format format;
  if (config.format == "jsonl") {
    format = io::Format::kJsonl;
  } else if (config.format == "binary") {
    format = io::Format::kBinary;
  } else {
    throw UsageError("format must be jsonl or binary");
  }

  if (config.kind == "classifier") {
    ClassifierSpec spec;
    spec.n_inputs = config.n_inputs;
    spec.n_samples = config.n_samples;
    spec.n_classes = config.n_classes;
    spec.concentration_min = config.concentration_min;
    spec.concentration_max = config.concentration_max;
    spec.center_concentration = config.center_concentration;
    spec.floor = config.floor;
    spec.flatten = config.flatten;
    spec.seed = config.seed;
    auto data = synth_classifier(spec);
    io::Dataset ds{std::move(data.tensor), std::nullopt};
    if (config.labels) ds.labels = std::move(data.labels);
    io::save(config.out, ds, format);
    return;
  }

  std::optional<AnalyticDistribution> dist;
  if (config.kind == "dirichlet") {
    dist = AnalyticDistribution::dirichlet(config.alpha.empty() ? std::vector<double>(config.n_classes, 1.0)
                                                                 : config.alpha);
  } else if (config.kind == "vertex") {
    dist = AnalyticDistribution::vertex(config.n_classes);
  } else if (config.kind == "dirac") {
    dist = AnalyticDistribution::dirac(config.theta.empty()
                                           ? std::vector<double>(config.n_classes, 1.0 / static_cast<double>(config.n_classes))
                                           : config.theta);
  } else {
    throw UsageError("unknown synth kind '" + config.kind + "'");
  }
  const std::vector<AnalyticDistribution> dists(config.n_inputs, *dist);
  io::save(config.out, io::Dataset{sample_tensor(dists, config.n_samples, config.seed), std::nullopt}, format);
}

}  // namespace epuc::cli
