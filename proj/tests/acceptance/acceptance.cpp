// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   epuc_acceptance --golden <dir> --work <dir> [--regenerate]
//
// --regenerate rewrites the golden files from the current build instead of
// comparing against them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "epuc/cli/app.hpp"
#include "epuc/disentangle.hpp"
#include "epuc/io.hpp"
#include "epuc/metrics.hpp"
#include "epuc/moments.hpp"
#include "epuc/ood.hpp"
#include "epuc/random.hpp"
#include "epuc/selective.hpp"
#include "epuc/synth.hpp"

namespace fs = std::filesystem;
using namespace epuc;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> body;
};

fs::path g_golden;
fs::path g_work;
bool g_regenerate = false;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* stdout_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (stdout_text) *stdout_text = out.str();
  if (code != 0) std::cerr << "  command failed (" << code << "): " << err.str();
  return code;
}

// Sorted relative path -> bytes for every file under dir.
std::vector<std::pair<std::string, std::string>> tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), dir).generic_string(), slurp(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- independent oracles -------------------------------------------------

double oracle_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

// Second-order EU of a finite mixture from its population moments.
double oracle_mixture_eu(const std::vector<std::vector<double>>& pts, const std::vector<double>& w) {
  const std::size_t K = pts[0].size();
  double eu = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      m += w[i] * pts[i][k];
      m2 += w[i] * pts[i][k] * pts[i][k];
    }
    const double var = m2 - m * m;
    if (var > 0.0) eu += 0.5 * var / m;
  }
  return eu;
}

std::vector<double> oracle_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double oracle_auroc(const std::vector<double>& id, const std::vector<double>& ood) {
  double wins = 0.0;
  for (double o : ood) {
    for (double i : id) wins += o > i ? 1.0 : (o == i ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

// Midpoint Riemann sum of the piecewise-linear curve through (x, y).
double oracle_riemann(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
  const double a = x.front(), b = x.back(), h = (b - a) / static_cast<double>(n);
  double sum = 0.0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a + (static_cast<double>(i) + 0.5) * h;
    while (seg + 2 < x.size() && t > x[seg + 1]) ++seg;
    const double f = (t - x[seg]) / (x[seg + 1] - x[seg]);
    sum += (y[seg] + f * (y[seg + 1] - y[seg])) * h;
  }
  return sum;
}

// ---- criteria ---------------------------------------------------------------

Outcome closed_form_values() {
  Outcome o;
  auto check = [&](const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      o.passed = false;
      o.detail += what + " got " + fmt(got) + " want " + fmt(want) + "; ";
    }
  };
  const auto pair = AnalyticDistribution::mixture({{0.2, 0.8}, {0.4, 0.6}}, {0.5, 0.5});
  check("mixture EU", analytic_eu(pair), 0.0238095, 1e-7);
  check("mixture EU exact", analytic_eu(pair), 5.0 / 210.0, 1e-7);
  const std::vector<double> z = {0.15, -0.15};
  check("shifted EU", analytic_eu(location_shift(pair, z)), 0.0202020, 1e-7);

  std::size_t vertex_wins = 0;
  for (std::size_t K = 2; K <= 10; ++K) {
    const double k = static_cast<double>(K);
    const double uni = analytic_eu(AnalyticDistribution::dirichlet(std::vector<double>(K, 1.0)));
    const double vert = analytic_eu(AnalyticDistribution::vertex(K));
    check("Dirichlet(1) K=" + std::to_string(K), uni, (k - 1) / (2 * (k + 1)), 1e-7);
    check("vertex K=" + std::to_string(K), vert, (k - 1) / 2, 1e-7);
    if (vert > uni) ++vertex_wins;
  }
  if (vertex_wins != 9) {
    o.passed = false;
    o.detail += "vertex mixture not above uniform Dirichlet for every K; ";
  }
  if (o.passed) o.detail = "5/210 -> 0.02/0.99, K=2..10 Dirichlet and vertex forms, vertex > uniform 9/9";
  return o;
}

Outcome axiom_suite() {
  Rng rng(777, 1);
  std::size_t n_dists = 0, nonneg_fail = 0, zero_fail = 0, spread_fail = 0, spread_tested = 0, variance_fail = 0, boundary_fail = 0,
              empirical = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const std::size_t K = 2 + rng.below(7);
    const int family = static_cast<int>(rng.below(4));
    std::vector<std::vector<double>> pts;
    std::vector<double> w;
    std::optional<AnalyticDistribution> dist;
    auto random_point = [&]() {
      std::vector<double> p(K);
      double s = 0.0;
      for (auto& x : p) s += (x = rng.gamma(0.7) + 1e-9);
      for (auto& x : p) x /= s;
      return p;
    };
    if (family == 0) {
      pts = {random_point()};
      w = {1.0};
      dist = AnalyticDistribution::dirac(pts[0]);
    } else if (family == 1) {
      const std::size_t M = 2 + rng.below(5);
      double ws = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        pts.push_back(random_point());
        w.push_back(0.05 + rng.uniform());
        ws += w.back();
      }
      for (auto& x : w) x /= ws;
      dist = AnalyticDistribution::mixture(pts, w);
    } else if (family == 2) {
      std::vector<double> alpha(K);
      for (auto& a : alpha) a = 0.1 + 10.0 * rng.uniform();
      dist = AnalyticDistribution::dirichlet(alpha);
    } else {
      dist = AnalyticDistribution::vertex(K);
    }
    ++n_dists;
    const double eu = analytic_eu(*dist);

    // Nonnegativity and zero exactly at point masses.
    if (!(eu >= 0.0)) ++nonneg_fail;
    if (family == 0 && eu != 0.0) ++zero_fail;
    if (family != 0 && !(eu > 0.0)) ++zero_fail;
    if (family == 1 && std::abs(eu - oracle_mixture_eu(pts, w)) > 1e-12) ++zero_fail;

    // A mean-preserving spread strictly increases EU.
    if (family <= 1) {
      const std::size_t i = rng.below(K);
      const std::size_t j = (i + 1 + rng.below(K - 1)) % K;
      double room = 1.0;
      for (const auto& p : pts) room = std::min({room, p[i], p[j], 1.0 - p[i], 1.0 - p[j]});
      if (room > 1e-9) {
        ++spread_tested;
        if (!(analytic_eu(mps_transform(*dist, 0.5 * room, i, j)) > eu)) ++spread_fail;
      }
    }

    // Empirical tensors: variance bound (both normalisations), boundary bound, zero iff identical samples.
    const std::size_t S = 2 + rng.below(40);
    std::vector<AnalyticDistribution> one = {*dist};
    const auto t = sample_tensor(one, S, 1000 + trial);
    ++empirical;
    const auto pop = compute_moments(t, 0, VarianceNormalisation::kPopulation);
    const auto bes = compute_moments(t, 0);
    const auto cpop = c_vector(pop);
    const double s = static_cast<double>(S);
    bool all_same = true;
    for (std::size_t r = 1; r < S && all_same; ++r) {
      for (std::size_t k = 0; k < K; ++k) all_same = all_same && t.at(0, r, k) == t.at(0, 0, k);
    }
    double csum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double mu = pop.mean[k];
      if (pop.variance[k] > mu * (1.0 - mu) + 1e-12) ++variance_fail;
      if (bes.variance[k] > s / (s - 1.0) * mu * (1.0 - mu) + 1e-12) ++variance_fail;
      if (cpop[k] > 0.5 * (1.0 - mu) + 1e-12) ++boundary_fail;
      if (cpop[k] < 0.0) ++nonneg_fail;
      csum += cpop[k];
    }
    if (all_same != (csum == 0.0)) ++zero_fail;
  }
  Outcome o;
  o.passed = nonneg_fail == 0 && zero_fail == 0 && spread_fail == 0 && variance_fail == 0 && boundary_fail == 0 &&
             n_dists >= 1000 && spread_tested > 0;
  o.detail = std::to_string(n_dists) + " distributions, " + std::to_string(empirical) + " tensors, " +
             std::to_string(spread_tested) + " spreads; failures nonnegative " + std::to_string(nonneg_fail) + ", zero iff point mass " +
             std::to_string(zero_fail) + ", spread increases " + std::to_string(spread_fail) + ", variance bound " +
             std::to_string(variance_fail) + ", boundary bound " + std::to_string(boundary_fail);
  return o;
}

Outcome taylor_fidelity() {
  ClassifierSpec spec;
  spec.n_inputs = 500;
  spec.n_samples = 50;
  spec.n_classes = 4;
  spec.concentration_min = 50.0;
  spec.concentration_max = 500.0;
  spec.seed = 20240607;
  const auto data = synth_classifier(spec);
  std::vector<double> csum, mi;
  for (std::size_t n = 0; n < data.tensor.n_inputs(); ++n) {
    const auto block = data.tensor.block(n);
    const auto c = c_vector(compute_moments(block));
    csum.push_back(std::accumulate(c.begin(), c.end(), 0.0));
    // Oracle MI straight from the samples.
    const std::size_t S = block.n_samples(), K = block.n_classes();
    std::vector<double> mean(K, 0.0);
    double per_pass = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      std::vector<double> p(block.pass(s).begin(), block.pass(s).end());
      per_pass += oracle_entropy(p);
      for (std::size_t k = 0; k < K; ++k) mean[k] += p[k];
    }
    for (auto& m : mean) m /= static_cast<double>(S);
    mi.push_back(std::max(0.0, oracle_entropy(mean) - per_pass / static_cast<double>(S)));
  }
  const double r = oracle_pearson(csum, mi);
  const double rho = oracle_pearson(oracle_ranks(csum), oracle_ranks(mi));
  Outcome o;
  o.passed = r >= 0.98 && rho >= 0.99;
  o.detail = "500 inputs, S=50: pearson " + fmt(r) + " (>= 0.98), spearman " + fmt(rho) + " (>= 0.99)";
  return o;
}

Outcome skewness_identity() {
  std::size_t checked = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ClassifierSpec spec;
    spec.n_inputs = 250;
    spec.n_samples = 30;
    spec.n_classes = 3 + seed;
    spec.concentration_min = 1.0;
    spec.concentration_max = 300.0;
    spec.center_concentration = 0.2;
    spec.floor = 0.0;
    spec.seed = seed;
    const auto data = synth_classifier(spec);
    for (std::size_t n = 0; n < data.tensor.n_inputs(); ++n) {
      const auto m = compute_moments(data.tensor, n);
      const auto rho = skewness_rho(m);
      for (std::size_t k = 0; k < m.n_classes; ++k) {
        const double mu = m.mean[k], var = m.variance[k];
        if (!(var > 0.0 && mu > 1e-6)) continue;
        const double lhs = rho[k] * (0.5 * var / mu);
        const double rhs = std::abs(m.third_moment[k]) / (6.0 * mu * mu);
        if (rhs == 0.0 && lhs == 0.0) continue;
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        ++checked;
      }
    }
  }
  Outcome o;
  o.passed = checked > 1000 && worst <= 1e-10;
  o.detail = std::to_string(checked) + " class marginals, max relative error " + fmt(worst) + " (<= 1e-10)";
  return o;
}

Outcome ausc_oracle() {
  Rng rng(4242);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t N = 20 + rng.below(500);
    const std::size_t K = 2 + rng.below(5);
    std::vector<std::size_t> y(N), yhat(N);
    std::vector<double> score(N);
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rng.below(K);
      const bool wrong = rng.uniform() < 0.4;
      yhat[i] = wrong ? rng.below(K) : y[i];
      score[i] = rng.uniform() + (wrong ? rng.uniform() : 0.0);
    }
    std::vector<std::size_t> crit = {K - 1};
    std::vector<std::size_t> safe = {0};
    const auto part = ClassPartition::make(safe, crit, K);
    const std::size_t grid = 20 + rng.below(300);
    const auto curve = risk_curve(deferral_order(score), y, yhat, part, grid);
    const auto field = static_cast<RiskField>(rng.below(5));
    const double lib = ausc(curve, field);
    const double ref = oracle_riemann(curve.coverage, curve.series(field), 1000000);
    worst = std::max(worst, std::abs(lib - ref));
  }

  // Hand-enumerated five-input case.
  const std::vector<std::size_t> y = {2, 2, 0, 0, 0}, yhat = {0, 2, 0, 0, 0};
  const std::vector<double> score = {0.9, 0.1, 0.2, 0.3, 0.4};
  const auto part = ClassPartition::make({0, 1}, {2}, 3);
  const auto curve = risk_curve(deferral_order(score), y, yhat, part, 5);
  const bool hand = curve.kept_total[3] == 4 && curve.critical_fnr[3] == 0.0 && curve.kept_total[4] == 5 &&
                    curve.critical_fnr[4] == 0.5;

  Outcome o;
  o.passed = worst <= 1e-3 && hand;
  o.detail = "50 random curves, max |AUSC - Riemann(1e6)| " + fmt(worst) + " (<= 1e-3); five-input FNR 0 @0.8, 0.5 @1.0 " +
             (hand ? "exact" : "WRONG");
  return o;
}

Outcome auroc_oracle() {
  Rng rng(99, 3);
  std::size_t mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(100);
    const std::size_t m = 1 + rng.below(10000 / n);
    const bool ties = t % 2 == 0;
    std::vector<double> id(n), ood(m);
    for (auto& x : id) x = ties ? static_cast<double>(rng.below(10)) : rng.uniform();
    for (auto& x : ood) x = ties ? static_cast<double>(rng.below(12)) : rng.uniform() + 0.1;
    if (auroc(id, ood) != oracle_auroc(id, ood)) ++mismatches;
  }
  const double worked = auroc(std::vector<double>{0.1, 0.3}, std::vector<double>{0.3, 0.5});
  Outcome o;
  o.passed = mismatches == 0 && worked == 0.875;
  o.detail = std::to_string(mismatches) + " mismatches of 100 (exact equality); worked example " + fmt(worked);
  return o;
}

// Half-width d with ln 2 - H(0.5 + d, 0.5 - d) = target, by bisection.
double solve_half_width(double target) {
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double mi = std::log(2.0) - oracle_entropy({0.5 + mid, 0.5 - mid});
    (mi < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Inputs whose per-input MI averages to `target`: pairs at (1 - f) and (1 + f) times it.
SampleTensor mi_fixture(double target, std::size_t pairs) {
  std::vector<std::vector<std::vector<double>>> raw;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double f = 0.5 * static_cast<double>(i + 1) / static_cast<double>(pairs);
    for (double scale : {1.0 - f, 1.0 + f}) {
      const double d = solve_half_width(target * scale);
      raw.push_back({{0.5 + d, 0.5 - d}, {0.5 - d, 0.5 + d}});
    }
  }
  return validate_tensor(raw);
}

Outcome ood_mean_ratio() {
  const auto dir = g_work / "mean_ratio";
  fs::create_directories(dir);
  io::save(dir / "id.jsonl", io::Dataset{mi_fixture(0.0096, 10), std::nullopt}, io::Format::kJsonl);
  io::save(dir / "ood.bin", io::Dataset{mi_fixture(0.0569, 7), std::nullopt}, io::Format::kBinary);
  Outcome o;
  if (cli({"ood", "--id", (dir / "id.jsonl").string(), "--ood", (dir / "ood.bin").string(), "--out",
           (dir / "out").string()}) != 0) {
    o.passed = false;
    o.detail = "ood command failed";
    return o;
  }
  const auto table = io::read_csv(dir / "out" / "ood_metrics.csv");
  double mean_id = 0, mean_ood = 0, ratio = 0;
  for (const auto& row : table.rows) {
    if (row[table.column("metric")] != "MI") continue;
    mean_id = std::stod(row[table.column("mean_id")]);
    mean_ood = std::stod(row[table.column("mean_ood")]);
    ratio = std::stod(row[table.column("ratio")]);
  }
  o.passed = std::abs(ratio - 5.927) <= 1e-3;
  o.detail = "ingested means " + fmt(mean_id) + " / " + fmt(mean_ood) + " -> ratio " + fmt(ratio) +
             " (5.927 +- 1e-3)";
  return o;
}

Outcome disentanglement_units() {
  auto point = [](double a, double ua, double mi) {
    NoiseSweepPoint p;
    p.alpha = a;
    p.mean_aleatoric = ua;
    p.mean_epistemic_mi = mi;
    p.mean_epistemic_csum = mi;
    return p;
  };
  const auto base = point(0.0, 0.5, 0.01);
  const double unchanged = relative_ratio(base, point(0.2, 0.6, 0.01), EpistemicMetric::kMI).value_or(NAN);
  const double equal = relative_ratio(base, point(0.2, 0.55, 0.011), EpistemicMetric::kMI).value_or(NAN);
  const double worked = relative_ratio(base, point(0.2, 0.6, 0.011), EpistemicMetric::kMI).value_or(NAN);
  NoiseSweepPoint inf = point(0.0, 1.0, 0.039);
  inf.mean_epistemic_csum = 0.053;
  const double inflation = baseline_inflation(inf).value_or(NAN);
  Outcome o;
  o.passed = std::abs(unchanged) <= 1e-12 && std::abs(equal - 1.0) <= 1e-9 && std::abs(worked - 0.5) <= 1e-9 &&
             std::abs(inflation - 1.359) <= 1e-3;
  o.detail = "unchanged " + fmt(unchanged) + ", equal relative " + fmt(equal) + ", worked " + fmt(worked) +
             ", inflation " + fmt(inflation) + " (1.359 +- 1e-3)";
  return o;
}

Outcome determinism() {
  const unsigned many = std::max(8u, std::thread::hardware_concurrency());
  const auto dir = g_work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto data = (dir / "data.jsonl").string();
  Outcome o;
  if (cli({"synth", "--seed", "11", "--inputs", "300", "--out", data}) != 0) return {false, "synth failed"};

  std::vector<std::string> validate_out;
  for (unsigned threads : {1u, 1u, many}) {
    std::string text;
    cli({"validate", "--threads", std::to_string(threads)}, &text);
    validate_out.push_back(text);
  }
  const bool validate_same = validate_out[0] == validate_out[1] && validate_out[0] == validate_out[2];

  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  int run_id = 0;
  for (unsigned threads : {1u, 1u, many}) {
    const auto out = dir / ("sel" + std::to_string(run_id++));
    if (cli({"selective", "--input", data, "--safe", "0,1", "--critical", "2,3", "--seed", "5", "--resamples", "100",
             "--threads", std::to_string(threads), "--out", out.string()}) != 0) {
      return {false, "selective failed"};
    }
    runs.push_back(tree(out));
  }
  const bool selective_same = !runs[0].empty() && runs[0] == runs[1] && runs[0] == runs[2];

  const auto ds = io::ingest(data);
  const auto part = ClassPartition::make({0, 1}, {2, 3}, 4);
  const auto labels = LabelSet::from(ds.tensor, *ds.labels);
  const auto inputs = policy_inputs(report_all(ds.tensor, &part, 1));
  std::vector<BootstrapSummary> boots;
  for (unsigned threads : {1u, 1u, many}) {
    BootstrapOptions opt;
    opt.n_resamples = 150;
    opt.seed = 9;
    opt.threads = threads;
    boots.push_back(bootstrap(inputs, labels.true_labels(), labels.predicted_labels(), part, opt));
  }
  bool boot_same = true;
  for (std::size_t r = 1; r < boots.size(); ++r) {
    boot_same = boot_same && boots[r].win_matrix == boots[0].win_matrix;
    for (std::size_t p = 0; p < boots[0].policies.size(); ++p) {
      const auto& a = boots[0].policies[p];
      const auto& b = boots[r].policies[p];
      boot_same = boot_same && a.ausc_samples == b.ausc_samples && a.ausc_ci_low == b.ausc_ci_low &&
                  a.ausc_ci_high == b.ausc_ci_high && a.best_fraction == b.best_fraction &&
                  a.operating_ci_low == b.operating_ci_low && a.operating_ci_high == b.operating_ci_high;
    }
  }
  o.passed = validate_same && selective_same && boot_same;
  o.detail = "threads 1, 1, " + std::to_string(many) + ": validate " + (validate_same ? "identical" : "DIFFERS") +
             ", selective files " + (selective_same ? "identical" : "DIFFER") + " (" +
             std::to_string(runs[0].size()) + " files), bootstrap " + (boot_same ? "identical" : "DIFFERS");
  return o;
}

// synth -> score -> selective, every output byte-compared with the committed copy.
Outcome golden_run() {
  const auto dir = g_work / "golden";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto data = (dir / "fixture.jsonl").string();
  if (cli({"synth", "--seed", "20240607", "--inputs", "200", "--samples", "20", "--classes", "5", "--out", data}) != 0 ||
      cli({"score", "--input", data, "--safe", "0,1,2", "--critical", "3,4", "--out", (dir / "score").string()}) !=
          0 ||
      cli({"selective", "--input", data, "--safe", "0,1,2", "--critical", "3,4", "--seed", "3", "--resamples", "200",
           "--out", (dir / "selective").string()}) != 0) {
    return {false, "pipeline command failed"};
  }
  const auto produced = tree(dir);
  if (g_regenerate) {
    fs::remove_all(g_golden);
    for (const auto& [rel, bytes] : produced) {
      fs::create_directories((g_golden / rel).parent_path());
      std::ofstream(g_golden / rel, std::ios::binary) << bytes;
    }
    return {true, "regenerated " + std::to_string(produced.size()) + " golden files"};
  }
  if (!fs::exists(g_golden)) return {false, "golden directory missing: " + g_golden.string()};
  const auto expected = tree(g_golden);
  std::size_t same = 0;
  std::string diff;
  for (const auto& [rel, bytes] : expected) {
    const auto it = std::find_if(produced.begin(), produced.end(), [&](const auto& p) { return p.first == rel; });
    if (it == produced.end()) {
      diff += " missing " + rel;
    } else if (it->second != bytes) {
      diff += " differs " + rel;
    } else {
      ++same;
    }
  }
  if (produced.size() != expected.size()) diff += " file count " + std::to_string(produced.size());
  Outcome o;
  o.passed = diff.empty() && !expected.empty();
  o.detail = std::to_string(same) + "/" + std::to_string(expected.size()) + " files byte-identical" + diff;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--golden" && i + 1 < argc) {
      g_golden = argv[++i];
    } else if (a == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else if (a == "--regenerate") {
      g_regenerate = true;
    } else {
      std::cerr << "usage: epuc_acceptance --golden <dir> --work <dir> [--regenerate]\n";
      return 2;
    }
  }
  if (g_golden.empty() || g_work.empty()) {
    std::cerr << "usage: epuc_acceptance --golden <dir> --work <dir> [--regenerate]\n";
    return 2;
  }
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria = {
      {1, "closed-form reference values", 1.0, closed_form_values},
      {2, "axiom suite on random distributions", 30.0, axiom_suite},
      {3, "second-order approximation fidelity", 10.0, taylor_fidelity},
      {4, "skewness ratio identity", 60.0, skewness_identity},
      {5, "AUSC against Riemann oracle", 60.0, ausc_oracle},
      {6, "AUROC against pairwise oracle", 60.0, auroc_oracle},
      {7, "OoD/ID mean ratio on ingested fixture", 60.0, ood_mean_ratio},
      {8, "disentanglement ratio units", 60.0, disentanglement_units},
      {9, "determinism across runs and threads", 60.0, determinism},
      {10, "end-to-end golden run", 60.0, golden_run},
  };

  const auto suite_start = std::chrono::steady_clock::now();
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
      o.passed = false;
      o.detail += "; took " + fmt(secs) + " s, limit " + fmt(c.time_limit_s) + " s";
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << c.number << "] " << c.name << ": " << o.detail << " ("
              << fmt(secs) << " s)\n";
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  const bool in_time = total < 60.0;
  std::cout << (in_time ? "" : "FAIL ") << "total " << fmt(total) << " s (limit 60 s)\n";
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 && in_time ? 0 : 1;
}
