#include "epuc/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "epuc/disentangle.hpp"
#include "epuc/io.hpp"
#include "epuc/moments.hpp"
#include "epuc/ood.hpp"
#include "epuc/random.hpp"
#include "epuc/selective.hpp"
#include "epuc/stats.hpp"
#include "epuc/synth.hpp"

namespace epuc {
namespace {

using io::format_double;

MomentSummary two_class_summary(double mu0, double var) {
  MomentSummary m;
  m.n_classes = 2;
  m.n_samples = 2;
  m.mean = {mu0, 1.0 - mu0};
  m.variance = {var, var};
  m.covariance = {var, -var, -var, var};
  m.correlation = {1.0, -1.0, -1.0, 1.0};
  m.third_moment = {0.0, 0.0};
  return m;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

AnalyticDistribution random_distribution(Rng& rng) {
  const std::size_t K = 2 + rng.below(5);
  const double pick = rng.uniform();
  if (pick < 0.1) {
    std::vector<double> alpha(K, 1.0);
    return AnalyticDistribution::dirac(sample(AnalyticDistribution::dirichlet(alpha), 1, rng.next()));
  }
  if (pick < 0.2) {
    std::vector<double> alpha(K);
    for (auto& a : alpha) a = 0.2 + 5.0 * rng.uniform();
    return AnalyticDistribution::dirichlet(alpha);
  }
  const std::size_t n_points = 2 + rng.below(4);
  std::vector<std::vector<double>> points;
  std::vector<double> weights(n_points);
  const std::vector<double> ones(K, 1.0);
  for (std::size_t i = 0; i < n_points; ++i) {
    points.push_back(sample(AnalyticDistribution::dirichlet(ones), 1, rng.next()));
    weights[i] = 0.05 + rng.uniform();
  }
  const double w = sum(weights);
  for (auto& x : weights) x /= w;
  return AnalyticDistribution::mixture(points, weights);
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return CheckResult{std::move(name), passed, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_self_test(const SelfTestOptions& options) {
  std::vector<CheckResult> out;
  const double eps = options.epsilon;

  // Location-shift counterexample through the empirical C_k path.
  {
    const double before = sum(c_vector(two_class_summary(0.3, 0.01), eps));
    const double after = sum(c_vector(two_class_summary(0.45, 0.01), eps));
    const bool ok = std::abs(before - 5.0 / 210.0) <= 1e-7 && std::abs(after - 0.02 / 0.99) <= 1e-7;
    out.push_back(check("location_shift_empirical", ok,
                        "sum C " + format_double(before) + " -> " + format_double(after)));
  }

  // Same counterexample from population moments.
  {
    const auto q = AnalyticDistribution::mixture({{0.2, 0.8}, {0.4, 0.6}}, {0.5, 0.5});
    const std::vector<double> z = {0.15, -0.15};
    const double before = analytic_eu(q);
    const double after = analytic_eu(location_shift(q, z));
    const bool ok = std::abs(before - 5.0 / 210.0) <= 1e-7 && std::abs(after - 0.02 / 0.99) <= 1e-7;
    out.push_back(check("location_shift_analytic", ok, "EU " + format_double(before) + " -> " + format_double(after)));
  }

  // Closed forms for the uniform Dirichlet and the vertex mixture.
  {
    bool ok = true;
    double worst = 0.0;
    for (std::size_t K = 2; K <= 10; ++K) {
      const double k = static_cast<double>(K);
      const double unif = analytic_eu(AnalyticDistribution::dirichlet(std::vector<double>(K, 1.0)));
      const double vert = analytic_eu(AnalyticDistribution::vertex(K));
      worst = std::max({worst, std::abs(unif - (k - 1.0) / (2.0 * (k + 1.0))), std::abs(vert - (k - 1.0) / 2.0)});
      ok = ok && vert > unif;
    }
    ok = ok && worst <= 1e-7;
    out.push_back(check("uniform_vs_vertex_closed_forms", ok, "max abs error " + format_double(worst)));
  }

  // Nonnegativity, vanishing exactly at point masses, strict growth under spread.
  {
    Rng rng(options.seed, 1);
    std::size_t n = 0, failures = 0, spreads = 0;
    for (; n < 1000; ++n) {
      const auto q = random_distribution(rng);
      const double eu = analytic_eu(q);
      if (!(eu >= 0.0)) ++failures;
      if ((eu == 0.0) != q.is_point_mass()) ++failures;
      if (std::holds_alternative<Dirichlet>(q.kind())) continue;
      const auto mix = q.as_mixture();
      const std::size_t K = q.n_classes();
      const std::size_t i = rng.below(K);
      const std::size_t j = (i + 1 + rng.below(K - 1)) % K;
      double room = 1.0;
      for (const auto& p : mix.points) room = std::min({room, p[i], p[j]});
      if (room <= 1e-9) continue;
      const double spread = room * (0.05 + 0.95 * rng.uniform());
      ++spreads;
      if (!(analytic_eu(mps_transform(q, spread, i, j)) > eu)) ++failures;
    }
    out.push_back(check("axioms_random_distributions", failures == 0,
                        std::to_string(n) + " distributions, " + std::to_string(spreads) + " spreads, " +
                            std::to_string(failures) + " failures"));
  }

  // Variance and C_k bounds on empirical tensors.
  {
    Rng rng(options.seed, 2);
    std::size_t failures = 0, checked = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      const std::size_t K = 2 + rng.below(6);
      const std::size_t S = 2 + rng.below(30);
      const bool vertex = rng.uniform() < 0.3;
      const auto dist = vertex ? AnalyticDistribution::vertex(K)
                               : AnalyticDistribution::dirichlet(std::vector<double>(K, 0.1 + 3.0 * rng.uniform()));
      const auto draws = sample(dist, S, rng.next());
      const SampleBlock block(draws, S, K);
      const auto pop = compute_moments(block, VarianceNormalisation::kPopulation);
      const auto bes = compute_moments(block, VarianceNormalisation::kBessel);
      const auto c_pop = c_vector(pop, eps);
      const double inflate = static_cast<double>(S) / static_cast<double>(S - 1);
      for (std::size_t k = 0; k < K; ++k) {
        const double cap = pop.mean[k] * (1.0 - pop.mean[k]);
        ++checked;
        if (pop.variance[k] > cap + 1e-12) ++failures;
        if (bes.variance[k] > inflate * cap + 1e-12) ++failures;
        if (vertex && std::abs(pop.variance[k] - cap) > 1e-12) ++failures;
        if (c_pop[k] > 0.5 * (1.0 - pop.mean[k]) + 1e-9) ++failures;
      }
    }
    out.push_back(check("variance_and_boundary_bounds", failures == 0,
                        std::to_string(checked) + " class marginals, " + std::to_string(failures) + " failures"));
  }

  // Second-order sum tracks exact MI on concentrated posteriors.
  {
    ClassifierSpec spec;
    spec.n_inputs = 500;
    spec.n_samples = 50;
    spec.n_classes = 4;
    spec.seed = options.seed;
    const auto data = synth_classifier(spec);
    const auto reports = report_all(data.tensor, nullptr, options.threads);
    std::vector<double> csum, mi;
    for (const auto& r : reports) {
      csum.push_back(r.c_sum);
      mi.push_back(r.mutual_information);
    }
    const double pr = stats::pearson(csum, mi);
    const double sr = stats::spearman(csum, mi);
    out.push_back(check("taylor_fidelity", pr >= 0.98 && sr >= 0.99,
                        "pearson " + format_double(pr) + ", spearman " + format_double(sr)));
  }

  // rho_k equals the ratio of third- to second-order terms.
  {
    ClassifierSpec spec;
    spec.n_inputs = 200;
    spec.n_samples = 30;
    spec.n_classes = 5;
    spec.concentration_min = 2.0;
    spec.concentration_max = 200.0;
    spec.seed = options.seed + 1;
    const auto data = synth_classifier(spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < data.tensor.n_inputs(); ++i) {
      const auto m = compute_moments(data.tensor, i);
      const auto rho = skewness_rho(m);
      for (std::size_t k = 0; k < m.n_classes; ++k) {
        const double mu = m.mean[k];
        if (!(m.variance[k] > 0.0) || mu <= 1e-6 || m.third_moment[k] == 0.0) continue;
        const double third = std::abs(m.third_moment[k]) / (6.0 * mu * mu);
        worst = std::max(worst, std::abs(rho[k] * 0.5 * m.variance[k] / mu - third) / third);
      }
    }
    out.push_back(check("skewness_ratio_identity", worst <= 1e-10, "max relative error " + format_double(worst)));
  }

  // Rank AUROC against the pairwise count.
  {
    Rng rng(options.seed, 3);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < 100; ++t) {
      const std::size_t n = 1 + rng.below(100);
      const std::size_t m = 1 + rng.below(100);
      std::vector<double> a(n), b(m);
      for (auto& v : a) v = static_cast<double>(rng.below(20)) / 10.0;
      for (auto& v : b) v = static_cast<double>(rng.below(20)) / 10.0 + 0.3;
      double wins = 0.0;
      for (double x : a) {
        for (double y : b) wins += y > x ? 1.0 : (y == x ? 0.5 : 0.0);
      }
      if (auroc(a, b) != wins / static_cast<double>(n * m)) ++mismatches;
    }
    out.push_back(check("auroc_pairwise_oracle", mismatches == 0, std::to_string(mismatches) + " mismatches of 100"));
  }

  // Trapezoid AUSC against a fine Riemann sum of the interpolated curve.
  {
    Rng rng(options.seed, 4);
    const auto grid = coverage_grid(kDefaultGridSize);
    double worst = 0.0;
    for (std::size_t t = 0; t < 50; ++t) {
      std::vector<double> risk(grid.size());
      for (auto& r : risk) r = rng.uniform();
      const double lib = trapezoid(grid, risk);
      constexpr std::size_t kSteps = 1000000;
      const double lo = grid.front();
      const double h = (1.0 - lo) / kSteps;
      double riemann = 0.0;
      for (std::size_t s = 0; s < kSteps; ++s) {
        const double c = lo + (static_cast<double>(s) + 0.5) * h;
        const double pos = (c - lo) * static_cast<double>(grid.size() - 1) / (1.0 - lo);
        const auto g = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
        const double f = pos - static_cast<double>(g);
        riemann += (risk[g] * (1.0 - f) + risk[g + 1] * f) * h;
      }
      worst = std::max(worst, std::abs(lib - riemann));
    }
    out.push_back(check("ausc_riemann_oracle", worst <= 1e-3, "max abs difference " + format_double(worst)));
  }

  // Monte Carlo convergence of the empirical sum to the closed form.
  {
    double worst = 0.0;
    for (std::size_t K = 2; K <= 10; ++K) {
      const auto q = AnalyticDistribution::dirichlet(std::vector<double>(K, 1.0));
      const auto draws = sample(q, 10000, options.seed, 100 + K);
      const auto m = compute_moments(SampleBlock(draws, 10000, K));
      const double emp = sum(c_vector(m, eps));
      const double exact = analytic_eu(q);
      worst = std::max(worst, std::abs(emp - exact) / exact);
    }
    out.push_back(check("dirichlet_monte_carlo_convergence", worst <= 0.05, "max relative error " + format_double(worst)));
  }

  // Reference ratios.
  {
    const std::vector<double> id = {0.0096};
    const std::vector<double> ood = {0.0569};
    const double ratio = mean_ratio(id, ood);
    NoiseSweepPoint base{0.0, 0.5, 0.039, 0.053};
    NoiseSweepPoint noisy{0.1, 0.6, 0.01, 0.011};
    NoiseSweepPoint base2{0.0, 0.5, 0.01, 0.01};
    const double inflation = baseline_inflation(base).value_or(0.0);
    const double r = relative_ratio(base2, noisy, EpistemicMetric::kCSum).value_or(-1.0);
    const bool ok = std::abs(ratio - 5.927) <= 1e-3 && std::abs(inflation - 1.359) <= 1e-3 && std::abs(r - 0.5) <= 1e-12;
    out.push_back(check("reference_ratios", ok,
                        "ood/id " + format_double(ratio) + ", inflation " + format_double(inflation) + ", R_rel " +
                            format_double(r)));
  }

  return out;
}

}  // namespace epuc
