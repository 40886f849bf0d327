#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "epuc/random.hpp"
#include "epuc/selective.hpp"
#include "epuc/stats.hpp"

using namespace epuc;
using doctest::Approx;

namespace {

// Five inputs; input 0 is the only miss and has the largest score.
struct FiveInputs {
  std::vector<std::size_t> y = {2, 2, 0, 0, 0};
  std::vector<std::size_t> yhat = {0, 2, 0, 0, 0};
  std::vector<double> scores = {0.9, 0.1, 0.2, 0.3, 0.4};
  ClassPartition partition = ClassPartition::make({0, 1}, {2}, 3);
};

std::size_t grid_index(const RiskCurve& c, double coverage) {
  for (std::size_t g = 0; g < c.coverage.size(); ++g) {
    if (std::abs(c.coverage[g] - coverage) < 1e-12) return g;
  }
  FAIL("coverage not on grid");
  return 0;
}

}  // namespace

TEST_CASE("coverage grid and kept counts") {
  const auto grid = coverage_grid(200);
  CHECK(grid.size() == 200);
  CHECK(grid.front() == 0.005);
  CHECK(grid.back() == 1.0);
  CHECK(kept_count(1, 200, 5) == 1);
  CHECK(kept_count(160, 200, 5) == 4);
  CHECK(kept_count(200, 200, 5) == 5);
  CHECK(kept_count(7, 10, 10) == 7);
  CHECK(kept_count(161, 200, 5) == 5);
}

TEST_CASE("deferral order is stable ascending") {
  CHECK(deferral_order(std::vector<double>{0.3, 0.1, 0.2}) == std::vector<std::size_t>{1, 2, 0});
  CHECK(deferral_order(std::vector<double>{0.5, 0.5, 0.5}) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(deferral_order(std::vector<double>{0.5, NAN}), DomainError);
}

TEST_CASE("hand-enumerated five-input curve") {
  FiveInputs f;
  const auto curve = risk_curve(deferral_order(f.scores), f.y, f.yhat, f.partition, 200);
  const auto at80 = grid_index(curve, 0.8);
  CHECK(curve.kept_total[at80] == 4);
  CHECK(curve.kept_critical[at80] == 1);
  CHECK(curve.critical_fnr[at80] == 0.0);
  CHECK(curve.accuracy[at80] == 1.0);
  CHECK(curve.macro_f1[at80] == Approx((1.0 + 0.0 + 1.0) / 3.0));

  const auto at100 = grid_index(curve, 1.0);
  CHECK(curve.kept_total[at100] == 5);
  CHECK(curve.critical_fnr[at100] == 0.5);
  CHECK(curve.critical_err[at100] == 0.5);
  CHECK(curve.error_rate[at100] == Approx(0.2));
  // class 0: tp 3, fp 1, fn 0; class 1 absent; class 2: tp 1, fn 1.
  CHECK(curve.macro_f1[at100] == Approx((6.0 / 7.0 + 0.0 + 2.0 / 3.0) / 3.0));

  // Kept set {1}: one critical, hit.
  CHECK(curve.critical_fnr[0] == 0.0);
  CHECK(curve.kept_total[0] == 1);
}

TEST_CASE("perfect classifier has zero critical FNR everywhere") {
  const std::vector<std::size_t> y = {0, 1, 2, 2, 1, 0};
  const auto p = ClassPartition::make({0}, {1, 2}, 3);
  const auto curve = risk_curve(deferral_order(std::vector<double>{6, 5, 4, 3, 2, 1}), y, y, p, 50);
  for (double v : curve.critical_fnr) CHECK(v == 0.0);
  CHECK(ausc(curve) == 0.0);
}

TEST_CASE("no critical inputs kept gives zero, not NaN") {
  const std::vector<std::size_t> y = {0, 0, 1};
  const std::vector<std::size_t> yhat = {0, 1, 0};
  const auto p = ClassPartition::make({0}, {1}, 2);
  const auto curve = risk_curve(std::vector<std::size_t>{0, 1, 2}, y, yhat, p, 3);
  CHECK(curve.critical_fnr[0] == 0.0);
  CHECK(curve.critical_fnr[2] == 1.0);
}

TEST_CASE("AUSC of constant and linear risks") {
  RiskCurve c;
  c.coverage = coverage_grid(200);
  c.critical_fnr.assign(200, 0.37);
  CHECK(ausc(c) == Approx(0.37 * 0.995).epsilon(1e-12));
  c.critical_fnr.assign(200, 0.0);
  CHECK(ausc(c) == 0.0);

  // Linear risk r(c) = c; the trapezoid rule is exact, compare to a Riemann oracle.
  c.critical_fnr = c.coverage;
  const std::size_t n = 1000000;
  double oracle = 0.0;
  const double a = 0.005, b = 1.0, h = (b - a) / n;
  for (std::size_t i = 0; i < n; ++i) oracle += (a + (i + 0.5) * h) * h;
  CHECK(ausc(c) == Approx(oracle).epsilon(1e-9));
}

TEST_CASE("AUSC and curve are invariant under monotone score transforms") {
  Rng rng(11);
  const std::size_t N = 300;
  std::vector<std::size_t> y(N), yhat(N);
  std::vector<double> s(N), t(N);
  for (std::size_t i = 0; i < N; ++i) {
    y[i] = rng.below(4);
    yhat[i] = rng.uniform() < 0.7 ? y[i] : rng.below(4);
    s[i] = rng.uniform();
    t[i] = std::exp(3.0 * s[i]) - 7.0;
  }
  const auto p = ClassPartition::make({0, 1}, {2, 3}, 4);
  const auto a = risk_curve(deferral_order(s), y, yhat, p);
  const auto b = risk_curve(deferral_order(t), y, yhat, p);
  CHECK(a.critical_fnr == b.critical_fnr);
  CHECK(ausc(a) == ausc(b));
}

TEST_CASE("coarse and fine grids agree") {
  Rng rng(5);
  const std::size_t N = 400;
  std::vector<std::size_t> y(N), yhat(N);
  std::vector<double> s(N);
  for (std::size_t i = 0; i < N; ++i) {
    y[i] = rng.below(3);
    const bool wrong = rng.uniform() < 0.2;
    yhat[i] = wrong ? (y[i] + 1) % 3 : y[i];
    s[i] = (wrong ? 0.5 : 0.0) + rng.uniform();
  }
  const auto p = ClassPartition::make({0}, {1, 2}, 3);
  const auto order = deferral_order(s);
  const double coarse = ausc(risk_curve(order, y, yhat, p, 200));
  const double fine = ausc(risk_curve(order, y, yhat, p, 10000));
  // The coarse grid starts at 0.005, the fine one at 1e-4; compare over the same span.
  const auto fine_curve = risk_curve(order, y, yhat, p, 10000);
  std::vector<double> x, r;
  for (std::size_t g = 0; g < fine_curve.coverage.size(); ++g) {
    if (fine_curve.coverage[g] >= 0.005 - 1e-15) {
      x.push_back(fine_curve.coverage[g]);
      r.push_back(fine_curve.critical_fnr[g]);
    }
  }
  CHECK(std::abs(coarse - trapezoid(x, r)) < 2e-3);
  CHECK(fine >= 0.0);
}

TEST_CASE("value at coverage picks the nearest level") {
  RiskCurve c;
  c.coverage = coverage_grid(4);
  c.critical_fnr = {0.1, 0.2, 0.3, 0.4};
  CHECK(value_at_coverage(c, RiskField::kCriticalFnr, 0.5) == 0.2);
  CHECK(value_at_coverage(c, RiskField::kCriticalFnr, 0.375) == 0.1);
  CHECK(value_at_coverage(c, RiskField::kCriticalFnr, 0.9) == 0.4);
}

TEST_CASE("risk field names") {
  CHECK(parse_risk_field("macro_f1") == RiskField::kMacroF1);
  CHECK(risk_field_name(RiskField::kCriticalErr) == "critical_err");
  CHECK_FALSE(parse_risk_field("bogus").has_value());
}

namespace {

struct BootstrapFixture {
  std::vector<std::size_t> y, yhat;
  std::vector<PolicyInput> policies;
  ClassPartition partition = ClassPartition::make({0, 1}, {2, 3}, 4);

  explicit BootstrapFixture(std::size_t N) {
    Rng rng(3);
    y.resize(N);
    yhat.resize(N);
    PolicyInput good{"good", {}}, noise{"noise", {}}, copy{"copy", {}};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rng.below(4);
      const bool wrong = rng.uniform() < 0.3;
      yhat[i] = wrong ? (y[i] + 2) % 4 : y[i];
      good.scores.push_back((wrong ? 1.0 : 0.0) + rng.uniform());
      noise.scores.push_back(rng.uniform());
    }
    copy.scores = good.scores;
    copy.name = "copy";
    policies = {good, noise, copy};
  }
};

}  // namespace

TEST_CASE("bootstrap is deterministic and thread independent") {
  BootstrapFixture f(250);
  BootstrapOptions o;
  o.n_resamples = 64;
  o.seed = 17;
  const auto a = bootstrap(f.policies, f.y, f.yhat, f.partition, o);
  const auto b = bootstrap(f.policies, f.y, f.yhat, f.partition, o);
  o.threads = 4;
  const auto c = bootstrap(f.policies, f.y, f.yhat, f.partition, o);
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(a.policies[p].ausc_samples == b.policies[p].ausc_samples);
    CHECK(a.policies[p].ausc_samples == c.policies[p].ausc_samples);
  }
  CHECK(a.win_matrix == c.win_matrix);
}

TEST_CASE("bootstrap summary properties") {
  BootstrapFixture f(250);
  BootstrapOptions o;
  o.n_resamples = 100;
  o.seed = 1;
  const auto s = bootstrap(f.policies, f.y, f.yhat, f.partition, o);
  REQUIRE(s.policies.size() == 3);
  const auto& good = s.policies[0];
  CHECK(good.ausc_samples.size() == 100);
  CHECK(good.ausc_mean == Approx(stats::mean(good.ausc_samples)));
  CHECK(good.ausc_std == Approx(stats::sample_std(good.ausc_samples)));
  CHECK(good.ausc_ci_low <= good.ausc_ci_high);
  CHECK(good.ausc_ci_low == Approx(stats::percentile(good.ausc_samples, 0.025)));
  CHECK(good.ausc_ci_high == Approx(stats::percentile(good.ausc_samples, 0.975)));

  // Identical scores tie in every replicate.
  CHECK(s.win(0, 2) == 0.5);
  CHECK(s.win(2, 0) == 0.5);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.win(i, i) == 0.5);
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.win(i, j) + s.win(j, i) == Approx(1.0));
  }
  // The informative policy beats random scores.
  CHECK(s.win(0, 1) > 0.9);
  double best = 0.0;
  for (const auto& p : s.policies) best += p.best_fraction;
  CHECK(best == Approx(1.0));
  CHECK(s.policies[0].best_fraction == Approx(s.policies[2].best_fraction));
}

TEST_CASE("degenerate bootstrap is defined") {
  const std::vector<std::size_t> y = {1}, yhat = {0};
  const auto p = ClassPartition::make({0}, {1}, 2);
  std::vector<PolicyInput> policies = {{"a", {0.5}}};
  BootstrapOptions o;
  o.n_resamples = 1;
  const auto s = bootstrap(policies, y, yhat, p, o);
  CHECK(s.policies[0].ausc_std == 0.0);
  CHECK(s.policies[0].ausc_samples.size() == 1);
}

namespace {

UncertaintyReport fake_report(std::vector<double> c, std::vector<double> rho = {}) {
  UncertaintyReport r;
  const std::size_t K = c.size();
  r.c_vector = std::move(c);
  r.rho = rho.empty() ? std::vector<double>(K, 0.0) : std::move(rho);
  r.moments.n_classes = K;
  r.moments.correlation.assign(K * K, 0.0);
  return r;
}

}  // namespace

TEST_CASE("epistemic profiles") {
  std::vector<UncertaintyReport> reports = {fake_report({0.1, 0.3}), fake_report({0.0, 0.0})};
  const std::vector<std::size_t> y = {0, 1};
  const auto m = epistemic_profiles(reports, y, 2);
  CHECK(m.present[0]);
  CHECK(m.at(0, 0) == Approx(0.25));
  CHECK(m.at(0, 1) == Approx(0.75));
  CHECK_FALSE(m.present[1]);
  CHECK(m.counts[1] == 0);
}

TEST_CASE("error signatures") {
  std::vector<UncertaintyReport> reports = {fake_report({0.1, 0.2}), fake_report({0.3, 0.4}),
                                            fake_report({0.5, 0.0})};
  const std::vector<std::size_t> y = {0, 0, 1}, yhat = {1, 1, 1};
  const auto s = error_signatures(reports, y, yhat, 2);
  CHECK(s.present(0, 1));
  CHECK(s.signature(0, 1)[0] == Approx(0.2));
  CHECK(s.signature(0, 1)[1] == Approx(0.3));
  CHECK(s.present(1, 1));
  CHECK(s.signature(1, 1)[0] == Approx(0.5));
  CHECK_FALSE(s.present(0, 0));
  CHECK_FALSE(s.present(1, 0));
}

TEST_CASE("epistemic confusion") {
  auto r = fake_report({0.02, 0.03});
  r.moments.correlation = {1, -1, -1, 1};
  std::vector<UncertaintyReport> reports = {r};
  const auto e = epistemic_confusion(reports, 2);
  CHECK(e.at(0, 1) == Approx(std::sqrt(0.0006)).epsilon(1e-12));
  CHECK(e.at(1, 0) == Approx(std::sqrt(0.0006)).epsilon(1e-12));
  CHECK(e.at(0, 0) == 0.0);

  reports[0].moments.correlation = {1, 0.2, 0.2, 1};
  const auto z = epistemic_confusion(reports, 2);
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("reliability summary") {
  std::vector<UncertaintyReport> reports;
  for (double rho : {0.1, 0.2, 0.4, 0.8}) reports.push_back(fake_report({0.1, 0.1}, {rho, 0.0}));
  const std::vector<std::size_t> y = {0, 0, 0, 0};
  const auto s = reliability_summary(reports, y, 2);
  CHECK(s.rows[0].present);
  CHECK(s.rows[0].median == Approx(0.3));
  CHECK(s.rows[0].fraction_reliable == Approx(0.5));
  CHECK(s.rows[0].mean == Approx(0.375));
  CHECK_FALSE(s.rows[1].present);
  CHECK(s.fraction_all_reliable == Approx(0.5));

  std::vector<UncertaintyReport> flat(3, fake_report({0.1, 0.1}));
  const auto all = reliability_summary(flat, {}, 2);
  CHECK_FALSE(all.by_true_class);
  CHECK(all.rows[1].present);
  CHECK(all.rows[1].median == 0.0);
  CHECK(all.rows[1].fraction_reliable == 1.0);
}
