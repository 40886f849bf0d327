#include "epuc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epuc/errors.hpp"
#include "epuc/random.hpp"

namespace epuc {
namespace {

constexpr double kSupportTolerance = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_on_simplex(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -kSupportTolerance && v <= 1.0 + kSupportTolerance)) {
      throw DomainError(std::string(what) + ": support point leaves the simplex");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSupportTolerance) throw DomainError(std::string(what) + ": support point does not sum to 1");
}

std::vector<double> dirichlet_draw(Rng& rng, std::span<const double> alpha) {
  std::vector<double> g(alpha.size());
  double total = 0.0;
  do {
    total = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      g[k] = rng.gamma(alpha[k]);
      total += g[k];
    }
  } while (!(total > 0.0));
  for (double& v : g) v /= total;
  return g;
}

}  // namespace

AnalyticDistribution AnalyticDistribution::dirac(std::vector<double> theta) {
  if (theta.size() < 2) throw DimensionError("distribution needs at least 2 classes");
  check_on_simplex(theta, "DiracAt");
  const std::size_t K = theta.size();
  return AnalyticDistribution(DiracAt{std::move(theta)}, K);
}

AnalyticDistribution AnalyticDistribution::mixture(std::vector<std::vector<double>> points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw DimensionError("mixture needs one weight per support point");
  }
  const std::size_t K = points.front().size();
  if (K < 2) throw DimensionError("distribution needs at least 2 classes");
  double wsum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != K) throw DimensionError("mixture support points differ in length");
    check_on_simplex(points[i], "FiniteMixture");
    if (!(weights[i] >= 0.0)) throw DomainError("mixture weights must be nonnegative");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > kSupportTolerance) throw DomainError("mixture weights must sum to 1");
  return AnalyticDistribution(FiniteMixture{std::move(points), std::move(weights)}, K);
}

AnalyticDistribution AnalyticDistribution::dirichlet(std::vector<double> alpha) {
  if (alpha.size() < 2) throw DimensionError("distribution needs at least 2 classes");
  for (double a : alpha) {
    if (!std::isfinite(a) || a < kMinDirichletAlpha) {
      throw DomainError("Dirichlet concentrations must be finite and >= " + std::to_string(kMinDirichletAlpha));
    }
  }
  const std::size_t K = alpha.size();
  return AnalyticDistribution(Dirichlet{std::move(alpha)}, K);
}

AnalyticDistribution AnalyticDistribution::vertex(std::size_t n_classes) {
  if (n_classes < 2) throw DimensionError("distribution needs at least 2 classes");
  return AnalyticDistribution(VertexMixture{n_classes}, n_classes);
}

FiniteMixture AnalyticDistribution::as_mixture() const {
  return std::visit(overloaded{
                        [](const DiracAt& d) { return FiniteMixture{{d.theta}, {1.0}}; },
                        [](const FiniteMixture& m) { return m; },
                        [](const Dirichlet&) -> FiniteMixture {
                          throw DomainError("a Dirichlet distribution has no finite support");
                        },
                        [](const VertexMixture& v) {
                          FiniteMixture m;
                          for (std::size_t y = 0; y < v.n_classes; ++y) {
                            std::vector<double> e(v.n_classes, 0.0);
                            e[y] = 1.0;
                            m.points.push_back(std::move(e));
                            m.weights.push_back(1.0 / static_cast<double>(v.n_classes));
                          }
                          return m;
                        },
                    },
                    kind_);
}

std::vector<double> AnalyticDistribution::mean() const {
  if (const auto* d = std::get_if<Dirichlet>(&kind_)) {
    const double a0 = std::accumulate(d->alpha.begin(), d->alpha.end(), 0.0);
    std::vector<double> mu(n_classes_);
    for (std::size_t k = 0; k < n_classes_; ++k) mu[k] = d->alpha[k] / a0;
    return mu;
  }
  if (const auto* v = std::get_if<VertexMixture>(&kind_)) {
    return std::vector<double>(v->n_classes, 1.0 / static_cast<double>(v->n_classes));
  }
  const auto m = as_mixture();
  std::vector<double> mu(n_classes_, 0.0);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    for (std::size_t k = 0; k < n_classes_; ++k) mu[k] += m.weights[i] * m.points[i][k];
  }
  return mu;
}

std::vector<double> AnalyticDistribution::variance() const {
  if (const auto* d = std::get_if<Dirichlet>(&kind_)) {
    const double a0 = std::accumulate(d->alpha.begin(), d->alpha.end(), 0.0);
    std::vector<double> var(n_classes_);
    for (std::size_t k = 0; k < n_classes_; ++k) var[k] = d->alpha[k] * (a0 - d->alpha[k]) / (a0 * a0 * (a0 + 1.0));
    return var;
  }
  if (const auto* v = std::get_if<VertexMixture>(&kind_)) {
    const double K = static_cast<double>(v->n_classes);
    return std::vector<double>(v->n_classes, (K - 1.0) / (K * K));
  }
  if (std::holds_alternative<DiracAt>(kind_)) return std::vector<double>(n_classes_, 0.0);
  const auto m = as_mixture();
  const auto mu = mean();
  std::vector<double> var(n_classes_, 0.0);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    for (std::size_t k = 0; k < n_classes_; ++k) {
      const double d = m.points[i][k] - mu[k];
      var[k] += m.weights[i] * d * d;
    }
  }
  return var;
}

std::vector<double> AnalyticDistribution::third_moment() const {
  if (const auto* d = std::get_if<Dirichlet>(&kind_)) {
    // Marginal Beta(a, b): 2ab(b - a) / ((a+b)^3 (a+b+1) (a+b+2)).
    const double a0 = std::accumulate(d->alpha.begin(), d->alpha.end(), 0.0);
    std::vector<double> m3(n_classes_);
    for (std::size_t k = 0; k < n_classes_; ++k) {
      const double a = d->alpha[k];
      const double b = a0 - a;
      m3[k] = 2.0 * a * b * (b - a) / (a0 * a0 * a0 * (a0 + 1.0) * (a0 + 2.0));
    }
    return m3;
  }
  if (const auto* v = std::get_if<VertexMixture>(&kind_)) {
    const double K = static_cast<double>(v->n_classes);
    return std::vector<double>(v->n_classes, (K - 1.0) * (K - 2.0) / (K * K * K));
  }
  if (std::holds_alternative<DiracAt>(kind_)) return std::vector<double>(n_classes_, 0.0);
  const auto m = as_mixture();
  const auto mu = mean();
  std::vector<double> m3(n_classes_, 0.0);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    for (std::size_t k = 0; k < n_classes_; ++k) {
      const double d = m.points[i][k] - mu[k];
      m3[k] += m.weights[i] * d * d * d;
    }
  }
  return m3;
}

bool AnalyticDistribution::is_point_mass() const {
  if (std::holds_alternative<DiracAt>(kind_)) return true;
  if (const auto* m = std::get_if<FiniteMixture>(&kind_)) {
    const std::vector<double>* first = nullptr;
    for (std::size_t i = 0; i < m->points.size(); ++i) {
      if (m->weights[i] == 0.0) continue;
      if (first == nullptr) {
        first = &m->points[i];
      } else if (m->points[i] != *first) {
        return false;
      }
    }
    return true;
  }
  return false;
}

double analytic_eu(const AnalyticDistribution& dist) {
  const auto mu = dist.mean();
  const auto var = dist.variance();
  double eu = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (var[k] > 0.0) eu += 0.5 * var[k] / mu[k];
  }
  return eu;
}

std::vector<double> sample(const AnalyticDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                           std::uint64_t stream) {
  const std::size_t K = dist.n_classes();
  Rng rng(seed, stream);
  std::vector<double> out;
  out.reserve(n_samples * K);
  std::visit(overloaded{
                 [&](const DiracAt& d) {
                   for (std::size_t s = 0; s < n_samples; ++s) out.insert(out.end(), d.theta.begin(), d.theta.end());
                 },
                 [&](const FiniteMixture& m) {
                   for (std::size_t s = 0; s < n_samples; ++s) {
                     const double u = rng.uniform();
                     double acc = 0.0;
                     std::size_t pick = m.points.size() - 1;
                     for (std::size_t i = 0; i < m.points.size(); ++i) {
                       acc += m.weights[i];
                       if (u < acc) {
                         pick = i;
                         break;
                       }
                     }
                     out.insert(out.end(), m.points[pick].begin(), m.points[pick].end());
                   }
                 },
                 [&](const Dirichlet& d) {
                   for (std::size_t s = 0; s < n_samples; ++s) {
                     const auto p = dirichlet_draw(rng, d.alpha);
                     out.insert(out.end(), p.begin(), p.end());
                   }
                 },
                 [&](const VertexMixture& v) {
                   for (std::size_t s = 0; s < n_samples; ++s) {
                     const auto y = rng.below(v.n_classes);
                     for (std::size_t k = 0; k < K; ++k) out.push_back(k == y ? 1.0 : 0.0);
                   }
                 },
             },
             dist.kind());
  return out;
}

SampleTensor sample_tensor(std::span<const AnalyticDistribution> dists, std::size_t n_samples, std::uint64_t seed) {
  if (dists.empty()) return SampleTensor::validate({}, 0, n_samples, 2);
  const std::size_t K = dists.front().n_classes();
  std::vector<double> values;
  values.reserve(dists.size() * n_samples * K);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].n_classes() != K) throw DimensionError("distributions differ in class count");
    const auto draws = sample(dists[i], n_samples, seed, i);
    values.insert(values.end(), draws.begin(), draws.end());
  }
  return SampleTensor::validate(std::move(values), dists.size(), n_samples, K);
}

AnalyticDistribution mps_transform(const AnalyticDistribution& dist, double spread, std::size_t class_i,
                                   std::size_t class_j) {
  const std::size_t K = dist.n_classes();
  if (class_i >= K || class_j >= K || class_i == class_j) throw DomainError("spread needs two distinct classes");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw DomainError("spread must be finite and nonnegative");
  if (std::holds_alternative<Dirichlet>(dist.kind())) throw DomainError("mean-preserving spread needs finite support");
  if (spread == 0.0) return dist;

  const auto base = dist.as_mixture();
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  for (std::size_t i = 0; i < base.points.size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      auto p = base.points[i];
      p[class_i] += sign * spread;
      p[class_j] -= sign * spread;
      if (p[class_i] < 0.0 || p[class_i] > 1.0 || p[class_j] < 0.0 || p[class_j] > 1.0) {
        throw DomainError("spread moves the support off the simplex");
      }
      points.push_back(std::move(p));
      weights.push_back(0.5 * base.weights[i]);
    }
  }
  return AnalyticDistribution::mixture(std::move(points), std::move(weights));
}

AnalyticDistribution location_shift(const AnalyticDistribution& dist, std::span<const double> z) {
  const std::size_t K = dist.n_classes();
  if (z.size() != K) throw DimensionError("shift vector has the wrong length");
  if (std::abs(std::accumulate(z.begin(), z.end(), 0.0)) > 1e-12) throw DomainError("shift vector must sum to 0");
  if (std::holds_alternative<Dirichlet>(dist.kind())) throw DomainError("location shift needs finite support");
  if (std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; })) return dist;

  auto m = dist.as_mixture();
  for (auto& p : m.points) {
    for (std::size_t k = 0; k < K; ++k) {
      p[k] += z[k];
      if (p[k] < 0.0 || p[k] > 1.0) throw DomainError("shift moves the support off the simplex");
    }
  }
  return AnalyticDistribution::mixture(std::move(m.points), std::move(m.weights));
}

SyntheticDataset synth_classifier(const ClassifierSpec& spec) {
  const std::size_t K = spec.n_classes;
  if (K < 2 || spec.n_samples < 2) throw DimensionError("synthetic classifier needs K >= 2 and S >= 2");
  if (!(spec.concentration_min > 0.0 && spec.concentration_max >= spec.concentration_min)) {
    throw DomainError("concentration range must be positive and ordered");
  }
  if (!(spec.flatten >= 0.0 && spec.flatten <= 1.0)) throw DomainError("flatten must lie in [0, 1]");
  if (!(spec.floor >= 0.0) || !(spec.center_concentration >= kMinDirichletAlpha)) {
    throw DomainError("floor must be nonnegative and center concentration >= the Dirichlet minimum");
  }

  const std::vector<double> center_alpha(K, spec.center_concentration);
  std::vector<double> values;
  values.reserve(spec.n_inputs * spec.n_samples * K);
  std::vector<std::size_t> labels(spec.n_inputs);
  const double log_lo = std::log(spec.concentration_min);
  const double log_hi = std::log(spec.concentration_max);

  for (std::size_t i = 0; i < spec.n_inputs; ++i) {
    Rng rng(spec.seed, i);
    auto center = dirichlet_draw(rng, center_alpha);
    for (double& c : center) c = (c + spec.floor) / (1.0 + static_cast<double>(K) * spec.floor);

    const double u = rng.uniform();
    double acc = 0.0;
    labels[i] = K - 1;
    for (std::size_t k = 0; k < K; ++k) {
      acc += center[k];
      if (u < acc) {
        labels[i] = k;
        break;
      }
    }

    const double a0 = std::exp(log_lo + rng.uniform() * (log_hi - log_lo));
    std::vector<double> alpha(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double c = (1.0 - spec.flatten) * center[k] + spec.flatten / static_cast<double>(K);
      alpha[k] = std::max(a0 * c, kMinDirichletAlpha);
    }
    for (std::size_t s = 0; s < spec.n_samples; ++s) {
      const auto p = dirichlet_draw(rng, alpha);
      values.insert(values.end(), p.begin(), p.end());
    }
  }
  return SyntheticDataset{SampleTensor::validate(std::move(values), spec.n_inputs, spec.n_samples, K),
                          std::move(labels)};
}

}  // namespace epuc
