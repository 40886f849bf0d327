#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "epuc/core.hpp"

namespace epuc {

/// Smallest Dirichlet concentration accepted; below it Gamma draws underflow.
inline constexpr double kMinDirichletAlpha = 1e-3;

struct DiracAt {
  std::vector<double> theta;
};

struct FiniteMixture {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

struct Dirichlet {
  std::vector<double> alpha;
};

struct VertexMixture {
  std::size_t n_classes = 0;
};

/// A second-order distribution on the simplex with closed-form population moments.
class AnalyticDistribution {
 public:
  using Kind = std::variant<DiracAt, FiniteMixture, Dirichlet, VertexMixture>;

  static AnalyticDistribution dirac(std::vector<double> theta);
  static AnalyticDistribution mixture(std::vector<std::vector<double>> points, std::vector<double> weights);
  static AnalyticDistribution dirichlet(std::vector<double> alpha);
  static AnalyticDistribution vertex(std::size_t n_classes);

  const Kind& kind() const noexcept { return kind_; }
  std::size_t n_classes() const noexcept { return n_classes_; }

  /// Population moments (1/S normalisation in the limit).
  std::vector<double> mean() const;
  std::vector<double> variance() const;
  std::vector<double> third_moment() const;

  /// True when all mass sits on one point.
  bool is_point_mass() const;

  /// The support as a finite mixture. Dirichlet has none and throws DomainError.
  FiniteMixture as_mixture() const;

 private:
  explicit AnalyticDistribution(Kind kind, std::size_t n_classes) : kind_(std::move(kind)), n_classes_(n_classes) {}

  Kind kind_;
  std::size_t n_classes_;
};

/// sum_k Var_k / (2 mu_k) from population moments, no epsilon.
double analytic_eu(const AnalyticDistribution& dist);

/// S i.i.d. draws, row-major S x K. Deterministic in (seed, stream).
std::vector<double> sample(const AnalyticDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// One input per distribution; input i draws from stream i.
SampleTensor sample_tensor(std::span<const AnalyticDistribution> dists, std::size_t n_samples, std::uint64_t seed);

/// Splits every support point into point +/- spread (e_i - e_j) with half the
/// weight. Accepts point masses and finite mixtures; throws DomainError if
/// the support would leave the simplex.
AnalyticDistribution mps_transform(const AnalyticDistribution& dist, double spread, std::size_t class_i,
                                   std::size_t class_j);

/// Translates every support point by z (which must sum to 0).
AnalyticDistribution location_shift(const AnalyticDistribution& dist, std::span<const double> z);

/// Synthetic classifier: per input a mean c ~ Dirichlet(center_concentration),
/// floored towards uniform, label y ~ Categorical(c), and S posterior draws
/// from Dirichlet(a0 c') with a0 log-uniform in [concentration_min,
/// concentration_max] and c' = (1 - flatten) c + flatten / K.
struct ClassifierSpec {
  std::size_t n_inputs = 100;
  std::size_t n_samples = 50;
  std::size_t n_classes = 4;
  double concentration_min = 50.0;
  double concentration_max = 500.0;
  double center_concentration = 0.5;
  double floor = 0.01;
  double flatten = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  SampleTensor tensor;
  std::vector<std::size_t> labels;
};

SyntheticDataset synth_classifier(const ClassifierSpec& spec);

}  // namespace epuc
