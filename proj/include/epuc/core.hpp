#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epuc/errors.hpp"

namespace epuc {

/// Absolute tolerance on the sum of every probability row.
inline constexpr double kSimplexTolerance = 1e-6;

/// Read-only view of the S x K probability vectors produced for one input.
class SampleBlock {
 public:
  SampleBlock(std::span<const double> data, std::size_t n_samples, std::size_t n_classes);

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Probability vector of stochastic pass `s`.
  std::span<const double> pass(std::size_t s) const {
    return data_.subspan(s * n_classes_, n_classes_);
  }
  double at(std::size_t s, std::size_t k) const { return data_[s * n_classes_ + k]; }

 private:
  std::span<const double> data_;
  std::size_t n_samples_;
  std::size_t n_classes_;
};

/// N inputs x S stochastic passes x K class probabilities, input-major.
///
/// Only constructible through validate(), so every instance satisfies:
/// probabilities in [0, 1], row sums within kSimplexTolerance of 1,
/// S >= 2 and K >= 2. Rows are never renormalised.
class SampleTensor {
 public:
  static SampleTensor validate(std::vector<double> values, std::size_t n_inputs, std::size_t n_samples,
                               std::size_t n_classes, std::vector<std::string> input_ids = {});

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_classes() const noexcept { return n_classes_; }

  SampleBlock block(std::size_t input) const;
  double at(std::size_t input, std::size_t pass, std::size_t k) const {
    return values_[(input * n_samples_ + pass) * n_classes_ + k];
  }
  std::span<const double> values() const noexcept { return values_; }

  bool has_ids() const noexcept { return !input_ids_.empty(); }
  const std::vector<std::string>& input_ids() const noexcept { return input_ids_; }
  /// Identifier of input i; the decimal index when no ids were supplied.
  std::string id(std::size_t input) const;

 private:
  SampleTensor() = default;

  std::vector<double> values_;
  std::vector<std::string> input_ids_;
  std::size_t n_inputs_ = 0;
  std::size_t n_samples_ = 0;
  std::size_t n_classes_ = 0;
};

/// Validates a nested [N][S][K] array. Ragged nesting is a DimensionError.
SampleTensor validate_tensor(const std::vector<std::vector<std::vector<double>>>& raw,
                             std::vector<std::string> input_ids = {});

/// Monte Carlo mean over passes. Columns whose samples are all equal
/// return that value exactly.
std::vector<double> mean_vector(const SampleBlock& block);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// argmax of the mean prediction, per input.
std::vector<std::size_t> predicted_labels(const SampleTensor& tensor);

/// True labels plus predictions recomputed from the tensor mean.
class LabelSet {
 public:
  static LabelSet from(const SampleTensor& tensor, std::vector<std::size_t> true_labels);

  std::size_t size() const noexcept { return true_.size(); }
  const std::vector<std::size_t>& true_labels() const noexcept { return true_; }
  const std::vector<std::size_t>& predicted_labels() const noexcept { return predicted_; }

 private:
  std::vector<std::size_t> true_;
  std::vector<std::size_t> predicted_;
};

/// Disjoint safe / critical class sets. Their union may leave classes out.
class ClassPartition {
 public:
  static ClassPartition make(std::vector<std::size_t> safe, std::vector<std::size_t> critical,
                             std::size_t n_classes);

  const std::vector<std::size_t>& safe() const noexcept { return safe_; }
  const std::vector<std::size_t>& critical() const noexcept { return critical_; }
  std::size_t n_classes() const noexcept { return n_classes_; }

  bool is_safe(std::size_t k) const;
  bool is_critical(std::size_t k) const;

  /// Throws LabelError when the critical set is empty.
  void require_critical() const;

 private:
  std::vector<std::size_t> safe_;
  std::vector<std::size_t> critical_;
  std::size_t n_classes_ = 0;
};

}  // namespace epuc
