#include "epuc/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epuc/errors.hpp"

namespace epuc {

SampleBlock::SampleBlock(std::span<const double> data, std::size_t n_samples, std::size_t n_classes)
    : data_(data), n_samples_(n_samples), n_classes_(n_classes) {
  if (data.size() != n_samples * n_classes) {
    throw DimensionError("sample block holds " + std::to_string(data.size()) + " values, expected " +
                         std::to_string(n_samples) + "x" + std::to_string(n_classes));
  }
}

SampleTensor SampleTensor::validate(std::vector<double> values, std::size_t n_inputs, std::size_t n_samples,
                                    std::size_t n_classes, std::vector<std::string> input_ids) {
  if (n_samples < 2) {
    throw DimensionError("need at least 2 stochastic passes per input, got " + std::to_string(n_samples));
  }
  if (n_classes < 2) {
    throw DimensionError("need at least 2 classes, got " + std::to_string(n_classes));
  }
  if (values.size() != n_inputs * n_samples * n_classes) {
    throw DimensionError("tensor holds " + std::to_string(values.size()) + " values, expected " +
                         std::to_string(n_inputs) + "x" + std::to_string(n_samples) + "x" +
                         std::to_string(n_classes));
  }
  if (!input_ids.empty() && input_ids.size() != n_inputs) {
    throw DimensionError("got " + std::to_string(input_ids.size()) + " input ids for " +
                         std::to_string(n_inputs) + " inputs");
  }

  for (std::size_t i = 0; i < n_inputs; ++i) {
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double* row = values.data() + (i * n_samples + s) * n_classes;
      double sum = 0.0;
      for (std::size_t k = 0; k < n_classes; ++k) {
        const double p = row[k];
        if (!(p >= 0.0 && p <= 1.0)) {
          std::ostringstream msg;
          msg << "probability " << p << " outside [0, 1] at input " << i << ", pass " << s << ", class " << k;
          throw SimplexError(i, s, std::nan(""), msg.str());
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kSimplexTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "row sum " << sum << " off the simplex at input " << i << ", pass " << s;
        throw SimplexError(i, s, sum, msg.str());
      }
    }
  }

  SampleTensor t;
  t.values_ = std::move(values);
  t.input_ids_ = std::move(input_ids);
  t.n_inputs_ = n_inputs;
  t.n_samples_ = n_samples;
  t.n_classes_ = n_classes;
  return t;
}

SampleBlock SampleTensor::block(std::size_t input) const {
  if (input >= n_inputs_) {
    throw DimensionError("input index " + std::to_string(input) + " out of range for " +
                         std::to_string(n_inputs_) + " inputs");
  }
  const std::size_t stride = n_samples_ * n_classes_;
  return SampleBlock(std::span<const double>(values_).subspan(input * stride, stride), n_samples_, n_classes_);
}

std::string SampleTensor::id(std::size_t input) const {
  return input_ids_.empty() ? std::to_string(input) : input_ids_.at(input);
}

SampleTensor validate_tensor(const std::vector<std::vector<std::vector<double>>>& raw,
                             std::vector<std::string> input_ids) {
  const std::size_t n = raw.size();
  const std::size_t s = n == 0 ? 2 : raw.front().size();
  const std::size_t k = (n == 0 || s == 0) ? 2 : raw.front().front().size();
  std::vector<double> flat;
  flat.reserve(n * s * k);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].size() != s) {
      throw DimensionError("input " + std::to_string(i) + " has " + std::to_string(raw[i].size()) +
                           " passes, expected " + std::to_string(s));
    }
    for (std::size_t p = 0; p < s; ++p) {
      if (raw[i][p].size() != k) {
        throw DimensionError("input " + std::to_string(i) + ", pass " + std::to_string(p) + " has " +
                             std::to_string(raw[i][p].size()) + " classes, expected " + std::to_string(k));
      }
      flat.insert(flat.end(), raw[i][p].begin(), raw[i][p].end());
    }
  }
  return SampleTensor::validate(std::move(flat), n, s, k, std::move(input_ids));
}

std::vector<double> mean_vector(const SampleBlock& block) {
  const std::size_t S = block.n_samples();
  const std::size_t K = block.n_classes();
  std::vector<double> mean(K, 0.0);
  // Shifted by the first pass so constant columns come back bit-exact.
  for (std::size_t k = 0; k < K; ++k) {
    const double anchor = block.at(0, k);
    double acc = 0.0;
    for (std::size_t s = 1; s < S; ++s) acc += block.at(s, k) - anchor;
    mean[k] = anchor + acc / static_cast<double>(S);
  }
  return mean;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

std::vector<std::size_t> predicted_labels(const SampleTensor& tensor) {
  std::vector<std::size_t> out(tensor.n_inputs());
  for (std::size_t i = 0; i < tensor.n_inputs(); ++i) out[i] = argmax(mean_vector(tensor.block(i)));
  return out;
}

LabelSet LabelSet::from(const SampleTensor& tensor, std::vector<std::size_t> true_labels) {
  if (true_labels.size() != tensor.n_inputs()) {
    throw DimensionError("got " + std::to_string(true_labels.size()) + " labels for " +
                         std::to_string(tensor.n_inputs()) + " inputs");
  }
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    if (true_labels[i] >= tensor.n_classes()) {
      throw LabelError("label " + std::to_string(true_labels[i]) + " of input " + std::to_string(i) +
                       " outside [0, " + std::to_string(tensor.n_classes()) + ")");
    }
  }
  LabelSet set;
  set.true_ = std::move(true_labels);
  set.predicted_ = epuc::predicted_labels(tensor);
  return set;
}

ClassPartition ClassPartition::make(std::vector<std::size_t> safe, std::vector<std::size_t> critical,
                                    std::size_t n_classes) {
  auto normalise = [n_classes](std::vector<std::size_t>& set, const char* name) {
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
      throw LabelError(std::string(name) + " set lists a class twice");
    }
    if (!set.empty() && set.back() >= n_classes) {
      throw LabelError(std::string(name) + " class " + std::to_string(set.back()) + " outside [0, " +
                       std::to_string(n_classes) + ")");
    }
  };
  normalise(safe, "safe");
  normalise(critical, "critical");
  for (std::size_t k : safe) {
    if (std::binary_search(critical.begin(), critical.end(), k)) {
      throw LabelError("class " + std::to_string(k) + " is both safe and critical");
    }
  }
  ClassPartition p;
  p.safe_ = std::move(safe);
  p.critical_ = std::move(critical);
  p.n_classes_ = n_classes;
  return p;
}

bool ClassPartition::is_safe(std::size_t k) const { return std::binary_search(safe_.begin(), safe_.end(), k); }

bool ClassPartition::is_critical(std::size_t k) const {
  return std::binary_search(critical_.begin(), critical_.end(), k);
}

void ClassPartition::require_critical() const {
  if (critical_.empty()) throw LabelError("a critical-class policy was requested but the critical set is empty");
}

}  // namespace epuc
