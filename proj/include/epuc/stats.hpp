#pragma once

#include <span>
#include <vector>

namespace epuc::stats {

double mean(std::span<const double> x);

/// Standard deviation with n - 1 in the denominator; 0 for fewer than 2 values.
double sample_std(std::span<const double> x);

/// Percentile q in [0, 1] by linear interpolation between order statistics
/// (position q (n - 1)). Throws on an empty input.
double percentile(std::span<const double> x, double q);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace epuc::stats
