#pragma once

#include <cmath>
#include <vector>

#include "epuc/core.hpp"

namespace testing {

inline epuc::SampleTensor one_input(const std::vector<std::vector<double>>& rows) {
  return epuc::validate_tensor({rows});
}

inline double nat_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

}  // namespace testing
