#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "epuc/errors.hpp"

namespace epuc::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kInputError = 2,
};

/// Bad command-line usage or missing inputs for a command.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Settings shared by the analysis commands. A JSON config file (--config)
/// fills these first; flags override it.
struct RunConfig {
  std::string input;
  std::vector<std::string> id_inputs;
  std::vector<std::string> ood_inputs;
  std::string manifest;
  std::vector<std::size_t> safe;
  std::vector<std::size_t> critical;
  std::size_t grid_size = 200;
  std::size_t resamples = 200;
  std::uint64_t seed = 0;
  double threshold = 0.3;
  double operating_coverage = 0.8;
  std::string risk = "critical_fnr";
  std::string aggregation = "full";
  bool pool_seeds = false;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"csv", "json"};
  unsigned threads = 1;
  double epsilon = 1e-10;  // validate only
};

struct SynthConfig {
  std::string kind = "classifier";
  std::size_t n_inputs = 100;
  std::size_t n_samples = 50;
  std::size_t n_classes = 4;
  std::uint64_t seed = 0;
  double concentration_min = 50.0;
  double concentration_max = 500.0;
  double center_concentration = 0.5;
  double floor = 0.01;
  double flatten = 0.0;
  std::vector<double> alpha;  // kind = dirichlet
  std::vector<double> theta;  // kind = dirac
  bool labels = true;
  std::string format = "jsonl";
  std::string out;
};

void cmd_score(const RunConfig& config);
void cmd_selective(const RunConfig& config);
void cmd_ood(const RunConfig& config);
void cmd_disentangle(const RunConfig& config);
/// Prints one PASS/FAIL line per check; returns kValidationFailure on any failure.
int cmd_validate(const RunConfig& config, std::ostream& out);
void cmd_synth(const SynthConfig& config);

/// Full command-line entry point. Never throws; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epuc::cli
