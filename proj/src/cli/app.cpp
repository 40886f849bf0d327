#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "epuc/cli/app.hpp"

namespace epuc::cli {
namespace {

using Json = nlohmann::json;

template <typename T>
void take(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

// Keys mirror the long flag names with '-' replaced by '_'.
void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("config file is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("config file must hold a JSON object", 0);
  try {
    take(j, "input", c.input);
    take(j, "id", c.id_inputs);
    take(j, "ood", c.ood_inputs);
    take(j, "manifest", c.manifest);
    take(j, "safe", c.safe);
    take(j, "critical", c.critical);
    take(j, "grid", c.grid_size);
    take(j, "resamples", c.resamples);
    take(j, "seed", c.seed);
    take(j, "threshold", c.threshold);
    take(j, "operating_coverage", c.operating_coverage);
    take(j, "risk", c.risk);
    take(j, "aggregation", c.aggregation);
    take(j, "pool", c.pool_seeds);
    take(j, "out", c.out_dir);
    take(j, "format", c.formats);
    take(j, "threads", c.threads);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what(), 0);
  }
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

void add_common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--config", "JSON file with default settings; flags override it");
  cmd->add_option("--out", c.out_dir, "Output directory");
  cmd->add_option("--format", c.formats, "Output formats: csv, json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->delimiter(',');
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

void add_partition(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--safe", c.safe, "Safe class indices")->delimiter(',');
  cmd->add_option("--critical", c.critical, "Critical class indices")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  SynthConfig synth;

  CLI::App app{"Epistemic uncertainty scoring for sampled class-probability vectors"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* score = app.add_subcommand("score", "Per-input uncertainty scores and deferral policies");
  score->add_option("--input", config.input, "Sample file (JSONL or binary)");
  add_partition(score, config);
  score->add_option("--threshold", config.threshold, "Reliability threshold on rho");
  add_common(score, config);

  auto* selective = app.add_subcommand("selective", "Risk-coverage curves, AUSC and paired bootstrap");
  selective->add_option("--input", config.input, "Labelled sample file");
  add_partition(selective, config);
  selective->add_option("--grid", config.grid_size, "Coverage grid size")->check(CLI::PositiveNumber);
  selective->add_option("--resamples", config.resamples, "Bootstrap resamples");
  selective->add_option("--seed", config.seed, "Bootstrap seed");
  selective->add_option("--risk", config.risk, "Risk used for the bootstrap")
      ->check(CLI::IsMember({"critical_fnr", "critical_err", "error_rate", "accuracy", "macro_f1"}));
  selective->add_option("--operating-coverage", config.operating_coverage, "Coverage for the operating point")
      ->check(CLI::Range(0.0, 1.0));
  selective->add_option("--threshold", config.threshold, "Reliability threshold on rho");
  add_common(selective, config);

  auto* ood = app.add_subcommand("ood", "In- vs out-of-distribution separation");
  ood->add_option("--id", config.id_inputs, "In-distribution sample file (repeat per seed)");
  ood->add_option("--ood", config.ood_inputs, "Out-of-distribution sample file (repeat per seed)");
  ood->add_flag("--pool", config.pool_seeds, "Pool seeds instead of averaging per-seed metrics");
  add_common(ood, config);

  auto* disentangle = app.add_subcommand("disentangle", "Label-noise sweep ratios");
  disentangle->add_option("--manifest", config.manifest, "JSON list of {alpha, path}");
  disentangle->add_option("--aggregation", config.aggregation, "C sum: full, weighted or top:<k>");
  add_common(disentangle, config);

  auto* validate = app.add_subcommand("validate", "Run the built-in numerical checks");
  validate->add_option("--seed", config.seed, "Seed for the random checks (0 = built-in default)");
  validate->add_option("--epsilon", config.epsilon)->group("");
  add_common(validate, config);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic sample file");
  synth_cmd->add_option("--kind", synth.kind, "classifier, dirichlet, vertex or dirac")
      ->check(CLI::IsMember({"classifier", "dirichlet", "vertex", "dirac"}));
  synth_cmd->add_option("--inputs", synth.n_inputs, "Number of inputs")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--samples", synth.n_samples, "Samples per input");
  synth_cmd->add_option("--classes", synth.n_classes, "Number of classes");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--concentration-min", synth.concentration_min, "Smallest posterior concentration");
  synth_cmd->add_option("--concentration-max", synth.concentration_max, "Largest posterior concentration");
  synth_cmd->add_option("--center-concentration", synth.center_concentration, "Dirichlet parameter of class centers");
  synth_cmd->add_option("--floor", synth.floor, "Minimum center probability");
  synth_cmd->add_option("--flatten", synth.flatten, "Blend centers toward uniform")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--alpha", synth.alpha, "Dirichlet parameters")->delimiter(',');
  synth_cmd->add_option("--theta", synth.theta, "Point-mass location")->delimiter(',');
  synth_cmd->add_flag("!--no-labels", synth.labels, "Omit labels (classifier kind)");
  synth_cmd->add_option("--format", synth.format, "jsonl or binary")->check(CLI::IsMember({"jsonl", "binary"}));
  synth_cmd->add_option("--out", synth.out, "Output file")->required();

  try {
    const auto config_path = find_config_path(args);
    if (!config_path.empty()) apply_config_file(config_path, config);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kSuccess;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        // Subcommand help.
        for (auto* sub : app.get_subcommands()) out << sub->help();
        return kSuccess;
      }
      err << "error: " << e.what() << '\n';
      return kInputError;
    }

    if (*score) cmd_score(config);
    if (*selective) cmd_selective(config);
    if (*ood) cmd_ood(config);
    if (*disentangle) cmd_disentangle(config);
    if (*synth_cmd) cmd_synth(synth);
    if (*validate) return cmd_validate(config, out);
    return kSuccess;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace epuc::cli
