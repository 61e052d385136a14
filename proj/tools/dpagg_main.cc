// Copyright 2026 The dpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run the release pipeline, certify a noise table,
// generate synthetic inputs, or replay the worked bounding example.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpagg/accountant.h"
#include "dpagg/ingest.h"
#include "dpagg/pipeline.h"
#include "dpagg/synthetic.h"
#include "dpagg/worked_example.h"

namespace {

int Fail(const absl::Status& status) {
  std::cerr << "dpagg: " << status.message() << "\n";
  return dpagg::ExitCodeFor(status);
}

absl::StatusOr<dpagg::DropPolicy> ParsePolicy(const std::string& order,
                                              const std::string& preference) {
  dpagg::DropPolicy policy;
  std::vector<std::string> names;
  std::string current;
  for (char c : order + ",") {
    if (c == ',') {
      names.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (names.size() != dpagg::kNumConstraints) {
    return absl::InvalidArgumentError("--drop-order needs four constraints");
  }
  for (size_t i = 0; i < names.size(); ++i) {
    bool found = false;
    for (size_t c = 0; c < dpagg::kNumConstraints; ++c) {
      const auto constraint = static_cast<dpagg::Constraint>(c);
      if (dpagg::ConstraintName(constraint) == names[i]) {
        policy.order[i] = constraint;
        found = true;
      }
    }
    if (!found) {
      return absl::InvalidArgumentError("unknown constraint '" + names[i] + "'");
    }
  }
  if (preference == "smallest") {
    policy.type_preference = dpagg::TypePreference::kSmallest;
  } else if (preference == "largest") {
    policy.type_preference = dpagg::TypePreference::kLargest;
  } else if (preference == "earliest") {
    policy.type_preference = dpagg::TypePreference::kEarliest;
  } else {
    return absl::InvalidArgumentError("unknown type preference '" + preference + "'");
  }
  if (absl::Status status = policy.Validate(); !status.ok()) return status;
  return policy;
}

struct RunFlags {
  dpagg::PipelineConfig config;
  std::optional<uint64_t> seed;
  std::string window_start = "2021-01-04";
  std::string window_end = "2021-05-31";
  std::string drop_order = "X1,X2,X3,X4";
  std::string type_preference = "smallest";
  std::string report_path;
};

int RunCommand(RunFlags& flags) {
  dpagg::PipelineConfig& config = flags.config;
  config.seed = flags.seed;
  auto first = dpagg::ParseDate(flags.window_start);
  auto last = dpagg::ParseDate(flags.window_end);
  if (!first.ok()) return Fail(first.status());
  if (!last.ok()) return Fail(last.status());
  config.sparsity.window_first_monday = dpagg::WeekOf(*first).monday;
  config.sparsity.window_last_monday = dpagg::WeekOf(*last).monday;
  auto policy = ParsePolicy(flags.drop_order, flags.type_preference);
  if (!policy.ok()) return Fail(policy.status());
  config.drop_policy = *policy;

  auto output = dpagg::Run(config);
  if (!output.ok()) return Fail(output.status());
  const std::string report = output->report.ToJson();
  if (!flags.report_path.empty()) {
    FILE* file = std::fopen(flags.report_path.c_str(), "w");
    if (file == nullptr) {
      return Fail(absl::PermissionDeniedError("cannot write " + flags.report_path));
    }
    std::fputs((report + "\n").c_str(), file);
    std::fclose(file);
  } else {
    std::cerr << report << "\n";
  }
  if (config.output_path.empty()) std::cout << output->csv;
  return 0;
}

int CertifyCommand(const std::string& sigma_table_path, double sigma_scale,
                   double delta) {
  dpagg::SigmaTable sigmas = dpagg::SigmaTable::Default();
  if (!sigma_table_path.empty()) {
    auto loaded = dpagg::SigmaTable::LoadCsv(sigma_table_path);
    if (!loaded.ok()) return Fail(loaded.status());
    sigmas = *std::move(loaded);
  }
  if (!(sigma_scale >= 0.0)) {
    return Fail(absl::InvalidArgumentError("sigma scale must be >= 0"));
  }
  auto certificate = dpagg::Certify(sigmas.Scaled(sigma_scale), delta);
  if (!certificate.ok()) return Fail(certificate.status());
  std::cout << dpagg::CertificateToJson(*certificate, 2) << "\n";
  return 0;
}

struct GenerateFlags {
  dpagg::SyntheticRegistryParams registry;
  dpagg::SyntheticCorpusParams corpus;
  std::string first_day = "2021-01-04";
  std::string registry_path;
  std::string events_path;
};

int GenerateCommand(GenerateFlags& flags) {
  auto first_day = dpagg::ParseDate(flags.first_day);
  if (!first_day.ok()) return Fail(first_day.status());
  flags.corpus.first_day = *first_day;
  auto registry = dpagg::GenerateSyntheticRegistry(flags.registry);
  if (!registry.ok()) return Fail(registry.status());
  auto events = dpagg::GenerateSyntheticEvents(*registry, flags.corpus);
  if (!events.ok()) return Fail(events.status());
  FILE* file = std::fopen(flags.registry_path.c_str(), "w");
  if (file == nullptr) {
    return Fail(absl::PermissionDeniedError("cannot write " + flags.registry_path));
  }
  std::fputs(registry->ToCsv().c_str(), file);
  std::fclose(file);
  if (absl::Status status = dpagg::WriteEventsCsv(flags.events_path, *events);
      !status.ok()) {
    return Fail(status);
  }
  std::cerr << "wrote " << registry->size() << " regions and " << events->size()
            << " events\n";
  return 0;
}

int CheckExampleCommand() {
  const dpagg::WorkedExampleReplay replay = dpagg::ReplayWorkedExample();
  std::cout << dpagg::FormatWorkedExample(replay);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private weekly search-count release pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");

  RunFlags run;
  dpagg::PipelineConfig& config = run.config;
  CLI::App* run_cmd = app.add_subcommand("run", "Bound, noise, filter and emit");
  run_cmd->add_option("--registry", config.registry_path, "Region registry CSV")
      ->required();
  run_cmd->add_option("--events", config.events_path, "Search events CSV")
      ->required();
  run_cmd->add_option("--sigma-table", config.sigma_table_path,
                      "Noise scale CSV; defaults to the production scales");
  run_cmd->add_option("--output", config.output_path,
                      "Release CSV; stdout when omitted");
  run_cmd->add_option("--seed", run.seed, "Master noise seed");
  run_cmd->add_flag("--secure-rng", config.secure_rng,
                    "Draw noise from the OS entropy source (not reproducible)");
  run_cmd->add_option("--delta", config.delta, "Target delta")
      ->capture_default_str();
  run_cmd->add_option("--sigma-scale", config.sigma_scale,
                      "Multiplier on every sigma; 0 disables noise")
      ->capture_default_str();
  run_cmd->add_option("--confidence", config.reliability.confidence,
                      "Reliability interval confidence")
      ->capture_default_str();
  run_cmd->add_option("--tolerance", config.reliability.relative_tolerance,
                      "Reliability relative tolerance")
      ->capture_default_str();
  run_cmd->add_option("--window-start", run.window_start,
                      "First day of the sparsity window")
      ->capture_default_str();
  run_cmd->add_option("--window-end", run.window_end,
                      "Last day of the sparsity window")
      ->capture_default_str();
  run_cmd->add_option("--sparsity-threshold", config.sparsity.max_sparse_points,
                      "Regions with this many points or fewer are dropped")
      ->capture_default_str();
  run_cmd->add_option("--drop-order", run.drop_order,
                      "Constraint resolution order")
      ->capture_default_str();
  run_cmd->add_option("--type-preference", run.type_preference,
                      "Region type kept on conflicts: smallest|largest|earliest")
      ->capture_default_str();
  run_cmd->add_flag("--absent-as-zero", config.absent_as_zero,
                    "Treat missing category cells as zero");
  run_cmd->add_flag("--noise-empty-cells", config.noise_empty_cells,
                    "Also release noised zeros for unobserved keys");
  run_cmd->add_flag("--strict", config.strict,
                    "Fail when more than 1% of event lines are malformed");
  run_cmd->add_option("--scaling-state", config.scaling_state_path,
                      "Persisted scaling factor (read if present, else written)");
  run_cmd->add_option("--release-id", config.release_id,
                      "Identifier recorded with a newly fixed scaling factor")
      ->capture_default_str();
  run_cmd->add_option("--national-region", config.national_region,
                      "Country whose series fixes the scaling factor");
  run_cmd->add_option("--report", run.report_path,
                      "Write the run report JSON here instead of stderr");
  run_cmd->callback([&] { throw CLI::RuntimeError(RunCommand(run)); });

  std::string sigma_table_path;
  double sigma_scale = 1.0;
  double delta = 1e-5;
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "Print the privacy guarantee of a noise table");
  certify_cmd->add_option("--sigma-table", sigma_table_path, "Noise scale CSV");
  certify_cmd->add_option("--sigma-scale", sigma_scale, "Multiplier on every sigma")
      ->capture_default_str();
  certify_cmd->add_option("--delta", delta, "Target delta")->capture_default_str();
  certify_cmd->callback([&] {
    throw CLI::RuntimeError(CertifyCommand(sigma_table_path, sigma_scale, delta));
  });

  GenerateFlags generate;
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "Write a synthetic registry and event log");
  generate_cmd->add_option("--registry", generate.registry_path, "Registry CSV out")
      ->required();
  generate_cmd->add_option("--events", generate.events_path, "Events CSV out")
      ->required();
  generate_cmd->add_option("--states", generate.registry.states)->capture_default_str();
  generate_cmd->add_option("--counties-per-state", generate.registry.counties_per_state)
      ->capture_default_str();
  generate_cmd
      ->add_option("--postal-per-county", generate.registry.postal_codes_per_county)
      ->capture_default_str();
  generate_cmd->add_option("--weeks", generate.corpus.weeks)->capture_default_str();
  generate_cmd->add_option("--first-day", generate.first_day)->capture_default_str();
  generate_cmd->add_option("--users-per-capita", generate.corpus.users_per_capita)
      ->capture_default_str();
  generate_cmd->add_option("--travel-rate", generate.corpus.travel_rate)
      ->capture_default_str();
  generate_cmd->add_option("--seed", generate.corpus.seed)->capture_default_str();
  generate_cmd->callback([&] { throw CLI::RuntimeError(GenerateCommand(generate)); });

  CLI::App* example_cmd = app.add_subcommand(
      "check-example", "Replay the three-search bounding example");
  example_cmd->callback([&] { throw CLI::RuntimeError(CheckExampleCommand()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::RuntimeError& done) {
    return done.get_exit_code();
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }
  return 0;
}
