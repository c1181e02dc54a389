// nctheta: batch driver for classification, quantum theta construction and
// functional-equation verification.
//
// Exit codes: 0 all assertions hold, 1 config or usage error (nothing is
// written), 2 an assertion failed or a degenerate translation was met.

#include "nctheta/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace nctheta;

  CLI::App app{"Quantum theta functions on noncommutative tori"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  const std::pair<const char*, Stage> stages[] = {
      {"classify", Stage::Classify}, {"theta", Stage::Theta}, {"verify", Stage::Verify}, {"all", Stage::All}};
  const char* help[] = {"classify the complex structure and build the theta vector",
                        "compute the truncated quantum theta element",
                        "verify functional equation, cocycle law and additivity", "run every stage"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(stages[i].first, help[i]);
    sub->add_option("--config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "report directory")->required();
    sub->add_option("--seed", seed, "override the config seed");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Stage stage = Stage::All;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) stage = stages[i].second;
  }

  RunConfig cfg = [&] {
    try {
      return load_config(config_path);
    } catch (const Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      std::exit(1);
    }
  }();
  if (seed) cfg.seed = *seed;

  RunOutcome outcome;
  try {
    outcome = run_pipeline(cfg, stage);
  } catch (const Error& e) {
    // Anything the config admitted but the numerics rejected counts as a failed run.
    outcome.failures.push_back({std::string(to_string(e.code())), e.what()});
    outcome.exit_code = 2;
  }

  try {
    write_reports(outcome, stage, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write reports: " << e.what() << "\n";
    return 1;
  }
  for (const auto& f : outcome.failures) std::cerr << "FAIL " << f.reason << ": " << f.detail << "\n";
  std::cout << to_string(stage) << ": " << (outcome.exit_code == 0 ? "pass" : "fail") << "\n";
  return outcome.exit_code;
}
