// Pipeline driver: synth / extract / basis / assemble / fit / eval / test /
// trajectory subcommands over a JSON run config.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orb/errors.hpp"
#include "orb/pipeline.hpp"
#include "orb/version.hpp"

namespace {

void print_summary(const std::string& stage, const orb::StageSummary& summary) {
  std::cout << stage << ":";
  for (const auto& [key, value] : summary.counts) std::cout << " " << key << "=" << value;
  std::cout << "\n";
  for (const auto& out : summary.outputs) std::cout << "  wrote " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ORB convective-structure pipeline"};
  app.set_version_flag("--version", std::string(orb::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  int jobs_override = 0;
  app.add_option("--config,-c", config_path, "run config JSON")->required();
  app.add_option("--jobs,-j", jobs_override, "override worker count");

  std::string storm_id, statistic = "SIZE";
  auto* synth = app.add_subcommand("synth", "generate synthetic inputs");
  auto* extract = app.add_subcommand("extract", "compute ORB function files per stamp");
  auto* basis = app.add_subcommand("basis", "fit EOF bases and project coefficients");
  auto* assemble = app.add_subcommand("assemble", "build the labeled 6-hourly dataset");
  auto* fit = app.add_subcommand("fit", "train the logistic lasso classifier");
  auto* eval = app.add_subcommand("eval", "evaluate the fitted model on the test split");
  auto* test = app.add_subcommand("test", "permutation tests of AUC differences");
  auto* trajectory = app.add_subcommand("trajectory", "phase-space CSV for one storm");
  trajectory->add_option("--storm", storm_id, "storm id")->required();
  trajectory->add_option("--statistic", statistic, "ORB statistic (default SIZE)");

  CLI11_PARSE(app, argc, argv);

  try {
    orb::RunConfig config = orb::load_config(config_path);
    if (jobs_override > 0) config.jobs = jobs_override;

    if (synth->parsed()) print_summary("synth", orb::run_synth(config));
    if (extract->parsed()) print_summary("extract", orb::run_extract(config));
    if (basis->parsed()) print_summary("basis", orb::run_basis(config));
    if (assemble->parsed()) print_summary("assemble", orb::run_assemble(config));
    if (fit->parsed()) print_summary("fit", orb::run_fit(config));
    if (eval->parsed()) print_summary("eval", orb::run_eval(config));
    if (test->parsed()) print_summary("test", orb::run_test(config));
    if (trajectory->parsed())
      print_summary("trajectory", orb::run_trajectory(config, storm_id, statistic));
    return 0;
  } catch (const orb::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const orb::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
