// Command-line front end; talks to the library exclusively through the C API.
#include <cstdio>

#include "CLI11.hpp"

#include "hqnn.h"

namespace {

int finish(hqnn_status status) {
  if (status != HQNN_OK) {
    std::fprintf(stderr, "error: %s\n", hqnn_last_error());
  }
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid quantum-classical network trainer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string results_dir;
  std::string out_dir;
  int n_per_class = 100;
  int image_size = 32;
  unsigned long long seed = 7;

  CLI::App* train = app.add_subcommand("train", "run one training round from a JSON config");
  train->add_option("--config", config_path, "config file path")->required();

  CLI::App* experiment =
      app.add_subcommand("experiment", "run the multi-round classical-vs-hybrid comparison");
  experiment->add_option("--config", config_path, "config file path")->required();

  CLI::App* report =
      app.add_subcommand("report", "rebuild the comparison report from persisted run files");
  report->add_option("--dir", results_dir, "experiment output directory")->required();

  CLI::App* synth = app.add_subcommand("synth-data", "write a synthetic PNG dataset");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--n", n_per_class, "images per class");
  synth->add_option("--size", image_size, "image side length");
  synth->add_option("--seed", seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(HQNN_ERROR_CONFIG);
  }

  if (train->parsed()) return finish(hqnn_train(config_path.c_str()));
  if (experiment->parsed()) return finish(hqnn_experiment(config_path.c_str()));
  if (report->parsed()) return finish(hqnn_report(results_dir.c_str()));
  return finish(hqnn_synth_data(out_dir.c_str(), n_per_class, image_size, seed));
}
