// Command-line entry point: serve the HTTP API, run simulated-analyst
// learning curves, write the synthetic fixture, score stored layouts.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "semsteer/datastore.hpp"
#include "semsteer/error.hpp"
#include "semsteer/fixture.hpp"
#include "semsteer/pipeline.hpp"
#include "semsteer/server.hpp"
#include "semsteer/simulated_analyst.hpp"

// after Eigen: <resolv.h> defines a _res macro that clashes with Eigen internals
#include "httplib.h"

namespace {

void add_model_options(CLI::App& cmd, semsteer::PipelineOptions& options) {
  cmd.add_option("--steps", options.finetune.steps, "Optimizer steps per model update")->check(CLI::PositiveNumber);
  cmd.add_option("--lr", options.finetune.learning_rate, "Encoder learning rate")->check(CLI::PositiveNumber);
  cmd.add_option("--hidden", options.hidden_width, "Encoder hidden width")->check(CLI::PositiveNumber);
  cmd.add_option("--mds-max-iter", options.mds_max_iter, "SMACOF iteration cap")->check(CLI::PositiveNumber);
}

std::filesystem::path resolve_data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SEMSTEER_DATA_DIR"); env && *env) return env;
  return "data";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-interaction steering engine"};
  app.require_subcommand(1);

  semsteer::PipelineOptions model;

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  serve->add_option("--port", port, "Listen port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--data-dir", data_dir, "Directory of *.jsonl datasets (default: $SEMSTEER_DATA_DIR or ./data)");
  add_model_options(*serve, model);

  auto* simulate = app.add_subcommand("simulate", "Run the simulated analyst and write a learning curve");
  std::string dataset_path;
  std::string variant_name = "finetune";
  semsteer::SimulationOptions sim;
  std::uint64_t seed = 0;
  std::string curve_out;
  std::string layout_out;
  simulate->add_option("--dataset", dataset_path, "Dataset JSON Lines file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--variant", variant_name, "vanilla or finetune")->check(CLI::IsMember({"vanilla", "finetune"}));
  simulate->add_option("--iterations", sim.iterations, "Interaction rounds");
  simulate->add_option("--seed", seed, "Seed for projection and sampling");
  simulate->add_option("--per-class", sim.per_class, "Documents moved per class each round")->check(CLI::PositiveNumber);
  simulate->add_option("--k", sim.k, "Neighbors for kNN accuracy")->check(CLI::PositiveNumber);
  simulate->add_option("--out", curve_out, "Learning-curve CSV")->required();
  simulate->add_option("--layout-out", layout_out, "Optional CSV of the final layout");
  add_model_options(*simulate, model);

  auto* gen = app.add_subcommand("gen-fixture", "Write the synthetic 4-cluster fixture");
  std::string fixture_out;
  semsteer::FixtureOptions fixture;
  gen->add_option("--out", fixture_out, "Output JSON Lines path")->required();
  gen->add_option("--seed", fixture.seed, "Generator seed");

  auto* eval = app.add_subcommand("eval", "kNN leave-one-out accuracy of a stored layout");
  std::string eval_dataset;
  std::string eval_layout;
  std::size_t eval_k = 5;
  eval->add_option("--dataset", eval_dataset, "Dataset JSON Lines file")->required()->check(CLI::ExistingFile);
  eval->add_option("--layout", eval_layout, "Layout CSV (id,x,y)")->required()->check(CLI::ExistingFile);
  eval->add_option("--k", eval_k, "Neighbors")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      const auto dir = resolve_data_dir(data_dir);
      semsteer::Service service(semsteer::DatasetCatalog::load_directory(dir), {.pipeline = model});
      httplib::Server server;
      semsteer::register_routes(server, service);
      std::cerr << "serving " << dir << " on http://" << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return 1;
      }
    } else if (*simulate) {
      sim.pipeline = model;
      const auto dataset = std::make_shared<const semsteer::Dataset>(semsteer::load_dataset(dataset_path));
      const auto variant = semsteer::parse_variant(variant_name);
      const auto run = semsteer::simulate_session(dataset, variant, seed, sim);
      semsteer::write_curve_csv(run.curve, curve_out);
      if (!layout_out.empty()) semsteer::save_layout_csv(*dataset, run.final_state.layout, layout_out);
      std::cout << variant_name << " final accuracy " << run.curve.final_accuracy() << '\n';
    } else if (*gen) {
      semsteer::save_dataset(semsteer::make_synthetic_fixture(fixture), fixture_out);
    } else if (*eval) {
      const auto dataset = semsteer::load_dataset(eval_dataset);
      if (!dataset.has_labels()) {
        std::cerr << "error: dataset is not fully labeled\n";
        return 1;
      }
      const auto layout = semsteer::load_layout_csv(dataset, eval_layout);
      std::cout << semsteer::knn_accuracy(layout, dataset.label_indices(), eval_k) << '\n';
    }
  } catch (const semsteer::Error& e) {
    std::cerr << "error [" << semsteer::to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
