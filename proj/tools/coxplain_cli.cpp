#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "coxplain/cox.hpp"
#include "coxplain/data_io.hpp"
#include "coxplain/datagen.hpp"
#include "coxplain/explain.hpp"
#include "coxplain/harness.hpp"
#include "coxplain/rsf.hpp"

namespace {

using namespace coxplain;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

ExperimentConfig load_config(const std::string& config_path,
                             std::uint64_t seed, bool seed_set) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    config = ExperimentConfig::from_json(read_file(config_path));
  }
  if (seed_set) config.seed = seed;
  return config;
}

Dataset load_training(const std::string& data_path, const std::string& schema,
                      std::size_t* dropped) {
  if (schema == "veteran" || schema == "lung") {
    LoadResult r = load_csv(data_path,
                            schema == "veteran" ? veteran_schema() : lung_schema());
    if (dropped) *dropped = r.dropped_rows;
    return std::move(r.dataset);
  }
  if (dropped) *dropped = 0;
  return load_dataset_csv(data_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Cox surrogate explanations for survival models"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_path = ".";

  // generate -------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
  std::string gen_kind = "synthetic";
  int gen_n = 1000;
  generate->add_option("--kind", gen_kind, "synthetic | contamination");
  generate->add_option("--n", gen_n, "number of samples");
  generate->add_option("--config", config_path, "experiment config JSON");
  generate->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  generate->add_option("--out", out_path, "output CSV path")->required();

  // train ----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Fit a black-box model and save JSON");
  std::string model_family = "cox";
  std::string data_path;
  std::string schema;
  train->add_option("--model", model_family, "cox | rsf");
  train->add_option("--data", data_path, "training CSV")->required();
  train->add_option("--schema", schema, "veteran | lung (optional named schema)");
  train->add_option("--config", config_path, "experiment config JSON");
  train->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  train->add_option("--out", out_path, "output model JSON path")->required();

  // explain --------------------------------------------------------------
  auto* explain_cmd = app.add_subcommand("explain", "Explain one prediction");
  std::string model_path;
  int row = 0;
  double gamma = 1.0;
  double lambda = 1.0;
  explain_cmd->add_option("--model", model_family, "cox | rsf");
  explain_cmd->add_option("--model-file", model_path, "model JSON")->required();
  explain_cmd->add_option("--data", data_path, "training CSV (baseline source)")
      ->required();
  explain_cmd->add_option("--schema", schema, "veteran | lung");
  explain_cmd->add_option("--row", row, "index of the sample to explain");
  explain_cmd->add_option("--gamma", gamma, "band confidence parameter, 1 = off");
  explain_cmd->add_option("--lambda", lambda, "ridge strength");
  explain_cmd->add_option("--config", config_path, "experiment config JSON");
  explain_cmd->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  explain_cmd->add_option("--out", out_path, "output explanation JSON")->required();

  // experiment -----------------------------------------------------------
  auto* experiment = app.add_subcommand("experiment", "Run an experiment family");
  std::string exp_kind;
  experiment->add_option("kind", exp_kind,
                         "synthetic-cox | synthetic-rsf | contamination | sweep | real");
  experiment->add_option("--config", config_path, "experiment config JSON");
  experiment->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  experiment->add_option("--out", out_path, "output directory");

  // report ---------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Pretty-print a report JSON");
  std::string report_path;
  report_cmd->add_option("--in", report_path, "report JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      ExperimentConfig config = load_config(config_path, seed, seed_set);
      Dataset dataset =
          gen_kind == "contamination"
              ? gen_contaminated(gen_n - gen_n / 4, gen_n, config.seed)
              : gen_dataset(gen_n, std::vector<double>(config.b_true.size(), 0.0),
                            config.data_radius,
                            [&] {
                              WeibullCoxGen g;
                              g.scale = config.gen_scale;
                              g.shape = config.gen_shape;
                              g.coefficients = config.b_true;
                              g.truncation = config.gen_truncation;
                              g.censor_prob = config.gen_censor_prob;
                              g.seed = config.seed;
                              return g;
                            }());
      save_dataset_csv(dataset, out_path);
      std::cout << "wrote " << dataset.size() << " samples to " << out_path << "\n";
    } else if (*train) {
      ExperimentConfig config = load_config(config_path, seed, seed_set);
      std::size_t dropped = 0;
      Dataset dataset = load_training(data_path, schema, &dropped);
      if (dropped > 0) std::cout << "dropped " << dropped << " incomplete rows\n";
      if (model_family == "cox") {
        write_file(out_path, cox_to_json(fit_cox(dataset)));
      } else if (model_family == "rsf") {
        RsfParams params = config.rsf;
        params.seed = config.seed;
        write_file(out_path, rsf_to_json(fit_rsf(dataset, params)));
      } else {
        throw std::runtime_error("unknown model family " + model_family);
      }
      std::cout << "wrote model to " << out_path << "\n";
    } else if (*explain_cmd) {
      ExperimentConfig config = load_config(config_path, seed, seed_set);
      Dataset dataset = load_training(data_path, schema, nullptr);
      if (row < 0 || row >= static_cast<int>(dataset.size())) {
        throw std::runtime_error("--row out of range");
      }
      std::unique_ptr<BlackBox> blackbox;
      if (model_family == "cox") {
        blackbox = std::make_unique<CoxBlackBox>(cox_from_json(read_file(model_path)),
                                                 dataset);
      } else {
        blackbox = std::make_unique<RsfBlackBox>(rsf_from_json(read_file(model_path)),
                                                 dataset);
      }
      ExplainConfig ec;
      ec.n_neighbors = config.n_neighbors;
      ec.radius = config.explain_radius;
      ec.gamma = gamma;
      ec.ridge = lambda;
      ec.epsilon = config.epsilon;
      ec.seed = config.seed;
      const Explanation e =
          explain(*blackbox, dataset[static_cast<std::size_t>(row)].features, ec);
      write_file(out_path, explanation_to_json(e));
      std::cout << "wrote explanation to " << out_path << "\n";
    } else if (*experiment) {
      ExperimentConfig config = load_config(config_path, seed, seed_set);
      if (!exp_kind.empty()) config.kind = exp_kind;
      const ExperimentReport result = run_experiment(config);
      std::filesystem::create_directories(out_path);
      const std::string report_file =
          (std::filesystem::path(out_path) / "report.json").string();
      save_report(result, report_file);
      std::cout << render_report(result);
      std::cout << "wrote " << report_file << "\n";
    } else if (*report_cmd) {
      std::cout << render_report(load_report(report_path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
