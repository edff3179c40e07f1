#include "coxplain/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace coxplain {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> default_lambda_grid(const std::string& family) {
  const double hi = family == "rsf" ? 1e6 : 1e4;
  const double lo = 1e-1;
  const int points = 13;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo)));
  }
  return grid;
}

WeibullCoxGen generator_from(const ExperimentConfig& c, std::uint64_t seed) {
  WeibullCoxGen gen;
  gen.scale = c.gen_scale;
  gen.shape = c.gen_shape;
  gen.coefficients = c.b_true;
  gen.truncation = c.gen_truncation;
  gen.censor_prob = c.gen_censor_prob;
  gen.seed = seed;
  return gen;
}


std::unique_ptr<BlackBox> train_blackbox(const std::string& family,
                                         const Dataset& training,
                                         const ExperimentConfig& config,
                                         std::uint64_t seed) {
  if (family == "cox") {
    CoxFitOptions options;
    options.epsilon = config.epsilon;
    return std::make_unique<CoxBlackBox>(fit_cox(training, options), training);
  }
  if (family == "rsf") {
    RsfParams params = config.rsf;
    params.seed = seed;
    return std::make_unique<RsfBlackBox>(fit_rsf(training, params, config.epsilon),
                                         training);
  }
  throw std::invalid_argument("train_blackbox: unknown family " + family);
}

double lambda_for_family(const ExperimentConfig& config,
                         const std::string& family) {
  return family == "rsf" ? config.lambda_explain_rsf
                         : config.lambda_explain_cox;
}

ExplainConfig explain_config_from(const ExperimentConfig& config,
                                  std::uint64_t seed, double ridge) {
  ExplainConfig ec;
  ec.n_neighbors = config.n_neighbors;
  ec.radius = config.explain_radius;
  ec.ridge = ridge;
  ec.epsilon = config.epsilon;
  ec.seed = seed;
  return ec;
}

void append_sf_figure(ExperimentReport& report, const std::string& figure,
                      const Explanation& e) {
  std::vector<SfPoint> pts;
  const StepFunction model_sf = chf_to_sf(e.blackbox_chf);
  const StepFunction approx_sf = chf_to_sf(e.approx_chf);
  const auto& grid = *e.blackbox_chf.grid();
  for (std::size_t j = 0; j < grid.interval_count(); ++j) {
    pts.push_back({grid.time(j), model_sf.values[j], "model"});
  }
  for (std::size_t j = 0; j < grid.interval_count(); ++j) {
    pts.push_back({grid.time(j), approx_sf.values[j], "approx"});
  }
  report.curves.emplace_back(figure, std::move(pts));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct PreparedData {
  Dataset large;
  Dataset small;
  std::vector<std::vector<double>> test_points;
  std::size_t dropped_rows = 0;
};

PreparedData prepare_three_condition_data(const ExperimentConfig& config) {
  PreparedData out;
  if (config.kind == "real") {
    const auto schema = config.schema == "veteran" ? veteran_schema()
                       : config.schema == "lung"  ? lung_schema()
                                                  : std::vector<ColumnSpec>{};
    if (schema.empty()) {
      throw std::invalid_argument("real experiment needs schema veteran|lung");
    }
    LoadResult loaded = load_csv(config.dataset_path, schema);
    out.dropped_rows = loaded.dropped_rows;
    Dataset full = std::move(loaded.dataset);
    if (config.standardize) {
      full = Standardizer::fit(full).apply(full);
    }
    const int large_n = std::min<int>(config.large_n, static_cast<int>(full.size()));
    out.large = sample_subset(full, large_n, derive_seed(config.seed, 10));
    Rng rng(derive_seed(config.seed, 12));
    for (int i = 0; i < config.test_n; ++i) {
      const auto row = rng.uniform_index(full.size());
      out.test_points.push_back(full[row].features);
    }
  } else {
    const auto gen = generator_from(config, derive_seed(config.seed, 10));
    const std::vector<double> center(config.b_true.size(), 0.0);
    out.large = gen_dataset(config.large_n, center, config.data_radius, gen);
    Rng rng(derive_seed(config.seed, 12));
    auto pts = sample_sphere(center, config.data_radius, config.test_n, rng);
    out.test_points.assign(pts.begin(), pts.end());
  }
  out.small = sample_subset(out.large, config.small_n, derive_seed(config.seed, 11));
  return out;
}

}  // namespace

Standardizer Standardizer::fit(const Dataset& dataset) {
  const std::size_t d = dataset.dim();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.sigma.assign(d, 1.0);
  if (dataset.size() == 0) return s;
  for (const auto& sample : dataset.samples()) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += sample.features[j];
  }
  for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(dataset.size());
  std::vector<double> var(d, 0.0);
  for (const auto& sample : dataset.samples()) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = sample.features[j] - s.mean[j];
      var[j] += diff * diff;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(dataset.size()));
    s.sigma[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& dataset) const {
  std::vector<SurvivalSample> samples = dataset.samples();
  for (auto& sample : samples) {
    for (std::size_t j = 0; j < sample.features.size(); ++j) {
      sample.features[j] = (sample.features[j] - mean[j]) / sigma[j];
    }
  }
  return Dataset(std::move(samples), dataset.feature_names());
}

std::vector<double> Standardizer::apply_point(const std::vector<double>& x) const {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / sigma[j];
  return out;
}

std::vector<double> Standardizer::destandardize_coefficients(
    const std::vector<double>& b) const {
  std::vector<double> out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) out[j] = b[j] / sigma[j];
  return out;
}

Dataset sample_subset(const Dataset& dataset, int count, std::uint64_t seed) {
  if (count > static_cast<int>(dataset.size())) {
    throw std::invalid_argument("sample_subset: subset larger than dataset");
  }
  std::vector<int> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int t = 0; t < count; ++t) {
    const auto pick =
        t + static_cast<int>(rng.uniform_index(idx.size() - static_cast<std::size_t>(t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
  }
  std::vector<SurvivalSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    samples.push_back(dataset[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])]);
  }
  return Dataset(std::move(samples), dataset.feature_names());
}

ExperimentReport run_three_condition(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  PreparedData data = prepare_three_condition_data(config);

  std::vector<std::string> families;
  if (config.kind == "synthetic-cox") families = {"cox"};
  else if (config.kind == "synthetic-rsf") families = {"rsf"};
  else if (config.kind == "real") families = {"cox", "rsf"};
  else throw std::invalid_argument("run_three_condition: bad kind " + config.kind);

  ExperimentReport report;
  report.kind = config.kind;
  report.seed = config.seed;
  report.config_echo = config.to_json();
  report.dropped_rows = data.dropped_rows;
  report.rows.resize(data.test_points.size());
  const bool prefix_family = families.size() > 1;

  for (const auto& family : families) {
    const auto m_large = train_blackbox(family, data.large, config,
                                        derive_seed(config.seed, 13));
    const auto m_small = train_blackbox(family, data.small, config,
                                        derive_seed(config.seed, 14));
    const double gamma_e3 =
        family == "rsf" ? config.gamma_e3_rsf : config.gamma_e3_cox;
    const double lambda = lambda_for_family(config, family);
    const std::string prefix = prefix_family ? family + "_" : "";

    std::vector<double> e1s, e2s, e3s;
    for (std::size_t i = 0; i < data.test_points.size(); ++i) {
      const auto& x = data.test_points[i];
      const auto cfg_large =
          explain_config_from(config, derive_seed(config.seed, 100 + i), lambda);
      const auto cfg_small =
          explain_config_from(config, derive_seed(config.seed, 200 + i), lambda);
      const Neighborhood nb_large = build_neighborhood(*m_large, x, cfg_large);
      const Neighborhood nb_small = build_neighborhood(*m_small, x, cfg_small);

      const Explanation e1 =
          explain_neighborhood(nb_large, x, 1.0, lambda, cfg_large);
      const Explanation e2 =
          explain_neighborhood(nb_small, x, 1.0, lambda, cfg_small);
      Explanation e3 =
          explain_neighborhood(nb_small, x, gamma_e3, lambda, cfg_small);
      if (config.best_gamma_mode) {
        for (const double g : config.gamma_grid) {
          if (g >= 1.0 || g == gamma_e3) continue;
          Explanation trial =
              explain_neighborhood(nb_small, x, g, lambda, cfg_small);
          if (trial.rse_at_x < e3.rse_at_x) e3 = std::move(trial);
        }
      }

      auto& row = report.rows[i];
      row.label = std::to_string(i);
      row.metrics[prefix + "E1"] = e1.rse_at_x;
      row.metrics[prefix + "E2"] = e2.rse_at_x;
      row.metrics[prefix + "E3"] = e3.rse_at_x;
      e1s.push_back(e1.rse_at_x);
      e2s.push_back(e2.rse_at_x);
      e3s.push_back(e3.rse_at_x);

      if (i == 0) {
        append_sf_figure(report, prefix + "sf_e1", e1);
        append_sf_figure(report, prefix + "sf_e2", e2);
        append_sf_figure(report, prefix + "sf_e3", e3);
      }
    }
    ReportRow aggregate;
    aggregate.label = prefix.empty() ? "MRSE" : prefix + "MRSE";
    aggregate.metrics[prefix + "E1"] = mean_of(e1s);
    aggregate.metrics[prefix + "E2"] = mean_of(e2s);
    aggregate.metrics[prefix + "E3"] = mean_of(e3s);
    report.aggregates.push_back(std::move(aggregate));
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport run_contamination(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.kind = config.kind;
  report.seed = config.seed;
  report.config_echo = config.to_json();

  const std::vector<double> cluster_center(5, 2.0);
  Rng test_rng(derive_seed(config.seed, 30));
  const auto test_points =
      sample_sphere(cluster_center, 1.0, config.contam_test_n, test_rng);

  const std::vector<std::pair<std::string, int>> sizes = {
      {"large", config.contam_large_n}, {"small", config.contam_small_n}};

  for (std::size_t size_idx = 0; size_idx < sizes.size(); ++size_idx) {
    const auto& [size_name, n] = sizes[size_idx];
    const std::uint64_t data_seed = derive_seed(config.seed, 40 + size_idx);
    const Dataset clean = gen_contaminated(n, n, data_seed);
    const Dataset contaminated = gen_contaminated(n - n / 4, n, data_seed);

    for (const auto& family : config.families) {
      const auto m_clean = train_blackbox(family, clean, config,
                                          derive_seed(config.seed, 50 + size_idx));
      const auto m_cont = train_blackbox(family, contaminated, config,
                                         derive_seed(config.seed, 60 + size_idx));

      const double lambda = lambda_for_family(config, family);
      std::vector<double> s1, s2, s3, s4;
      for (std::size_t i = 0; i < test_points.size(); ++i) {
        const auto& x = test_points[i];
        const std::uint64_t tag = 1000 * (size_idx + 1) + 2 * i;
        const auto cfg_clean =
            explain_config_from(config, derive_seed(config.seed, tag), lambda);
        const auto cfg_cont =
            explain_config_from(config, derive_seed(config.seed, tag + 1), lambda);
        const Neighborhood nb_clean = build_neighborhood(*m_clean, x, cfg_clean);
        const Neighborhood nb_cont = build_neighborhood(*m_cont, x, cfg_cont);

        const Explanation c1 =
            explain_neighborhood(nb_clean, x, 1.0, lambda, cfg_clean);
        const Explanation c2 = explain_neighborhood(
            nb_clean, x, config.contam_gamma, lambda, cfg_clean);
        const Explanation c3 =
            explain_neighborhood(nb_cont, x, 1.0, lambda, cfg_cont);
        const Explanation c4 = explain_neighborhood(
            nb_cont, x, config.contam_gamma, lambda, cfg_cont);
        s1.push_back(c1.rse_at_x);
        s2.push_back(c2.rse_at_x);
        s3.push_back(c3.rse_at_x);
        s4.push_back(c4.rse_at_x);

        if (i == 0 && size_name == "large") {
          append_sf_figure(report, family + "_sf_case1", c1);
          append_sf_figure(report, family + "_sf_case2", c2);
          append_sf_figure(report, family + "_sf_case3", c3);
          append_sf_figure(report, family + "_sf_case4", c4);
        }
      }
      ReportRow row;
      row.label = size_name + "/" + family;
      row.metrics["S1"] = mean_of(s1);
      row.metrics["S2"] = mean_of(s2);
      row.metrics["S3"] = mean_of(s3);
      row.metrics["S4"] = mean_of(s4);
      report.aggregates.push_back(row);
      report.rows.push_back(std::move(row));
    }
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport run_sweep(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig base = config;
  base.kind = config.sweep_model == "rsf" ? "synthetic-rsf" : "synthetic-cox";
  PreparedData data = prepare_three_condition_data(base);
  const Dataset& training = config.sweep_size == "small" ? data.small : data.large;

  const auto model = train_blackbox(config.sweep_model, training, config,
                                    derive_seed(config.seed, 13));
  const std::vector<double> lambdas = config.lambda_grid.empty()
                                          ? default_lambda_grid(config.sweep_model)
                                          : config.lambda_grid;

  ExperimentReport report;
  report.kind = "sweep-" + config.sweep_model + "-" + config.sweep_size;
  report.seed = config.seed;
  report.config_echo = config.to_json();

  std::vector<Neighborhood> neighborhoods;
  std::vector<ExplainConfig> cfgs;
  for (std::size_t i = 0; i < data.test_points.size(); ++i) {
    cfgs.push_back(explain_config_from(
        config, derive_seed(config.seed, 100 + i),
        lambda_for_family(config, config.sweep_model)));
    neighborhoods.push_back(
        build_neighborhood(*model, data.test_points[i], cfgs.back()));
  }

  for (const double gamma : config.gamma_grid) {
    for (const double lambda : lambdas) {
      std::vector<double> rses;
      for (std::size_t i = 0; i < neighborhoods.size(); ++i) {
        const Explanation e = explain_neighborhood(
            neighborhoods[i], data.test_points[i], gamma, lambda, cfgs[i]);
        rses.push_back(e.rse_at_x);
      }
      report.sweep.push_back(SweepPoint{gamma, lambda, mean_of(rses)});
    }
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.kind == "synthetic-cox" || config.kind == "synthetic-rsf" ||
      config.kind == "real") {
    return run_three_condition(config);
  }
  if (config.kind == "contamination") return run_contamination(config);
  if (config.kind == "sweep") return run_sweep(config);
  throw std::invalid_argument("run_experiment: unknown kind " + config.kind);
}

std::string ExperimentConfig::to_json() const {
  json doc;
  doc["kind"] = kind;
  doc["seed"] = seed;
  doc["large_n"] = large_n;
  doc["small_n"] = small_n;
  doc["test_n"] = test_n;
  doc["contam_large_n"] = contam_large_n;
  doc["contam_small_n"] = contam_small_n;
  doc["contam_test_n"] = contam_test_n;
  doc["families"] = families;
  doc["contam_gamma"] = contam_gamma;
  doc["gamma_grid"] = gamma_grid;
  doc["lambda_grid"] = lambda_grid;
  doc["lambda_explain_cox"] = lambda_explain_cox;
  doc["lambda_explain_rsf"] = lambda_explain_rsf;
  doc["gamma_e3_cox"] = gamma_e3_cox;
  doc["gamma_e3_rsf"] = gamma_e3_rsf;
  doc["best_gamma_mode"] = best_gamma_mode;
  doc["sweep_model"] = sweep_model;
  doc["sweep_size"] = sweep_size;
  doc["b_true"] = b_true;
  doc["gen_scale"] = gen_scale;
  doc["gen_shape"] = gen_shape;
  doc["gen_truncation"] = gen_truncation;
  doc["gen_censor_prob"] = gen_censor_prob;
  doc["data_radius"] = data_radius;
  doc["dataset_path"] = dataset_path;
  doc["schema"] = schema;
  doc["standardize"] = standardize;
  doc["n_neighbors"] = n_neighbors;
  doc["explain_radius"] = explain_radius;
  doc["epsilon"] = epsilon;
  doc["rsf"] = {{"n_trees", rsf.n_trees},
                {"min_leaf_size", rsf.min_leaf_size},
                {"features_per_split", rsf.features_per_split},
                {"bootstrap", rsf.bootstrap}};
  return doc.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("kind", c.kind);
  get("seed", c.seed);
  get("large_n", c.large_n);
  get("small_n", c.small_n);
  get("test_n", c.test_n);
  get("contam_large_n", c.contam_large_n);
  get("contam_small_n", c.contam_small_n);
  get("contam_test_n", c.contam_test_n);
  get("families", c.families);
  get("contam_gamma", c.contam_gamma);
  get("gamma_grid", c.gamma_grid);
  get("lambda_grid", c.lambda_grid);
  get("lambda_explain_cox", c.lambda_explain_cox);
  get("lambda_explain_rsf", c.lambda_explain_rsf);
  get("gamma_e3_cox", c.gamma_e3_cox);
  get("gamma_e3_rsf", c.gamma_e3_rsf);
  get("best_gamma_mode", c.best_gamma_mode);
  get("sweep_model", c.sweep_model);
  get("sweep_size", c.sweep_size);
  get("b_true", c.b_true);
  get("gen_scale", c.gen_scale);
  get("gen_shape", c.gen_shape);
  get("gen_truncation", c.gen_truncation);
  get("gen_censor_prob", c.gen_censor_prob);
  get("data_radius", c.data_radius);
  get("dataset_path", c.dataset_path);
  get("schema", c.schema);
  get("standardize", c.standardize);
  get("n_neighbors", c.n_neighbors);
  get("explain_radius", c.explain_radius);
  get("epsilon", c.epsilon);
  if (doc.contains("rsf")) {
    const auto& r = doc.at("rsf");
    if (r.contains("n_trees")) c.rsf.n_trees = r.at("n_trees").get<int>();
    if (r.contains("min_leaf_size")) c.rsf.min_leaf_size = r.at("min_leaf_size").get<int>();
    if (r.contains("features_per_split")) {
      c.rsf.features_per_split = r.at("features_per_split").get<int>();
    }
    if (r.contains("bootstrap")) c.rsf.bootstrap = r.at("bootstrap").get<bool>();
  }
  return c;
}

std::string render_report(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment: " << report.kind << "  seed: " << report.seed << "\n";
  if (report.dropped_rows > 0) {
    out << "dropped rows: " << report.dropped_rows << "\n";
  }
  auto print_rows = [&](const std::vector<ReportRow>& rows, const char* title) {
    if (rows.empty()) return;
    out << title << "\n";
    for (const auto& row : rows) {
      out << "  " << row.label << ":";
      for (const auto& [key, value] : row.metrics) {
        out << "  " << key << "=" << value;
      }
      out << "\n";
    }
  };
  print_rows(report.rows, "rows:");
  print_rows(report.aggregates, "aggregates:");
  if (!report.sweep.empty()) {
    out << "sweep (gamma, lambda, mrse):\n";
    for (const auto& p : report.sweep) {
      out << "  " << p.gamma << ", " << p.lambda << ", " << p.mrse << "\n";
    }
  }
  return out.str();
}

}  // namespace coxplain
