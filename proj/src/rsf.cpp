#include "coxplain/rsf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coxplain/rng.hpp"
#include "json.hpp"

namespace coxplain {

double log_rank_statistic(std::span<const double> times,
                          std::span<const char> events,
                          std::span<const char> in_left) {
  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  double at_risk_total = static_cast<double>(n);
  double at_risk_left = 0.0;
  for (std::size_t i = 0; i < n; ++i) at_risk_left += in_left[i] ? 1.0 : 0.0;

  double observed_minus_expected = 0.0;
  double variance = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double tau = times[order[i]];
    double deaths = 0.0, deaths_left = 0.0, leaving = 0.0, leaving_left = 0.0;
    std::size_t k = i;
    while (k < n && times[order[k]] == tau) {
      leaving += 1.0;
      if (in_left[order[k]]) leaving_left += 1.0;
      if (events[order[k]]) {
        deaths += 1.0;
        if (in_left[order[k]]) deaths_left += 1.0;
      }
      ++k;
    }
    if (deaths > 0.0 && at_risk_total > 1.0) {
      const double p = at_risk_left / at_risk_total;
      observed_minus_expected += deaths_left - deaths * p;
      variance += deaths * p * (1.0 - p) * (at_risk_total - deaths) /
                  (at_risk_total - 1.0);
    }
    at_risk_total -= leaving;
    at_risk_left -= leaving_left;
    i = k;
  }
  if (variance <= 0.0) return -1.0;
  return observed_minus_expected * observed_minus_expected / variance;
}

namespace {

struct GrowContext {
  const Dataset& dataset;
  TimeGridPtr grid;
  RsfParams params;
  int features_per_split;
  double epsilon;
  std::vector<TreeNode> nodes;
  Rng* rng = nullptr;
};

int grow_node(GrowContext& ctx, std::vector<int>& indices) {
  const auto n = indices.size();
  const auto d = ctx.dataset.dim();

  bool has_event = false;
  for (int i : indices) {
    if (ctx.dataset[static_cast<std::size_t>(i)].event_observed) {
      has_event = true;
      break;
    }
  }

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_stat = 0.0;
  if (has_event && n >= 2 * static_cast<std::size_t>(ctx.params.min_leaf_size)) {
    // Draw distinct candidate features (partial Fisher-Yates).
    std::vector<int> features(d);
    std::iota(features.begin(), features.end(), 0);
    const int tries = std::min<int>(ctx.features_per_split, static_cast<int>(d));
    for (int t = 0; t < tries; ++t) {
      const auto pick = t + static_cast<int>(ctx.rng->uniform_index(d - static_cast<std::size_t>(t)));
      std::swap(features[static_cast<std::size_t>(t)], features[static_cast<std::size_t>(pick)]);
    }

    std::vector<double> times(n);
    std::vector<char> events(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = ctx.dataset[static_cast<std::size_t>(indices[i])];
      times[i] = s.event_time;
      events[i] = s.event_observed ? 1 : 0;
    }
    std::vector<char> in_left(n);
    std::vector<double> vals(n);

    for (int t = 0; t < tries; ++t) {
      const int f = features[static_cast<std::size_t>(t)];
      for (std::size_t i = 0; i < n; ++i) {
        vals[i] = ctx.dataset[static_cast<std::size_t>(indices[i])]
                      .features[static_cast<std::size_t>(f)];
      }
      std::vector<double> uniq = vals;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (std::size_t u = 0; u + 1 < uniq.size(); ++u) {
        const double threshold = 0.5 * (uniq[u] + uniq[u + 1]);
        std::size_t left_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
          in_left[i] = vals[i] <= threshold ? 1 : 0;
          left_count += in_left[i] ? 1u : 0u;
        }
        if (left_count < static_cast<std::size_t>(ctx.params.min_leaf_size) ||
            n - left_count < static_cast<std::size_t>(ctx.params.min_leaf_size)) {
          continue;
        }
        const double stat = log_rank_statistic(times, events, in_left);
        if (stat > best_stat) {
          best_stat = stat;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }
  }

  if (best_feature < 0) {
    // Leaf: Nelson-Aalen of the node's samples on the shared grid.
    ChfCurve curve =
        nelson_aalen_subset(ctx.dataset, indices, ctx.grid, ctx.epsilon);
    TreeNode leaf;
    leaf.leaf_values = curve.values();
    ctx.nodes.push_back(std::move(leaf));
    return static_cast<int>(ctx.nodes.size()) - 1;
  }

  std::vector<int> left_idx, right_idx;
  left_idx.reserve(n);
  right_idx.reserve(n);
  for (int i : indices) {
    const double v = ctx.dataset[static_cast<std::size_t>(i)]
                         .features[static_cast<std::size_t>(best_feature)];
    (v <= best_threshold ? left_idx : right_idx).push_back(i);
  }

  const int self = static_cast<int>(ctx.nodes.size());
  ctx.nodes.emplace_back();
  ctx.nodes[static_cast<std::size_t>(self)].feature = best_feature;
  ctx.nodes[static_cast<std::size_t>(self)].threshold = best_threshold;
  const int left = grow_node(ctx, left_idx);
  const int right = grow_node(ctx, right_idx);
  ctx.nodes[static_cast<std::size_t>(self)].left = left;
  ctx.nodes[static_cast<std::size_t>(self)].right = right;
  return self;
}

}  // namespace

const std::vector<double>& SurvivalTree::route(
    const std::vector<double>& x) const {
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = nodes_[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                   : nd.right;
  }
  return nodes_[static_cast<std::size_t>(node)].leaf_values;
}

RsfModel::RsfModel(RsfParams params, std::vector<SurvivalTree> trees,
                   TimeGridPtr grid, double epsilon, std::size_t dim)
    : params_(params),
      trees_(std::move(trees)),
      grid_(std::move(grid)),
      epsilon_(epsilon),
      dim_(dim) {}

ChfCurve RsfModel::predict_chf(const std::vector<double>& x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("RsfModel: feature dimension mismatch");
  }
  std::vector<double> mean(grid_->interval_count(), 0.0);
  for (const auto& tree : trees_) {
    const auto& leaf = tree.route(x);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += leaf[j];
  }
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (auto& v : mean) v *= inv;
  return ChfCurve(grid_, std::move(mean), epsilon_);
}

RsfModel fit_rsf(const Dataset& dataset, const RsfParams& params,
                 double epsilon) {
  if (params.n_trees < 1 || params.min_leaf_size < 1) {
    throw std::invalid_argument("fit_rsf: invalid parameters");
  }
  if (dataset.size() == 0) {
    throw std::invalid_argument("fit_rsf: empty dataset");
  }
  if (dataset.event_count() == 0) {
    throw std::invalid_argument("fit_rsf: dataset has no observed events");
  }
  // min_leaf_size >= n/2 is allowed: trees then degenerate to single leaves.

  TimeGridPtr grid = build_time_grid(dataset);
  const int fps =
      params.features_per_split > 0
          ? params.features_per_split
          : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dataset.dim()))));

  std::vector<SurvivalTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  const auto n = dataset.size();
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<int> indices;
    indices.reserve(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        indices.push_back(static_cast<int>(rng.uniform_index(n)));
      }
    } else {
      indices.resize(n);
      std::iota(indices.begin(), indices.end(), 0);
    }
    GrowContext ctx{dataset, grid, params, fps, epsilon, {}, &rng};
    grow_node(ctx, indices);
    trees.emplace_back(std::move(ctx.nodes));
  }

  return RsfModel(params, std::move(trees), std::move(grid), epsilon,
                  dataset.dim());
}

std::string rsf_to_json(const RsfModel& model) {
  nlohmann::ordered_json doc;
  doc["params"] = {{"n_trees", model.params().n_trees},
                   {"min_leaf_size", model.params().min_leaf_size},
                   {"features_per_split", model.params().features_per_split},
                   {"bootstrap", model.params().bootstrap},
                   {"seed", model.params().seed}};
  doc["grid"] = model.grid()->times();
  doc["horizon"] = model.grid()->horizon();
  doc["epsilon"] = model.epsilon();
  doc["dim"] = model.dim();
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees()) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& nd : tree.nodes()) {
      nlohmann::ordered_json jn;
      jn["feature"] = nd.feature;
      jn["threshold"] = nd.threshold;
      jn["left"] = nd.left;
      jn["right"] = nd.right;
      jn["leaf"] = nd.leaf_values;
      nodes.push_back(std::move(jn));
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

RsfModel rsf_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  RsfParams params;
  params.n_trees = doc.at("params").at("n_trees").get<int>();
  params.min_leaf_size = doc.at("params").at("min_leaf_size").get<int>();
  params.features_per_split = doc.at("params").at("features_per_split").get<int>();
  params.bootstrap = doc.at("params").at("bootstrap").get<bool>();
  params.seed = doc.at("params").at("seed").get<std::uint64_t>();
  std::vector<double> times = doc.at("grid").get<std::vector<double>>();
  const double horizon = doc.at("horizon").get<double>();
  const double epsilon = doc.at("epsilon").get<double>();
  auto grid = std::make_shared<TimeGrid>(times, horizon - times.back());

  std::vector<SurvivalTree> trees;
  for (const auto& jt : doc.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : jt) {
      TreeNode nd;
      nd.feature = jn.at("feature").get<int>();
      nd.threshold = jn.at("threshold").get<double>();
      nd.left = jn.at("left").get<int>();
      nd.right = jn.at("right").get<int>();
      nd.leaf_values = jn.at("leaf").get<std::vector<double>>();
      nodes.push_back(std::move(nd));
    }
    trees.emplace_back(std::move(nodes));
  }
  return RsfModel(params, std::move(trees), std::move(grid), epsilon,
                  doc.at("dim").get<std::size_t>());
}

}  // namespace coxplain
