#include "catsim/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "catsim/error.hpp"
#include "catsim/rng.hpp"

namespace catsim {

namespace {

constexpr int kModelVersion = 1;

void validate_training_set(const TrainingSet& data) {
  if (data.features.size() != data.targets.size()) {
    throw ValidationError("training set: features/targets size mismatch");
  }
  if (data.size() < 2) throw ValidationError("training set: needs at least 2 rows");
  const std::size_t arity = data.arity();
  if (arity == 0) throw ValidationError("training set: empty feature vectors");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.features[i].size() != arity) {
      throw ValidationError("training set: row " + std::to_string(i) + " has arity " +
                            std::to_string(data.features[i].size()) + ", expected " +
                            std::to_string(arity));
    }
    for (double v : data.features[i]) {
      if (!std::isfinite(v)) {
        throw ValidationError("training set: non-finite feature in row " + std::to_string(i));
      }
    }
    if (!(data.targets[i] > 0.0) || !std::isfinite(data.targets[i])) {
      throw ValidationError("training set: target in row " + std::to_string(i) +
                            " must be finite and > 0");
    }
  }
}

void validate_params(const TreeParams& p) {
  if (p.min_leaf < 2) throw ValidationError("tree params: min_leaf must be >= 2");
  if (p.max_depth < 1) throw ValidationError("tree params: max_depth must be >= 1");
  if (p.min_sdr_gain < 0.0) throw ValidationError("tree params: min_sdr_gain must be >= 0");
}

double mean_of(const TrainingSet& data, std::span<const std::size_t> rows) {
  double sum = 0.0;
  for (std::size_t r : rows) sum += data.targets[r];
  return sum / static_cast<double>(rows.size());
}

double sd_of(const TrainingSet& data, std::span<const std::size_t> rows) {
  const double mean = mean_of(data, rows);
  double sq = 0.0;
  for (std::size_t r : rows) {
    const double d = data.targets[r] - mean;
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(rows.size()));
}

// Least-squares fit of target = coeffs . x + intercept over the given rows.
// Features are centered and equilibrated before solving the normal equations
// (Gaussian elimination, partial pivoting) so the singularity test is
// scale-free. Returns nullopt when the system is singular, e.g. a constant
// feature column or exactly collinear columns.
std::optional<LinearModel> fit_linear(const TrainingSet& data, std::span<const std::size_t> rows) {
  const std::size_t m = data.arity();
  const double n = static_cast<double>(rows.size());

  std::vector<double> mean(m, 0.0);
  double target_mean = 0.0;
  for (std::size_t r : rows) {
    for (std::size_t i = 0; i < m; ++i) mean[i] += data.features[r][i];
    target_mean += data.targets[r];
  }
  for (double& v : mean) v /= n;
  target_mean /= n;

  std::vector<double> scale(m, 0.0);
  for (std::size_t r : rows) {
    for (std::size_t i = 0; i < m; ++i) {
      scale[i] = std::max(scale[i], std::abs(data.features[r][i] - mean[i]));
    }
  }
  for (double s : scale) {
    if (s == 0.0) return std::nullopt;  // constant column
  }

  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<double> z(m, 0.0);
  for (std::size_t r : rows) {
    for (std::size_t i = 0; i < m; ++i) z[i] = (data.features[r][i] - mean[i]) / scale[i];
    const double dy = data.targets[r] - target_mean;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) a[i][j] += z[i] * z[j];
      b[i] += z[i] * dy;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) a[i][j] = a[j][i];
  }

  const double eps = n * 1e-9;  // entries of `a` are bounded by n
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < eps) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> sol(m, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < m; ++j) acc -= a[i][j] * sol[j];
    sol[i] = acc / a[i][i];
  }

  LinearModel model;
  model.coeffs.resize(m);
  model.intercept = target_mean;
  for (std::size_t i = 0; i < m; ++i) {
    model.coeffs[i] = sol[i] / scale[i];
    model.intercept -= model.coeffs[i] * mean[i];
    if (!std::isfinite(model.coeffs[i])) return std::nullopt;
  }
  return std::isfinite(model.intercept) ? std::optional<LinearModel>(model) : std::nullopt;
}

struct Grower {
  const TrainingSet& data;
  const TreeParams& params;
  std::vector<TreeNode> nodes;

  int grow(std::vector<std::size_t>& rows, int depth) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();

    const double node_sd = sd_of(data, rows);
    std::optional<std::size_t> split_feature;
    SplitResult split{};

    const bool can_split = depth < params.max_depth &&
                           rows.size() >= 2 * static_cast<std::size_t>(params.min_leaf) &&
                           node_sd > 0.0;
    if (can_split) {
      for (std::size_t f = 0; f < data.arity(); ++f) {
        const auto candidate = best_split(data, rows, f, params.min_leaf);
        if (candidate && (!split_feature || candidate->sdr > split.sdr)) {
          split_feature = f;
          split = *candidate;
        }
      }
      if (split_feature && split.sdr < params.min_sdr_gain * node_sd) split_feature.reset();
    }

    if (!split_feature) {
      TreeNode& leaf = nodes[index];
      leaf.mean = mean_of(data, rows);
      if (params.linear_leaves) leaf.linear = fit_linear(data, rows);
      return index;
    }

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t r : rows) {
      (data.features[r][*split_feature] <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[index].feature = static_cast<int>(*split_feature);
    nodes[index].threshold = split.threshold;
    const int left = grow(left_rows, depth + 1);
    nodes[index].left = left;
    const int right = grow(right_rows, depth + 1);
    nodes[index].right = right;
    return index;
  }
};

}  // namespace

std::vector<std::string> feature_names(bool with_geomap) {
  std::vector<std::string> names = {"rsrp_dbm",  "rsrq_db",     "snr_db",       "cqi",
                                    "speed_mps", "heading_deg", "payload_bytes"};
  if (with_geomap) names.push_back("map_mean_rate_mbps");
  return names;
}

FeatureVector assemble_features(const ContextSnapshot& snapshot, std::uint64_t payload_bytes,
                                const GridMap* map, double geomap_fallback_mbps) {
  FeatureVector x = {snapshot.channel.rsrp_dbm,
                     snapshot.channel.rsrq_db,
                     snapshot.channel.snr_db,
                     static_cast<double>(snapshot.channel.cqi),
                     snapshot.mobility.speed_mps,
                     snapshot.mobility.heading_deg,
                     static_cast<double>(payload_bytes)};
  if (map != nullptr) {
    const CellAggregate* cell = map->lookup(snapshot.mobility.position);
    const auto rate = cell ? cell->mean_rate() : std::nullopt;
    x.push_back(rate.value_or(geomap_fallback_mbps));
  }
  return x;
}

double population_sd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

std::size_t RegressionTree::leaf_count() const {
  std::size_t count = 0;
  for (const TreeNode& n : nodes) count += n.is_leaf() ? 1 : 0;
  return count;
}

std::optional<SplitResult> best_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                      std::size_t feature, int min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return std::nullopt;
  if (feature >= data.arity()) throw ValidationError("best_split: feature index out of range");

  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.features[a][feature] < data.features[b][feature];
  });

  // Prefix sums over the sorted order give O(1) child statistics per
  // candidate threshold.
  std::vector<double> prefix_sum(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = data.targets[order[i]];
    prefix_sum[i + 1] = prefix_sum[i] + y;
    prefix_sq[i + 1] = prefix_sq[i] + y * y;
  }
  const auto segment_sd = [&](std::size_t begin, std::size_t end) {
    const double count = static_cast<double>(end - begin);
    const double mean = (prefix_sum[end] - prefix_sum[begin]) / count;
    const double var = (prefix_sq[end] - prefix_sq[begin]) / count - mean * mean;
    return std::sqrt(std::max(var, 0.0));
  };

  const double total_sd = segment_sd(0, n);
  std::optional<SplitResult> best;
  for (std::size_t i = 1; i < n; ++i) {
    const double lo = data.features[order[i - 1]][feature];
    const double hi = data.features[order[i]][feature];
    if (lo == hi) continue;
    if (i < static_cast<std::size_t>(min_leaf) || n - i < static_cast<std::size_t>(min_leaf)) {
      continue;
    }
    const double weight_left = static_cast<double>(i) / static_cast<double>(n);
    const double sdr =
        total_sd - weight_left * segment_sd(0, i) - (1.0 - weight_left) * segment_sd(i, n);
    if (!best || sdr > best->sdr) best = SplitResult{(lo + hi) / 2.0, sdr};
  }
  return best;
}

std::optional<SplitResult> best_split(const TrainingSet& data, std::size_t feature, int min_leaf) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  return best_split(data, rows, feature, min_leaf);
}

RegressionTree train(const TrainingSet& data, const TreeParams& params, std::uint64_t /*seed*/) {
  validate_training_set(data);
  validate_params(params);

  Grower grower{data, params, {}};
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  grower.grow(rows, 0);

  RegressionTree tree;
  tree.nodes = std::move(grower.nodes);
  tree.feature_names = data.arity() == kBaseFeatureCount + 1 ? feature_names(true)
                       : data.arity() == kBaseFeatureCount  ? feature_names(false)
                                                            : std::vector<std::string>{};
  if (tree.feature_names.empty()) {
    for (std::size_t i = 0; i < data.arity(); ++i) tree.feature_names.push_back("f" + std::to_string(i));
  }
  tree.params = params;
  return tree;
}

double predict(const RegressionTree& tree, const FeatureVector& x) {
  if (tree.nodes.empty()) throw ValidationError("predict: empty tree");
  if (x.size() != tree.arity()) {
    throw ValidationError("predict: arity mismatch, expected " + std::to_string(tree.arity()) +
                          " features, got " + std::to_string(x.size()));
  }
  const TreeNode* node = &tree.nodes.front();
  while (!node->is_leaf()) {
    node = &tree.nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold
                           ? static_cast<std::size_t>(node->left)
                           : static_cast<std::size_t>(node->right)];
  }
  double value = node->mean;
  if (node->linear) {
    value = node->linear->intercept;
    for (std::size_t i = 0; i < x.size(); ++i) value += node->linear->coeffs[i] * x[i];
  }
  return std::max(value, 0.0);
}

CvReport cross_validate(const TrainingSet& data, const TreeParams& params, int k,
                        std::uint64_t seed) {
  validate_training_set(data);
  validate_params(params);
  if (k < 2) throw ValidationError("cross_validate: k must be >= 2");
  const std::size_t n = data.size();
  if (static_cast<std::size_t>(k) > n) throw ValidationError("cross_validate: k exceeds dataset size");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, "cv.shuffle");
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_below(i + 1)]);
  }

  std::vector<double> predictions, actuals;
  predictions.reserve(n);
  actuals.reserve(n);

  for (int fold = 0; fold < k; ++fold) {
    const std::size_t begin = n * static_cast<std::size_t>(fold) / static_cast<std::size_t>(k);
    const std::size_t end = n * (static_cast<std::size_t>(fold) + 1) / static_cast<std::size_t>(k);

    TrainingSet train_set;
    train_set.features.reserve(n - (end - begin));
    train_set.targets.reserve(n - (end - begin));
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= begin && i < end) continue;
      train_set.features.push_back(data.features[order[i]]);
      train_set.targets.push_back(data.targets[order[i]]);
    }
    const RegressionTree tree = train(train_set, params, seed);
    for (std::size_t i = begin; i < end; ++i) {
      predictions.push_back(predict(tree, data.features[order[i]]));
      actuals.push_back(data.targets[order[i]]);
    }
  }

  CvReport report;
  report.k = k;
  report.n = n;

  double abs_err = 0.0, sq_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = predictions[i] - actuals[i];
    abs_err += std::abs(e);
    sq_err += e * e;
  }
  report.mae = abs_err / static_cast<double>(n);
  report.rmse = std::sqrt(sq_err / static_cast<double>(n));

  const double mean_p =
      std::accumulate(predictions.begin(), predictions.end(), 0.0) / static_cast<double>(n);
  const double mean_a =
      std::accumulate(actuals.begin(), actuals.end(), 0.0) / static_cast<double>(n);
  double cov = 0.0, var_p = 0.0, var_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (predictions[i] - mean_p) * (actuals[i] - mean_a);
    var_p += (predictions[i] - mean_p) * (predictions[i] - mean_p);
    var_a += (actuals[i] - mean_a) * (actuals[i] - mean_a);
  }
  if (var_p > 0.0 && var_a > 0.0) report.r = cov / std::sqrt(var_p * var_a);
  return report;
}

std::string tree_to_json(const RegressionTree& tree) {
  nlohmann::json doc;
  doc["version"] = kModelVersion;
  doc["feature_names"] = tree.feature_names;
  doc["params"] = {{"min_leaf", tree.params.min_leaf},
                   {"max_depth", tree.params.max_depth},
                   {"linear_leaves", tree.params.linear_leaves},
                   {"min_sdr_gain", tree.params.min_sdr_gain}};
  doc["geomap_fallback_mbps"] = tree.geomap_fallback_mbps;

  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : tree.nodes) {
    nlohmann::json node;
    if (n.is_leaf()) {
      node["kind"] = "leaf";
      node["mean"] = n.mean;
      if (n.linear) {
        node["linear"] = {{"coeffs", n.linear->coeffs}, {"intercept", n.linear->intercept}};
      }
    } else {
      node["kind"] = "split";
      node["feature"] = n.feature;
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

RegressionTree tree_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model file: invalid JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kModelVersion) {
      throw ValidationError("model file: unsupported version " + doc["version"].dump());
    }
    RegressionTree tree;
    tree.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& p = doc.at("params");
    tree.params.min_leaf = p.at("min_leaf").get<int>();
    tree.params.max_depth = p.at("max_depth").get<int>();
    tree.params.linear_leaves = p.at("linear_leaves").get<bool>();
    tree.params.min_sdr_gain = p.at("min_sdr_gain").get<double>();
    tree.geomap_fallback_mbps = doc.value("geomap_fallback_mbps", 0.0);

    for (const auto& node_json : doc.at("nodes")) {
      TreeNode node;
      if (node_json.at("kind") == "split") {
        node.feature = node_json.at("feature").get<int>();
        node.threshold = node_json.at("threshold").get<double>();
        node.left = node_json.at("left").get<int>();
        node.right = node_json.at("right").get<int>();
      } else {
        node.mean = node_json.at("mean").get<double>();
        if (node_json.contains("linear")) {
          LinearModel lm;
          lm.coeffs = node_json["linear"].at("coeffs").get<std::vector<double>>();
          lm.intercept = node_json["linear"].at("intercept").get<double>();
          node.linear = std::move(lm);
        }
      }
      tree.nodes.push_back(std::move(node));
    }
    if (tree.nodes.empty()) throw ValidationError("model file: no nodes");
    for (const TreeNode& n : tree.nodes) {
      const auto size = static_cast<int>(tree.nodes.size());
      if (!n.is_leaf() && (n.left >= size || n.right >= size || n.right < 0)) {
        throw ValidationError("model file: child index out of range");
      }
      if (!n.is_leaf() && (n.feature < 0 || n.feature >= static_cast<int>(tree.arity()))) {
        throw ValidationError("model file: split feature out of range");
      }
      if (n.linear && n.linear->coeffs.size() != tree.arity()) {
        throw ValidationError("model file: linear model arity mismatch");
      }
    }
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

void save_tree(const RegressionTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << tree_to_json(tree);
  if (!out) throw IoError("failed writing model file: " + path);
}

RegressionTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return tree_from_json(text);
}

}  // namespace catsim
