#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catsim/geomap.hpp"
#include "catsim/trace.hpp"

namespace catsim {

/// Feature order is fixed: rsrp, rsrq, snr, cqi, speed, heading, payload and,
/// when a connectivity map is in use, the map's mean rate at the sample
/// position. A dataset either has the map feature in every row or in none.
using FeatureVector = std::vector<double>;

inline constexpr std::size_t kBaseFeatureCount = 7;

std::vector<std::string> feature_names(bool with_geomap);

/// Builds the feature vector for one snapshot. With `map == nullptr` the
/// 7-feature base vector is produced; otherwise the map feature is appended,
/// falling back to `geomap_fallback_mbps` when the containing grid cell is
/// empty or never observed a rate.
FeatureVector assemble_features(const ContextSnapshot& snapshot, std::uint64_t payload_bytes,
                                const GridMap* map = nullptr, double geomap_fallback_mbps = 0.0);

/// Rows of (features, target rate in Mbit/s). Uniform arity, targets > 0.
struct TrainingSet {
  std::vector<FeatureVector> features;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  std::size_t arity() const { return features.empty() ? 0 : features.front().size(); }
};

struct TreeParams {
  int min_leaf = 8;            // >= 2
  int max_depth = 12;          // >= 1
  bool linear_leaves = true;   // least-squares models at leaves
  double min_sdr_gain = 0.05;  // split must reduce sd by this fraction of the node sd
};

struct LinearModel {
  std::vector<double> coeffs;  // one per feature
  double intercept = 0.0;
};

/// Tree node. Inner nodes route x[feature] <= threshold to `left`, else
/// `right` (indices into RegressionTree::nodes). Leaves predict the node mean
/// or, when fitted, a linear model.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double mean = 0.0;
  std::optional<LinearModel> linear;

  bool is_leaf() const { return left < 0; }
};

/// M5-style regression tree: grown by standard-deviation-reduction splits,
/// with optional linear leaf models. min_sdr_gain and min_leaf act as
/// pre-pruning; there is no smoothing or post-pruning pass.
struct RegressionTree {
  std::vector<TreeNode> nodes;  // pre-order, root at index 0
  std::vector<std::string> feature_names;
  TreeParams params;
  double geomap_fallback_mbps = 0.0;

  std::size_t arity() const { return feature_names.size(); }
  std::size_t leaf_count() const;
};

struct SplitResult {
  double threshold = 0.0;
  double sdr = 0.0;  // sd(parent) - weighted sd(children), population sd
};

/// Best threshold for one feature over the given rows: the midpoint between
/// consecutive distinct sorted feature values that maximizes the standard
/// deviation reduction, subject to both sides holding at least `min_leaf`
/// rows. Ties go to the lower threshold. Returns nullopt when no admissible
/// midpoint exists.
std::optional<SplitResult> best_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                      std::size_t feature, int min_leaf);
std::optional<SplitResult> best_split(const TrainingSet& data, std::size_t feature, int min_leaf);

/// Grows a tree. Deterministic given (data, params); `seed` is reserved (the
/// growing procedure draws no randomness). Splits choose the feature with
/// maximal SDR (ties to the lower feature index) and stop at max_depth, at
/// fewer than 2*min_leaf rows, on a pure node, or when the best SDR falls
/// below min_sdr_gain * sd(node targets).
RegressionTree train(const TrainingSet& data, const TreeParams& params = {},
                     std::uint64_t seed = 0);

/// Routes x through the tree; the result is floored at 0.
double predict(const RegressionTree& tree, const FeatureVector& x);

/// Pooled out-of-fold scores from seeded k-fold cross-validation. `r` is
/// absent when the Pearson correlation is undefined (zero variance on either
/// side).
struct CvReport {
  std::optional<double> r;
  double mae = 0.0;
  double rmse = 0.0;
  int k = 0;
  std::size_t n = 0;
};

/// Shuffles row indices with the substream (seed, "cv.shuffle"), cuts k
/// contiguous folds, trains on each complement and scores the pooled
/// out-of-fold predictions once. Deterministic given (data, params, k, seed).
CvReport cross_validate(const TrainingSet& data, const TreeParams& params, int k,
                        std::uint64_t seed);

/// Model persistence: versioned JSON, nodes serialized pre-order with
/// explicit child indices.
std::string tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const std::string& json_text);
void save_tree(const RegressionTree& tree, const std::string& path);
RegressionTree load_tree(const std::string& path);

/// Population standard deviation; 0 for empty input.
double population_sd(std::span<const double> values);

}  // namespace catsim
