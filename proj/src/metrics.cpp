#include "catsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "catsim/error.hpp"
#include "catsim/text.hpp"

namespace catsim {

const IndicatorBounds& NormalizationBounds::of(Indicator ind) const {
  switch (ind) {
    case Indicator::kRsrp: return rsrp;
    case Indicator::kRsrq: return rsrq;
    case Indicator::kSnr: return snr;
    case Indicator::kCqi: return cqi;
  }
  throw ValidationError("unknown indicator");
}

double normalize_indicator(double value, IndicatorBounds bounds) {
  if (!(bounds.lo < bounds.hi)) throw ValidationError("indicator bounds: lo must be < hi");
  return std::clamp((value - bounds.lo) / (bounds.hi - bounds.lo), 0.0, 1.0);
}

double indicator_value(const ContextSnapshot& snapshot, Indicator ind) {
  switch (ind) {
    case Indicator::kRsrp: return snapshot.channel.rsrp_dbm;
    case Indicator::kRsrq: return snapshot.channel.rsrq_db;
    case Indicator::kSnr: return snapshot.channel.snr_db;
    case Indicator::kCqi: return static_cast<double>(snapshot.channel.cqi);
  }
  throw ValidationError("unknown indicator");
}

void validate_metric_spec(const MetricSpec& spec) {
  if (const auto* weighted = std::get_if<WeightedMetric>(&spec)) {
    double sum = 0.0;
    for (const auto& [ind, w] : weighted->weights) {
      if (w < 0.0) {
        throw ValidationError(std::string("weighted metric: negative weight for ") +
                              indicator_name(ind));
      }
      sum += w;
    }
    if (!(sum > 0.0)) throw ValidationError("weighted metric: weight sum must be > 0");
  } else if (const auto* predicted = std::get_if<PredictedRateMetric>(&spec)) {
    if (!(predicted->rate_max_mbps > 0.0)) {
      throw ValidationError("predicted-rate metric: rate_max_mbps must be > 0");
    }
  }
}

MetricValue evaluate_metric(const MetricSpec& spec, const ContextSnapshot& snapshot,
                            std::uint64_t buffer_bytes, const RegressionTree* predictor,
                            const GridMap* geomap, const NormalizationBounds& bounds) {
  validate_metric_spec(spec);

  if (const auto* single = std::get_if<SingleMetric>(&spec)) {
    return {normalize_indicator(indicator_value(snapshot, single->indicator),
                                bounds.of(single->indicator))};
  }

  if (const auto* weighted = std::get_if<WeightedMetric>(&spec)) {
    double acc = 0.0, sum = 0.0;
    for (const auto& [ind, w] : weighted->weights) {
      acc += w * normalize_indicator(indicator_value(snapshot, ind), bounds.of(ind));
      sum += w;
    }
    return {acc / sum};
  }

  const auto& predicted = std::get<PredictedRateMetric>(spec);
  if (predictor == nullptr) {
    throw ValidationError("predicted-rate metric requires a trained model");
  }
  const bool wants_map = predictor->arity() == kBaseFeatureCount + 1;
  FeatureVector features = assemble_features(snapshot, buffer_bytes, wants_map ? geomap : nullptr,
                                             predictor->geomap_fallback_mbps);
  if (wants_map && features.size() == kBaseFeatureCount) {
    features.push_back(predictor->geomap_fallback_mbps);  // model built with a map, none loaded
  }
  const double rate = predict(*predictor, features);
  return {std::clamp(rate / predicted.rate_max_mbps, 0.0, 1.0)};
}

std::string metric_descriptor(const MetricSpec& spec) {
  if (const auto* single = std::get_if<SingleMetric>(&spec)) {
    return std::string("single:") + indicator_name(single->indicator);
  }
  if (const auto* weighted = std::get_if<WeightedMetric>(&spec)) {
    std::string out = "weighted:";
    bool first = true;
    for (const auto& [ind, w] : weighted->weights) {
      if (!first) out += '+';
      out += std::string(indicator_name(ind)) + "*" + format_double(w);
      first = false;
    }
    return out;
  }
  const auto& predicted = std::get<PredictedRateMetric>(spec);
  return "predicted_rate:max=" + format_double(predicted.rate_max_mbps);
}

}  // namespace catsim
