#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "catsim/geomap.hpp"
#include "catsim/predictor.hpp"
#include "catsim/trace.hpp"

namespace catsim {

struct IndicatorBounds {
  double lo = 0.0;
  double hi = 1.0;  // lo < hi
};

/// Normalization ranges per indicator, defaulting to the validity ranges of
/// the trace model. Overridable per run config.
struct NormalizationBounds {
  IndicatorBounds rsrp{kRsrpMinDbm, kRsrpMaxDbm};
  IndicatorBounds rsrq{kRsrqMinDb, kRsrqMaxDb};
  IndicatorBounds snr{kSnrMinDb, kSnrMaxDb};
  IndicatorBounds cqi{static_cast<double>(kCqiMin), static_cast<double>(kCqiMax)};

  const IndicatorBounds& of(Indicator ind) const;
};

/// Phi follows one indicator directly.
struct SingleMetric {
  Indicator indicator = Indicator::kSnr;
};

/// Phi is the weighted mean of the normalized indicators. Weights are
/// non-negative with a positive sum; scaling all weights uniformly leaves the
/// metric unchanged.
struct WeightedMetric {
  std::map<Indicator, double> weights;
};

/// Phi is the predicted data rate, normalized by a configured maximum so the
/// metric stays stable across retraining.
struct PredictedRateMetric {
  double rate_max_mbps = 50.0;
};

using MetricSpec = std::variant<SingleMetric, WeightedMetric, PredictedRateMetric>;

/// Transmission metric value, always in [0, 1].
struct MetricValue {
  double phi = 0.0;
};

/// clamp((value - lo) / (hi - lo), 0, 1)
double normalize_indicator(double value, IndicatorBounds bounds);

double indicator_value(const ContextSnapshot& snapshot, Indicator ind);

void validate_metric_spec(const MetricSpec& spec);

/// Evaluates the metric for one snapshot. The PredictedRate variant requires
/// `predictor`; it assembles features according to the model's arity, using
/// `geomap` (or the model's recorded fallback) for the map feature, and sets
/// phi = clamp(prediction / rate_max, 0, 1).
MetricValue evaluate_metric(const MetricSpec& spec, const ContextSnapshot& snapshot,
                            std::uint64_t buffer_bytes, const RegressionTree* predictor = nullptr,
                            const GridMap* geomap = nullptr,
                            const NormalizationBounds& bounds = {});

std::string metric_descriptor(const MetricSpec& spec);

}  // namespace catsim
