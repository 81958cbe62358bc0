#include "llmcg/metrics.hpp"

#include <cstdio>

namespace llmcg {

Rate Rate::of(std::size_t numerator, std::size_t denominator, std::size_t errors) {
  Rate rate{numerator, denominator, std::nullopt};
  if (denominator > 0) {
    rate.value = static_cast<double>(numerator) / static_cast<double>(denominator);
  } else if (errors == 0) {
    rate.value = 1.0;
  }
  return rate;
}

std::string Rate::to_string() const {
  if (!value) return "undefined";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6f", *value);
  return buffer;
}

PrecisionRecall PrecisionRecall::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  return {Rate::of(tp, tp + fp, fp), Rate::of(tp, tp + fn, fn),
          Rate::of(2 * tp, 2 * tp + fp + fn, fp + fn)};
}

}  // namespace llmcg
