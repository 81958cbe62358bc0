#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace llmcg {

/// An exact count ratio. When the denominator is empty the value is 1.0 if no
/// errors were made and undefined otherwise.
struct Rate {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::optional<double> value;

  static Rate of(std::size_t numerator, std::size_t denominator, std::size_t errors);

  bool defined() const noexcept { return value.has_value(); }
  // "0.666667" style, or "undefined".
  std::string to_string() const;

  bool operator==(const Rate&) const = default;
};

/// Precision, recall and F1 from raw counts. F1 is 2TP / (2TP + FP + FN).
struct PrecisionRecall {
  Rate precision;
  Rate recall;
  Rate f1;

  static PrecisionRecall from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

}  // namespace llmcg
