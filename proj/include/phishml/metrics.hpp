#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "phishml/schema.hpp"

namespace phishml {

/// Outcome counts with phishing as the positive class. n_xy counts samples
/// of true class x predicted as y (L = legitimate, P = phishing).
struct ConfusionCounts {
  std::int64_t n_ll = 0;
  std::int64_t n_lp = 0;
  std::int64_t n_pl = 0;
  std::int64_t n_pp = 0;

  std::int64_t total() const noexcept { return n_ll + n_lp + n_pl + n_pp; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    n_ll += o.n_ll;
    n_lp += o.n_lp;
    n_pl += o.n_pl;
    n_pp += o.n_pp;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);
/// Integer labels; every value must be -1 or +1.
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths);

/// A ratio that may be undefined; `reason` says why when it is.
struct MetricValue {
  std::optional<double> value;
  std::string reason;

  static MetricValue of(double v) { return {v, {}}; }
  static MetricValue undefined(std::string why) { return {std::nullopt, std::move(why)}; }
  bool defined() const noexcept { return value.has_value(); }
  friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

/// "0.952149" or "n/a(reason)".
std::string render(const MetricValue& v, int decimals = 6);

struct MetricsReport {
  double accuracy = 0.0;
  MetricValue recall;
  MetricValue precision;
  MetricValue f1;
  double train_time_s = 0.0;
  double test_time_s = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// acc = (LL + PP) / total, r = PP / (PL + PP), p = PP / (LP + PP),
/// F1 = 2pr / (p + r). Zero denominators leave the value undefined.
MetricsReport metrics(const ConfusionCounts& c);

/// F1 from precision and recall; undefined when p + r = 0.
MetricValue f1_score(double precision, double recall);

}  // namespace phishml
