#include "phishml/metrics.hpp"

#include <cstdio>

#include "phishml/error.hpp"

namespace phishml {

namespace {

void tally(ConfusionCounts& c, int truth, int pred) {
  if (truth > 0) (pred > 0 ? c.n_ll : c.n_lp)++;
  else (pred > 0 ? c.n_pl : c.n_pp)++;
}

}  // namespace

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size())
    throw SpecError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(truths.size()) + " truths");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truths.size(); ++i)
    tally(c, static_cast<int>(truths[i]), static_cast<int>(predictions[i]));
  return c;
}

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size())
    throw SpecError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(truths.size()) + " truths");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if ((truths[i] != 1 && truths[i] != -1) || (predictions[i] != 1 && predictions[i] != -1))
      throw SpecError("confusion: label at position " + std::to_string(i) + " is not -1 or +1");
    tally(c, truths[i], predictions[i]);
  }
  return c;
}

std::string render(const MetricValue& v, int decimals) {
  if (!v.value) return "n/a(" + v.reason + ")";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v.value);
  return buf;
}

MetricValue f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return MetricValue::undefined("precision and recall are both zero");
  return MetricValue::of(2.0 * precision * recall / (precision + recall));
}

MetricsReport metrics(const ConfusionCounts& c) {
  if (c.n_ll < 0 || c.n_lp < 0 || c.n_pl < 0 || c.n_pp < 0) throw SpecError("metrics: negative count");
  if (c.total() == 0) throw SpecError("metrics: no samples");
  MetricsReport m;
  m.accuracy = static_cast<double>(c.n_ll + c.n_pp) / static_cast<double>(c.total());
  const auto actual_p = c.n_pl + c.n_pp;
  const auto predicted_p = c.n_lp + c.n_pp;
  m.recall = actual_p > 0 ? MetricValue::of(static_cast<double>(c.n_pp) / static_cast<double>(actual_p))
                          : MetricValue::undefined("no phishing samples");
  m.precision = predicted_p > 0 ? MetricValue::of(static_cast<double>(c.n_pp) / static_cast<double>(predicted_p))
                                : MetricValue::undefined("no phishing predictions");
  if (!m.recall.defined() || !m.precision.defined())
    m.f1 = MetricValue::undefined(!m.recall.defined() ? "recall undefined" : "precision undefined");
  else
    m.f1 = f1_score(*m.precision.value, *m.recall.value);
  return m;
}

}  // namespace phishml
