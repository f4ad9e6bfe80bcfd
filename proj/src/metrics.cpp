#include "ragkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ragkit {

namespace {

Index positive_index_check(const PredictionSet& set) {
  if (set.categories.size() != 2) throw Error(ErrorKind::data, "ROC analysis needs exactly two categories");
  return 1;
}

// Item order by descending score.
std::vector<std::size_t> by_score_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

void check_two_classes(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw Error(ErrorKind::data, "score and label counts differ");
  const auto pos = std::count(positive.begin(), positive.end(), true);
  if (pos == 0 || pos == static_cast<long>(positive.size()))
    throw Error(ErrorKind::data, "ROC analysis needs both classes present");
  for (double s : scores)
    if (!std::isfinite(s)) throw Error(ErrorKind::numerical, "non-finite score");
}

}  // namespace

std::vector<double> positive_scores(const PredictionSet& set) {
  const Index pos = positive_index_check(set);
  std::vector<double> out;
  for (const auto& p : set.items) out.push_back(p.predicted_label == set.categories[pos] ? p.score : -p.score);
  return out;
}

std::vector<bool> positive_flags(const PredictionSet& set) {
  const Index pos = positive_index_check(set);
  std::vector<bool> out;
  for (const auto& p : set.items) out.push_back(p.true_label == set.categories[pos]);
  return out;
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_two_classes(scores, positive);
  const auto order = by_score_desc(scores);
  // Twice the number of (positive, negative) wins, kept integral.
  long long twice_wins = 0;
  long long pos_total = 0;
  long long neg_total = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    long long pos = 0;
    long long neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (positive[order[j]] ? pos : neg) += 1;
      ++j;
    }
    // Ties within the group count half; earlier (higher) positives beat these negatives.
    twice_wins += pos * neg + 2 * pos_total * neg;
    pos_total += pos;
    neg_total += neg;
    i = j;
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos_total) * static_cast<double>(neg_total));
}

double roc_auc(const PredictionSet& set) { return roc_auc(positive_scores(set), positive_flags(set)); }

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_two_classes(scores, positive);
  const auto order = by_score_desc(scores);
  const double p_total = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const double n_total = static_cast<double>(positive.size()) - p_total;
  std::vector<RocPoint> raw{{0.0, 0.0}};
  double tp = 0;
  double fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (positive[order[j]] ? tp : fp) += 1;
      ++j;
    }
    raw.push_back({fp / n_total, tp / p_total});
    i = j;
  }
  std::vector<RocPoint> out{raw.front()};
  for (std::size_t k = 1; k + 1 < raw.size(); ++k) {
    const RocPoint& a = out.back();
    const RocPoint& b = raw[k];
    const RocPoint& c = raw[k + 1];
    const double cross = (b.fpr - a.fpr) * (c.tpr - a.tpr) - (b.tpr - a.tpr) * (c.fpr - a.fpr);
    if (cross != 0.0) out.push_back(b);
  }
  out.push_back(raw.back());
  return out;
}

double mcnemar_exact_p(long b, long c) {
  if (b < 0 || c < 0) throw Error(ErrorKind::usage, "discordant counts must be non-negative");
  const long n = b + c;
  if (n == 0) return 1.0;
  const long k = std::min(b, c);
  double tail = 0.0;
  for (long i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  return std::min(1.0, 2.0 * tail);
}

McNemarResult significance_test(const PredictionSet& a, const PredictionSet& b, double alpha) {
  if (a.items.size() != b.items.size()) throw Error(ErrorKind::data, "prediction sets cover different graphs");
  McNemarResult r;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.graph_id != y.graph_id || x.true_label != y.true_label)
      throw Error(ErrorKind::data, "prediction sets cover different graphs");
    const bool ax = x.predicted_label == x.true_label;
    const bool by = y.predicted_label == y.true_label;
    if (ax && !by) ++r.only_a_correct;
    if (!ax && by) ++r.only_b_correct;
  }
  r.p_value = mcnemar_exact_p(r.only_a_correct, r.only_b_correct);
  r.significant = r.p_value < alpha;
  return r;
}

ConfusionSummary summarize(const PredictionSet& set) {
  const std::size_t k = set.categories.size();
  ConfusionSummary s;
  s.confusion.assign(k, std::vector<long>(k, 0));
  const auto index = [&](const std::string& label) {
    const auto it = std::find(set.categories.begin(), set.categories.end(), label);
    if (it == set.categories.end()) throw Error(ErrorKind::data, "label '" + label + "' is not a category");
    return static_cast<std::size_t>(it - set.categories.begin());
  };
  for (const auto& p : set.items) ++s.confusion[index(p.true_label)][index(p.predicted_label)];
  s.accuracy = set.accuracy();
  for (std::size_t c = 0; c < k; ++c) {
    long total = 0;
    for (long v : s.confusion[c]) total += v;
    s.per_class_accuracy.push_back(total == 0 ? 0.0 : static_cast<double>(s.confusion[c][c]) / static_cast<double>(total));
  }
  return s;
}

}  // namespace ragkit
