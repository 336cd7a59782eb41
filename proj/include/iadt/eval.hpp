#ifndef IADT_EVAL_HPP
#define IADT_EVAL_HPP

// Classification metrics, Mann-Whitney AUC, paired t-test with bootstrap
// pairing, and attention-based ROI ranking.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iadt/data.hpp"
#include "iadt/errors.hpp"
#include "iadt/network.hpp"
#include "iadt/training.hpp"

namespace iadt {

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Undefined metrics (zero denominator, single-class AUC) are empty optionals.
struct MetricsReport {
  std::optional<double> acc;
  std::optional<double> bac;
  std::optional<double> sen;
  std::optional<double> spe;
  std::optional<double> auc;
};

enum class Metric { acc, bac, sen, spe, auc };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::acc: return "acc";
    case Metric::bac: return "bac";
    case Metric::sen: return "sen";
    case Metric::spe: return "spe";
    case Metric::auc: return "auc";
  }
  return "acc";
}

/// Positive class is 1.
inline Confusion confusion(std::span<const int> y, std::span<const int> yhat) {
  if (y.size() != yhat.size()) throw DimensionError("confusion: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((y[i] != 0 && y[i] != 1) || (yhat[i] != 0 && yhat[i] != 1)) {
      throw ParameterError("confusion: labels must be 0 or 1");
    }
    if (y[i] == 1) {
      ++(yhat[i] == 1 ? c.tp : c.fn);
    } else {
      ++(yhat[i] == 1 ? c.fp : c.tn);
    }
  }
  return c;
}

/// Mann-Whitney AUC: P(score_pos > score_neg) with ties counted 0.5,
/// computed from mid-ranks.
inline std::optional<double> auc(std::span<const int> y, std::span<const double> scores) {
  if (y.size() != scores.size()) throw DimensionError("auc: length mismatch");
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (y[order[k]] == 1) {
        rank_sum += mid;
        ++npos;
      }
    }
    i = j;
  }
  const std::size_t nneg = n - npos;
  if (npos == 0 || nneg == 0) return std::nullopt;
  const double p = static_cast<double>(npos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(nneg));
}

inline MetricsReport metrics(const Confusion& c, std::span<const double> probs,
                             std::span<const int> y) {
  MetricsReport r;
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.acc = ratio(c.tp + c.tn, c.total());
  r.sen = ratio(c.tp, c.tp + c.fn);
  r.spe = ratio(c.tn, c.tn + c.fp);
  if (r.sen && r.spe) r.bac = (*r.sen + *r.spe) / 2.0;
  if (!probs.empty()) r.auc = auc(y, probs);
  return r;
}

inline MetricsReport evaluate_predictions(std::span<const int> y, std::span<const double> probs,
                                          std::span<const int> labels) {
  return metrics(confusion(y, labels), probs, y);
}

inline std::optional<double> metric_value(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::acc: return r.acc;
    case Metric::bac: return r.bac;
    case Metric::sen: return r.sen;
    case Metric::spe: return r.spe;
    case Metric::auc: return r.auc;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Paired t-test

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                     b * std::log1p(-x);
  const double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
  return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided Student-t tail probability P(|T| ≥ |t|) with `df` degrees of freedom.
inline double student_t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  bool degenerate = false;  // sd of differences is zero
};

inline TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("paired_ttest: length mismatch");
  if (a.size() < 2) throw ParameterError("paired_ttest: need at least 2 pairs");
  const std::size_t n = a.size();
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / double(n - 1));
  TTestResult r;
  r.df = n - 1;
  if (sd == 0.0) {
    r.degenerate = true;
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p = 0.0;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(double(n)));
  r.p = student_t_two_sided(r.t, double(r.df));
  return r;
}

/// Metric recomputed on `reps` seeded resamples (with replacement). A
/// resample on which the metric is undefined is redrawn, at most 10 times.
/// Equal seeds and sizes reproduce the same index draws, which is how two
/// methods evaluated on the same samples are paired.
inline Vector bootstrap_metric(std::span<const int> y, std::span<const double> probs,
                               Metric metric, std::size_t reps, std::uint64_t seed,
                               double threshold = 0.5) {
  if (y.size() != probs.size()) throw DimensionError("bootstrap_metric: length mismatch");
  if (reps < 2) throw ParameterError("bootstrap_metric: reps must be >= 2");
  if (y.empty()) throw ParameterError("bootstrap_metric: empty evaluation set");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
  Vector out;
  out.reserve(reps);
  std::vector<int> yb(y.size()), lb(y.size());
  Vector pb(y.size());
  for (std::size_t r = 0; r < reps; ++r) {
    std::optional<double> v;
    for (int attempt = 0; attempt <= 10 && !v; ++attempt) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t k = pick(rng);
        yb[i] = y[k];
        pb[i] = probs[k];
        lb[i] = probs[k] >= threshold;
      }
      v = metric_value(evaluate_predictions(yb, pb, lb), metric);
    }
    if (!v) throw DataError("bootstrap_metric: metric undefined on 11 consecutive resamples");
    out.push_back(*v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ROI ranking

enum class RoiFilter { correct_positives, all };

struct RoiWeight {
  std::size_t roi_index = 0;  // 1-based atlas index
  std::string roi_name;
  double weight = 0.0;   // mean attention weight
  double shifted = 0.0;  // weight − min(weights)
};

struct RoiRanking {
  std::vector<RoiWeight> entries;  // descending by weight, ties by ascending index
  std::size_t samples_used = 0;
};

/// Averages the per-sample attention vectors of the selected samples. With
/// `correct_positives`, only samples predicted 1 whose reference label is 1
/// are used.
inline RoiRanking rank_rois(const ModelParams& p, const FeatureStats& stats, const Dataset& ds,
                            RoiFilter filter, std::span<const int> reference_labels = {},
                            double threshold = 0.5) {
  if (ds.empty()) throw DataError("rank_rois: empty dataset");
  if (ds.feature_count() != p.input_dim()) throw DimensionError("rank_rois: feature count mismatch");
  std::vector<std::size_t> chosen;
  if (filter == RoiFilter::all) {
    chosen.resize(ds.size());
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  } else {
    if (reference_labels.size() != ds.size()) {
      throw DimensionError("rank_rois: reference labels must match the dataset size");
    }
    const Prediction pred = predict(p, stats, ds, threshold);
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (pred.labels[i] == 1 && reference_labels[i] == 1) chosen.push_back(i);
    if (chosen.empty()) {
      throw DataError("rank_rois: no correctly identified positive samples; use filter=all");
    }
  }
  const Matrix x = standardize(ds.subset(chosen).features(), stats);
  const Matrix w = attention_forward(p, x).w;
  const Vector mean = column_means(w);
  const double mn = *std::min_element(mean.begin(), mean.end());
  RoiRanking out;
  out.samples_used = chosen.size();
  for (std::size_t j = 0; j < mean.size(); ++j) {
    out.entries.push_back({j + 1, ds.feature_names[j], mean[j], mean[j] - mn});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RoiWeight& a, const RoiWeight& b) { return a.weight > b.weight; });
  return out;
}

}  // namespace iadt

#endif  // IADT_EVAL_HPP
