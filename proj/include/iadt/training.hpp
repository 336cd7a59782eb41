#ifndef IADT_TRAINING_HPP
#define IADT_TRAINING_HPP

// Adam optimization of the joint objective over paired source/target
// batches, inference, latent export and supervised fine-tuning.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "iadt/data.hpp"
#include "iadt/errors.hpp"
#include "iadt/losses.hpp"
#include "iadt/model_io.hpp"
#include "iadt/network.hpp"

namespace iadt {

struct TrainConfig {
  std::size_t latent_dim = 32;
  std::size_t hidden_dim = 64;
  double lambda1 = 0.1;  // MMD weight
  double lambda2 = 0.1;  // classification weight
  double lr = 0.001;
  std::size_t epochs = 60;
  std::size_t batch_size = 128;
  KernelSpec kernel = KernelSpec::linear();
  std::uint64_t seed = 0;
  bool standardize = true;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline void validate(const TrainConfig& c) {
  if (c.latent_dim == 0) throw ParameterError("config: latent_dim must be >= 1");
  if (c.hidden_dim == 0) throw ParameterError("config: hidden_dim must be >= 1");
  if (c.batch_size == 0) throw ParameterError("config: batch_size must be >= 1");
  if (!(c.lambda1 >= 0.0) || !std::isfinite(c.lambda1)) throw ParameterError("config: lambda1 must be >= 0");
  if (!(c.lambda2 >= 0.0) || !std::isfinite(c.lambda2)) throw ParameterError("config: lambda2 must be >= 0");
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) throw ParameterError("config: lr must be > 0");
  if (c.kernel.kind == KernelKind::rbf && !(c.kernel.gamma > 0.0)) {
    throw ParameterError("config: gamma must be > 0 for the rbf kernel");
  }
}

inline constexpr std::array<std::string_view, 11> kConfigKeys = {
    "latent_dim", "hidden_dim", "lambda1", "lambda2",  "lr",         "epochs",
    "batch_size", "kernel",     "gamma",   "seed",     "standardize"};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    if (v.empty() || v.front() == '-') throw std::invalid_argument(v);
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ParameterError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  if (pos != v.size()) {
    throw ParameterError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(n);
}

inline double parse_real(const std::string& key, const std::string& v) {
  auto d = parse_double(v);
  if (!d) throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
  return *d;
}

}  // namespace detail

/// Applies one `key=value` setting. Unknown keys and malformed values throw ParameterError.
inline void set_config_value(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "latent_dim") {
    c.latent_dim = detail::parse_count(key, value);
  } else if (key == "hidden_dim") {
    c.hidden_dim = detail::parse_count(key, value);
  } else if (key == "lambda1") {
    c.lambda1 = detail::parse_real(key, value);
  } else if (key == "lambda2") {
    c.lambda2 = detail::parse_real(key, value);
  } else if (key == "lr") {
    c.lr = detail::parse_real(key, value);
  } else if (key == "epochs") {
    c.epochs = detail::parse_count(key, value);
  } else if (key == "batch_size") {
    c.batch_size = detail::parse_count(key, value);
  } else if (key == "kernel") {
    if (value == "linear") {
      c.kernel.kind = KernelKind::linear;
    } else if (value == "rbf") {
      c.kernel.kind = KernelKind::rbf;
    } else {
      throw ParameterError("config: kernel must be 'linear' or 'rbf', got '" + value + "'");
    }
  } else if (key == "gamma") {
    c.kernel.gamma = detail::parse_real(key, value);
  } else if (key == "seed") {
    c.seed = detail::parse_count(key, value);
  } else if (key == "standardize") {
    if (value == "true" || value == "1" || value == "on") {
      c.standardize = true;
    } else if (value == "false" || value == "0" || value == "off") {
      c.standardize = false;
    } else {
      throw ParameterError("config: standardize must be true/false, got '" + value + "'");
    }
  } else {
    throw ParameterError("config: unknown key '" + key + "'");
  }
}

/// Line-oriented `key=value`; blank lines and `#` comments are skipped.
inline TrainConfig parse_config(std::istream& in, TrainConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    set_config_value(base, std::string(detail::trim(t.substr(0, eq))),
                     std::string(detail::trim(t.substr(eq + 1))));
  }
  validate(base);
  return base;
}

inline TrainConfig load_config(const std::string& path, TrainConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

inline std::string format_config(const TrainConfig& c) {
  std::ostringstream o;
  o << "latent_dim=" << c.latent_dim << '\n'
    << "hidden_dim=" << c.hidden_dim << '\n'
    << "lambda1=" << detail::format_double(c.lambda1) << '\n'
    << "lambda2=" << detail::format_double(c.lambda2) << '\n'
    << "lr=" << detail::format_double(c.lr) << '\n'
    << "epochs=" << c.epochs << '\n'
    << "batch_size=" << c.batch_size << '\n'
    << "kernel=" << (c.kernel.kind == KernelKind::linear ? "linear" : "rbf") << '\n'
    << "gamma=" << detail::format_double(c.kernel.gamma) << '\n'
    << "seed=" << c.seed << '\n'
    << "standardize=" << (c.standardize ? "true" : "false") << '\n';
  return o.str();
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  Gradients m;
  Gradients v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState fresh(const ModelParams& p) { return {zero_gradients(p), zero_gradients(p)}; }
};

/// Which layers an optimizer step may change, in kLayerNames order.
using LayerMask = std::array<bool, 6>;
inline constexpr LayerMask kAllLayers = {true, true, true, true, true, true};
inline constexpr LayerMask kSupervisedLayers = {true, true, true, false, false, true};

/// In-place bias-corrected Adam update.
inline void adam_update(ModelParams& p, const Gradients& g, AdamState& s, double lr,
                        const LayerMask& mask = kAllLayers) {
  ++s.t;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  auto update = [&](std::span<double> theta, std::span<const double> grad, std::span<double> m,
                    std::span<double> v) {
    if (theta.size() != grad.size() || m.size() != grad.size() || v.size() != grad.size()) {
      throw DimensionError("adam_step: parameter/gradient shape mismatch");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grad[i];
      v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      theta[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
    }
  };
  for (std::size_t i = 0; i < kParamLayers.size(); ++i) {
    if (!mask[i]) continue;
    DenseLayer& l = p.*kParamLayers[i];
    const LayerGrad& gl = g.*kGradLayers[i];
    LayerGrad& ml = s.m.*kGradLayers[i];
    LayerGrad& vl = s.v.*kGradLayers[i];
    if (gl.weights.rows() != l.out() || gl.weights.cols() != l.in()) {
      throw DimensionError("adam_step: gradient shape mismatch in layer " +
                           std::string(kLayerNames[i]));
    }
    update(l.weights.data(), gl.weights.data(), ml.weights.data(), vl.weights.data());
    update(l.biases, gl.biases, ml.biases, vl.biases);
  }
}

struct AdamResult {
  ModelParams params;
  AdamState state;
};

inline AdamResult adam_step(ModelParams p, const Gradients& g, AdamState s, double lr) {
  adam_update(p, g, s, lr);
  return {std::move(p), std::move(s)};
}

// ---------------------------------------------------------------------------
// Training

struct EpochRecord {
  double mmd = 0.0;
  double cls = 0.0;
  double recon = 0.0;
  double total = 0.0;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

using TrainHistory = std::vector<EpochRecord>;

struct TrainResult {
  TrainedModel model;
  TrainHistory history;
};

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// Seeded shuffle of 0..count-1 cycled to length n (copy counts differ by <= 1).
inline std::vector<std::size_t> cycled_indices(std::size_t count, std::size_t n,
                                               std::mt19937_64& rng) {
  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = perm[i % count];
  return out;
}

inline void require_compatible(const Dataset& a, const Dataset& b, const char* what) {
  if (a.feature_count() != b.feature_count()) {
    throw DimensionError(std::string(what) + ": feature count " + std::to_string(a.feature_count()) +
                         " vs " + std::to_string(b.feature_count()));
  }
}

inline std::vector<int> gather(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

}  // namespace detail

/// Joint training. Each epoch the target set is re-duplicated to the source
/// size, both sides are shuffled, and paired batches of `batch_size` rows per
/// domain drive one Adam step each. A trailing batch with fewer than 2 rows is
/// dropped.
inline TrainResult train(const Dataset& source, const Dataset& target, const TrainConfig& cfg) {
  validate(cfg);
  if (source.empty()) throw DataError("train: empty source domain");
  if (target.empty()) throw DataError("train: empty target domain");
  if (!source.all_labeled()) throw DataError("train: every source sample must be labeled");
  detail::require_compatible(source, target, "train");

  const std::size_t d = source.feature_count();
  FeatureStats stats = cfg.standardize ? fit_standardizer(source) : FeatureStats::identity(d);
  const Matrix xs = standardize(source.features(), stats);
  const Matrix xt = standardize(target.features(), stats);
  const std::vector<int> ys = source.labels();

  TrainResult res{{init_params(d, cfg.hidden_dim, cfg.latent_dim, cfg.seed), std::move(stats)}, {}};
  ModelParams& p = res.model.params;
  AdamState adam = AdamState::fresh(p);

  const std::size_t ns = xs.rows();
  const std::size_t nt = xt.rows();
  const std::size_t n = std::max(ns, nt);
  const LossWeights weights{cfg.lambda1, cfg.lambda2, 1.0};

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, 1, epoch));
    // Source is only cycled when it is the smaller domain.
    std::vector<std::size_t> si = detail::cycled_indices(ns, n, rng);
    std::vector<std::size_t> ti = detail::cycled_indices(nt, n, rng);
    std::shuffle(ti.begin(), ti.end(), rng);

    EpochRecord rec;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, n);
      if (end - start < 2) break;
      std::span<const std::size_t> sb(si.data() + start, end - start);
      std::span<const std::size_t> tb(ti.data() + start, end - start);
      const ForwardCache cache = forward(p, xs.select_rows(sb), xt.select_rows(tb));
      const std::vector<int> yb = detail::gather(ys, sb);
      BackwardResult br = backward(p, cache, yb, weights, cfg.kernel);
      adam_update(p, br.grads, adam, cfg.lr);
      rec.mmd += br.loss.mmd;
      rec.cls += br.loss.cls;
      rec.recon += br.loss.recon;
      ++batches;
    }
    if (batches > 0) {
      const double b = static_cast<double>(batches);
      rec.mmd /= b;
      rec.cls /= b;
      rec.recon /= b;
    }
    rec.total = total_loss(rec.mmd, rec.cls, rec.recon, cfg.lambda1, cfg.lambda2);
    res.history.push_back(rec);
  }
  return res;
}

struct Prediction {
  Vector probs;
  std::vector<int> labels;
};

inline Prediction predict(const ModelParams& p, const FeatureStats& stats, const Dataset& ds,
                          double threshold = 0.5) {
  if (ds.feature_count() != p.input_dim() || stats.size() != p.input_dim()) {
    throw DimensionError("predict: dataset has " + std::to_string(ds.feature_count()) +
                         " features, model expects " + std::to_string(p.input_dim()));
  }
  Prediction out;
  if (ds.empty()) return out;
  const Matrix x = standardize(ds.features(), stats);
  out.probs = classify(p, encode(p, attention_forward(p, x).xw));
  out.labels.resize(out.probs.size());
  for (std::size_t i = 0; i < out.probs.size(); ++i) out.labels[i] = out.probs[i] >= threshold;
  return out;
}

inline Prediction predict(const TrainedModel& m, const Dataset& ds, double threshold = 0.5) {
  return predict(m.params, m.stats, ds, threshold);
}

/// Latent codes of every sample (rows follow ds).
inline Matrix latent_codes(const ModelParams& p, const FeatureStats& stats, const Dataset& ds) {
  if (ds.feature_count() != p.input_dim() || stats.size() != p.input_dim()) {
    throw DimensionError("latent_codes: feature count mismatch");
  }
  if (ds.empty()) return Matrix(0, p.latent_dim());
  const Matrix x = standardize(ds.features(), stats);
  return encode(p, attention_forward(p, x).xw);
}

inline void write_latent_csv(std::ostream& out, const ModelParams& p, const FeatureStats& stats,
                             const Dataset& ds) {
  const Matrix z = latent_codes(p, stats, ds);
  out << "subject_id,domain,label";
  for (std::size_t j = 0; j < p.latent_dim(); ++j) out << ",z_" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Sample& s = ds.samples[i];
    out << s.subject_id << ',' << to_string(s.domain) << ','
        << (s.label ? std::to_string(*s.label) : std::string("NA"));
    for (double v : z.row(i)) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

inline void export_latent(const ModelParams& p, const FeatureStats& stats, const Dataset& ds,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_latent_csv(out, p, stats, ds);
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Continues training of attention, encoder and classifier on labeled data
/// with cross-entropy only, from a fresh optimizer state. The decoder and the
/// standardizer are left untouched.
inline TrainedModel finetune(const TrainedModel& start, const Dataset& labeled,
                             const TrainConfig& cfg) {
  validate(cfg);
  if (!labeled.all_labeled()) throw DataError("finetune: every sample must be labeled");
  if (labeled.feature_count() != start.params.input_dim()) {
    throw DimensionError("finetune: feature count mismatch");
  }
  TrainedModel out = start;
  if (cfg.epochs == 0 || labeled.empty()) return out;
  const Matrix x = standardize(labeled.features(), out.stats);
  const std::vector<int> y = labeled.labels();
  AdamState adam = AdamState::fresh(out.params);
  const LossWeights weights{0.0, 1.0, 0.0};
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, 2, epoch));
    std::vector<std::size_t> idx = detail::cycled_indices(x.rows(), x.rows(), rng);
    for (std::size_t start_row = 0; start_row < idx.size(); start_row += cfg.batch_size) {
      const std::size_t end = std::min(start_row + cfg.batch_size, idx.size());
      std::span<const std::size_t> b(idx.data() + start_row, end - start_row);
      const ForwardCache cache = forward_supervised(out.params, x.select_rows(b));
      const std::vector<int> yb = detail::gather(y, b);
      BackwardResult br = backward(out.params, cache, yb, weights);
      adam_update(out.params, br.grads, adam, cfg.lr, kSupervisedLayers);
    }
  }
  return out;
}

/// Overload taking bare parameters and their standardizer.
inline ModelParams finetune(const ModelParams& p, const FeatureStats& stats,
                            const Dataset& labeled, const TrainConfig& cfg) {
  return finetune(TrainedModel{p, stats}, labeled, cfg).params;
}

}  // namespace iadt

#endif  // IADT_TRAINING_HPP
