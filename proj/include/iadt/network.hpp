#ifndef IADT_NETWORK_HPP
#define IADT_NETWORK_HPP

// Attention-weighted autoencoder with a latent classifier.
//
//   x ──attention (d→d, softmax)──▶ w ;  xw = w ⊙ x
//   xw ──enc1 (d→h, relu)──enc2 (h→m, linear)──▶ z
//   z  ──clf (m→1, sigmoid)──▶ ŷ                         (source rows)
//   z  ──dec1 (m→h, relu)──dec2 (h→d, linear)──▶ x̂        (target rows)
//
// Both domains share attention and encoder weights. Gradients are derived by
// hand; the objective is λ1·MMD²(z_s, z_t) + λ2·CE(y, ŷ) + ρ·L1(x_t, x̂_t).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iadt/errors.hpp"
#include "iadt/losses.hpp"
#include "iadt/numerics.hpp"

namespace iadt {

enum class Activation { relu, linear, sigmoid, softmax };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

struct DenseLayer {
  Matrix weights;  // out x in
  Vector biases;   // out
  Activation activation = Activation::linear;

  std::size_t in() const noexcept { return weights.cols(); }
  std::size_t out() const noexcept { return weights.rows(); }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct ModelParams {
  DenseLayer attention;
  DenseLayer enc1;
  DenseLayer enc2;
  DenseLayer dec1;
  DenseLayer dec2;
  DenseLayer clf;

  std::size_t input_dim() const noexcept { return attention.in(); }
  std::size_t hidden_dim() const noexcept { return enc1.out(); }
  std::size_t latent_dim() const noexcept { return enc2.out(); }
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct LayerGrad {
  Matrix weights;
  Vector biases;
};

struct Gradients {
  LayerGrad attention;
  LayerGrad enc1;
  LayerGrad enc2;
  LayerGrad dec1;
  LayerGrad dec2;
  LayerGrad clf;
};

inline constexpr std::array<std::string_view, 6> kLayerNames = {"attention", "enc1", "enc2",
                                                                "dec1",      "dec2", "clf"};
inline constexpr std::array<DenseLayer ModelParams::*, 6> kParamLayers = {
    &ModelParams::attention, &ModelParams::enc1, &ModelParams::enc2,
    &ModelParams::dec1,      &ModelParams::dec2, &ModelParams::clf};
inline constexpr std::array<LayerGrad Gradients::*, 6> kGradLayers = {
    &Gradients::attention, &Gradients::enc1, &Gradients::enc2,
    &Gradients::dec1,      &Gradients::dec2, &Gradients::clf};

inline Gradients zero_gradients(const ModelParams& p) {
  Gradients g;
  for (std::size_t i = 0; i < kParamLayers.size(); ++i) {
    const DenseLayer& l = p.*kParamLayers[i];
    g.*kGradLayers[i] = LayerGrad{Matrix(l.out(), l.in()), Vector(l.out(), 0.0)};
  }
  return g;
}

/// Checks the layer chain d→d→h→m→{1, h→d}.
inline void validate(const ModelParams& p) {
  const std::size_t d = p.attention.out(), h = p.enc1.out(), m = p.enc2.out();
  auto expect = [](const DenseLayer& l, std::size_t out, std::size_t in, std::string_view name) {
    if (l.out() != out || l.in() != in || l.biases.size() != out) {
      throw DimensionError("model layer '" + std::string(name) + "' has inconsistent shape");
    }
  };
  expect(p.attention, d, d, "attention");
  expect(p.enc1, h, d, "enc1");
  expect(p.enc2, m, h, "enc2");
  expect(p.dec1, h, m, "dec1");
  expect(p.dec2, d, h, "dec2");
  expect(p.clf, 1, m, "clf");
}

/// Weights and biases drawn from U(−1/√in, 1/√in), the default initialization
/// of a PyTorch linear layer; deterministic in `seed`.
inline ModelParams init_params(std::size_t d, std::size_t h, std::size_t m, std::uint64_t seed) {
  if (d == 0 || h == 0 || m == 0) throw ParameterError("init_params: dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  auto layer = [&](std::size_t out, std::size_t in, Activation act) {
    const double a = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-a, a);
    DenseLayer l{Matrix(out, in), Vector(out, 0.0), act};
    for (double& w : l.weights.data()) w = u(rng);
    for (double& b : l.biases) b = u(rng);
    return l;
  };
  ModelParams p;
  p.attention = layer(d, d, Activation::softmax);
  p.enc1 = layer(h, d, Activation::relu);
  p.enc2 = layer(m, h, Activation::linear);
  p.dec1 = layer(h, m, Activation::relu);
  p.dec2 = layer(d, h, Activation::linear);
  p.clf = layer(1, m, Activation::sigmoid);
  return p;
}

inline constexpr double kProbClamp = 1e-7;

namespace detail {

// x·Wᵀ + b for every row of x.
inline Matrix affine(const Matrix& x, const DenseLayer& l, const char* what) {
  if (x.cols() != l.in()) {
    throw DimensionError(std::string(what) + ": input has " + std::to_string(x.cols()) +
                         " columns, layer expects " + std::to_string(l.in()));
  }
  Matrix y = matmul_nt(x, l.weights);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < y.cols(); ++c) row[c] += l.biases[c];
  }
  return y;
}

inline Matrix relu(Matrix x) {
  for (double& v : x.data()) v = std::max(v, 0.0);
  return x;
}

inline void softmax_rows(Matrix& x) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      s += v;
    }
    for (double& v : row) v /= s;
  }
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// dst += gᵀ·x  (gradient of a dense layer's weights), bias += colsum(g).
inline void accumulate_layer(LayerGrad& dst, const Matrix& g, const Matrix& x) {
  dst.weights += matmul_tn(g, x);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    auto row = g.row(r);
    for (std::size_t c = 0; c < g.cols(); ++c) dst.biases[c] += row[c];
  }
}

}  // namespace detail

struct AttentionOutput {
  Matrix w;   // batch x d, rows sum to 1
  Matrix xw;  // w ⊙ x
};

inline AttentionOutput attention_forward(const ModelParams& p, const Matrix& x) {
  AttentionOutput out{detail::affine(x, p.attention, "attention_forward"), Matrix()};
  detail::softmax_rows(out.w);
  out.xw = out.w;
  auto xs = x.data();
  auto ws = out.xw.data();
  for (std::size_t i = 0; i < ws.size(); ++i) ws[i] *= xs[i];
  return out;
}

inline Matrix encode(const ModelParams& p, const Matrix& xw) {
  return detail::affine(detail::relu(detail::affine(xw, p.enc1, "encode")), p.enc2, "encode");
}

inline Matrix decode(const ModelParams& p, const Matrix& z) {
  return detail::affine(detail::relu(detail::affine(z, p.dec1, "decode")), p.dec2, "decode");
}

/// Sigmoid probabilities clamped to [1e-7, 1 − 1e-7].
inline Vector classify(const ModelParams& p, const Matrix& z) {
  Matrix logits = detail::affine(z, p.clf, "classify");
  Vector y(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    y[i] = std::clamp(detail::sigmoid(logits(i, 0)), kProbClamp, 1.0 - kProbClamp);
  }
  return y;
}

/// Activations of one domain batch through attention and encoder.
struct EncoderPass {
  Matrix x;
  Matrix w;
  Matrix xw;
  Matrix h_pre;
  Matrix z;
};

struct ForwardCache {
  EncoderPass source;
  EncoderPass target;  // empty in classification-only passes
  Vector logits;       // source rows
  Vector yhat;         // clamped probabilities, source rows
  Matrix g_pre;        // decoder hidden pre-activation, target rows
  Matrix xhat;         // target reconstructions

  bool has_target() const noexcept { return target.x.rows() > 0; }
};

namespace detail {

inline EncoderPass encoder_pass(const ModelParams& p, const Matrix& x) {
  EncoderPass e;
  AttentionOutput a = attention_forward(p, x);
  e.x = x;
  e.w = std::move(a.w);
  e.xw = std::move(a.xw);
  e.h_pre = affine(e.xw, p.enc1, "forward");
  e.z = affine(relu(e.h_pre), p.enc2, "forward");
  return e;
}

inline void classify_into(const ModelParams& p, ForwardCache& c) {
  Matrix logits = affine(c.source.z, p.clf, "forward");
  c.logits = logits.col(0);
  c.yhat.resize(c.logits.size());
  for (std::size_t i = 0; i < c.logits.size(); ++i) {
    c.yhat[i] = std::clamp(sigmoid(c.logits[i]), kProbClamp, 1.0 - kProbClamp);
  }
}

// Backpropagates dL/dz of one domain through encoder and attention.
inline void backward_encoder(const ModelParams& p, const EncoderPass& e, const Matrix& dz,
                             Gradients& g) {
  Matrix h = relu(e.h_pre);
  accumulate_layer(g.enc2, dz, h);
  Matrix dh = matmul(dz, p.enc2.weights);
  auto hp = e.h_pre.data();
  auto dhs = dh.data();
  for (std::size_t i = 0; i < dhs.size(); ++i)
    if (hp[i] <= 0.0) dhs[i] = 0.0;
  accumulate_layer(g.enc1, dh, e.xw);
  Matrix dxw = matmul(dh, p.enc1.weights);

  // xw = w ⊙ x  ⇒ dL/dw = dL/dxw ⊙ x; softmax Jacobian diag(w) − wwᵀ.
  Matrix da(dxw.rows(), dxw.cols());
  for (std::size_t r = 0; r < dxw.rows(); ++r) {
    auto w = e.w.row(r);
    auto x = e.x.row(r);
    auto gx = dxw.row(r);
    auto out = da.row(r);
    double inner = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) inner += gx[c] * x[c] * w[c];
    for (std::size_t c = 0; c < w.size(); ++c) out[c] = w[c] * (gx[c] * x[c] - inner);
  }
  accumulate_layer(g.attention, da, e.x);
}

}  // namespace detail

/// Full pass over a paired source and target batch.
inline ForwardCache forward(const ModelParams& p, const Matrix& x_src, const Matrix& x_tgt) {
  if (x_src.rows() == 0) throw DimensionError("forward: empty source batch");
  if (x_tgt.rows() == 0) throw DimensionError("forward: empty target batch");
  ForwardCache c;
  c.source = detail::encoder_pass(p, x_src);
  c.target = detail::encoder_pass(p, x_tgt);
  detail::classify_into(p, c);
  c.g_pre = detail::affine(c.target.z, p.dec1, "forward");
  c.xhat = detail::affine(detail::relu(c.g_pre), p.dec2, "forward");
  return c;
}

/// Source-only pass (attention, encoder, classifier), used for supervised fine-tuning.
inline ForwardCache forward_supervised(const ModelParams& p, const Matrix& x_src) {
  if (x_src.rows() == 0) throw DimensionError("forward_supervised: empty batch");
  ForwardCache c;
  c.source = detail::encoder_pass(p, x_src);
  detail::classify_into(p, c);
  return c;
}

struct LossWeights {
  double mmd = 0.1;    // λ1
  double cls = 0.1;    // λ2
  double recon = 1.0;  // fixed at 1 in the joint objective
};

struct LossParts {
  double mmd = 0.0;
  double cls = 0.0;
  double recon = 0.0;
};

struct BackwardResult {
  LossParts loss;
  Gradients grads;
};

/// Loss parts and the analytic gradient of
/// w.mmd·MMD² + w.cls·CE + w.recon·L1 with respect to every parameter.
inline BackwardResult backward(const ModelParams& p, const ForwardCache& c,
                               std::span<const int> y_src, const LossWeights& w,
                               const KernelSpec& kernel = KernelSpec::linear()) {
  const std::size_t ns = c.source.x.rows();
  if (y_src.size() != ns) throw DimensionError("backward: label count != source batch rows");
  if (w.mmd < 0.0 || w.cls < 0.0 || w.recon < 0.0) {
    throw ParameterError("backward: negative loss weight");
  }
  if (!c.has_target() && (w.mmd != 0.0 || w.recon != 0.0)) {
    throw DimensionError("backward: MMD and reconstruction terms need a target batch");
  }
  BackwardResult r{{}, zero_gradients(p)};
  Gradients& g = r.grads;
  const std::size_t m = p.latent_dim();

  r.loss.cls = cross_entropy(y_src, c.yhat);
  Matrix dzs(ns, m);
  {
    Matrix dlogit(ns, 1);
    for (std::size_t i = 0; i < ns; ++i) {
      const double s = detail::sigmoid(c.logits[i]);
      // The clamp is flat outside [1e-7, 1 − 1e-7].
      if (s > kProbClamp && s < 1.0 - kProbClamp) {
        dlogit(i, 0) = w.cls * (s - static_cast<double>(y_src[i])) / static_cast<double>(ns);
      }
    }
    detail::accumulate_layer(g.clf, dlogit, c.source.z);
    dzs += matmul(dlogit, p.clf.weights);
  }

  if (c.has_target()) {
    const std::size_t nt = c.target.x.rows();
    r.loss.mmd = mmd_sq(c.source.z, c.target.z, kernel);
    r.loss.recon = l1_recon(c.target.x, c.xhat);

    Matrix dzt(nt, m);
    if (w.mmd != 0.0) {
      auto [gs, gt] = mmd_sq_grad(c.source.z, c.target.z, kernel);
      dzs += gs * w.mmd;
      dzt += gt * w.mmd;
    }

    Matrix dxhat(nt, p.input_dim());
    auto xs = c.target.x.data();
    auto xh = c.xhat.data();
    auto dx = dxhat.data();
    const double scale = w.recon / static_cast<double>(nt);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double diff = xh[i] - xs[i];
      dx[i] = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
    }
    Matrix gact = detail::relu(c.g_pre);
    detail::accumulate_layer(g.dec2, dxhat, gact);
    Matrix dg = matmul(dxhat, p.dec2.weights);
    auto gp = c.g_pre.data();
    auto dgs = dg.data();
    for (std::size_t i = 0; i < dgs.size(); ++i)
      if (gp[i] <= 0.0) dgs[i] = 0.0;
    detail::accumulate_layer(g.dec1, dg, c.target.z);
    dzt += matmul(dg, p.dec1.weights);

    detail::backward_encoder(p, c.target, dzt, g);
  }
  detail::backward_encoder(p, c.source, dzs, g);
  return r;
}

/// Joint objective with reconstruction weight 1.
inline BackwardResult backward(const ModelParams& p, const ForwardCache& c,
                               std::span<const int> y_src, double lambda1, double lambda2,
                               const KernelSpec& kernel = KernelSpec::linear()) {
  return backward(p, c, y_src, LossWeights{lambda1, lambda2, 1.0}, kernel);
}

}  // namespace iadt

#endif  // IADT_NETWORK_HPP
