#ifndef DUALSTREAM_AUTOENCODER_MODEL_HPP
#define DUALSTREAM_AUTOENCODER_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../random.hpp"
#include "../telemetry.hpp"
#include "lstm.hpp"

namespace dualstream::ae {

/// Encoder widths; the decoder runs the same widths in reverse.
struct Topology {
  int input_dim = 4;
  std::vector<int> encoder_hidden{32, 16, 8};

  static Topology desk() { return {4, {32, 16, 8}}; }
  static Topology paper() { return {4, {128, 64, 32}}; }

  std::vector<int> decoder_hidden() const {
    return {encoder_hidden.rbegin(), encoder_hidden.rend()};
  }
  int latent_dim() const { return encoder_hidden.back(); }

  void validate() const {
    if (input_dim < 1) throw ShapeError("topology: input_dim must be >= 1");
    if (encoder_hidden.empty()) throw ShapeError("topology: at least one encoder layer");
    for (int w : encoder_hidden)
      if (w < 1) throw ShapeError("topology: layer widths must be >= 1");
  }

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Every trainable tensor. Gradients and Adam moments reuse this type.
struct Parameters {
  std::vector<LstmLayer> encoder;
  std::vector<LstmLayer> decoder;
  Matrix out_w; // input_dim x last decoder width
  Vector out_b; // input_dim

  static Parameters zeros(const Topology& topo) {
    topo.validate();
    Parameters p;
    int in = topo.input_dim;
    for (int h : topo.encoder_hidden) {
      p.encoder.emplace_back(in, h);
      in = h;
    }
    in = topo.latent_dim();
    for (int h : topo.decoder_hidden()) {
      p.decoder.emplace_back(in, h);
      in = h;
    }
    p.out_w = Matrix::Zero(topo.input_dim, in);
    p.out_b = Vector::Zero(topo.input_dim);
    return p;
  }

  /// Flat views over every tensor in declared order: encoder layers (w, u, b),
  /// decoder layers (w, u, b), out_w, out_b.
  std::vector<std::span<double>> tensors() {
    std::vector<std::span<double>> out;
    auto add = [&out](auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
    for (auto* stack : {&encoder, &decoder})
      for (auto& layer : *stack) {
        add(layer.w);
        add(layer.u);
        add(layer.b);
      }
    add(out_w);
    add(out_b);
    return out;
  }

  std::vector<std::span<const double>> tensors() const {
    auto views = const_cast<Parameters*>(this)->tensors();
    return {views.begin(), views.end()};
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto t : tensors()) n += t.size();
    return n;
  }

  void set_zero() {
    for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
  }
};

struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct AutoencoderModel {
  Topology topology;
  Parameters params;
  Normalization norm;
  std::uint32_t format_version = kModelFormatVersion;
};

/// Uniform(+-1/sqrt(fan_in)) per matrix, zero biases except forget gate = 1.
inline AutoencoderModel init_model(const Topology& topo, std::uint64_t seed) {
  AutoencoderModel model;
  model.topology = topo;
  model.params = Parameters::zeros(topo);
  Rng rng(seed);
  auto fill = [&rng](Matrix& m) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  };
  for (auto* stack : {&model.params.encoder, &model.params.decoder})
    for (auto& layer : *stack) {
      fill(layer.w);
      fill(layer.u);
      layer.b_gate(Gate::Forget).setOnes();
    }
  fill(model.params.out_w);
  model.norm.mean.assign(static_cast<std::size_t>(topo.input_dim), 0.0);
  model.norm.stddev.assign(static_cast<std::size_t>(topo.input_dim), 1.0);
  return model;
}

/// Raw (a_x, a_y, a_z, v) feature matrix, one row per sample.
inline Matrix window_features(const Window& w) {
  Matrix x(static_cast<Eigen::Index>(kWindowLength), 4);
  for (std::size_t i = 0; i < kWindowLength; ++i) {
    const auto& s = w.samples[i];
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = s.a_x;
    x(r, 1) = s.a_y;
    x(r, 2) = s.a_z;
    x(r, 3) = s.v;
  }
  return x;
}

inline Matrix normalize_features(const Matrix& raw, const Normalization& norm) {
  if (raw.cols() != static_cast<Eigen::Index>(norm.mean.size()))
    throw ShapeError("normalize_features: channel count mismatch");
  Matrix x = raw;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    x.col(c) = (x.col(c).array() - norm.mean[k]) / norm.stddev[k];
  }
  return x;
}

/// Everything the backward pass needs from one forward pass.
struct ForwardTrace {
  std::vector<LstmTrace> encoder;
  std::vector<LstmTrace> decoder;
  Matrix output;
};

/// Encoder consumes the sequence; its final hidden state is repeated once per
/// step as the decoder input; the decoder output is projected back to input_dim.
inline ForwardTrace forward_trace(const Parameters& p, const Matrix& x) {
  if (p.encoder.empty() || x.cols() != p.encoder.front().input_size() || x.rows() < 1)
    throw ShapeError("forward: window has " + std::to_string(x.cols()) +
                     " channels, model expects " +
                     std::to_string(p.encoder.empty() ? 0 : p.encoder.front().input_size()));
  ForwardTrace tr;
  const auto steps = x.rows();
  const Matrix* in = &x;
  for (const auto& layer : p.encoder) {
    tr.encoder.push_back(lstm_sequence(*in, layer));
    in = &tr.encoder.back().hidden;
  }
  const Vector latent = tr.encoder.back().hidden.row(steps - 1).transpose();
  Matrix repeated = latent.transpose().replicate(steps, 1);
  in = &repeated;
  for (const auto& layer : p.decoder) {
    tr.decoder.push_back(lstm_sequence(*in, layer));
    in = &tr.decoder.back().hidden;
  }
  tr.output = (*in) * p.out_w.transpose();
  tr.output.rowwise() += p.out_b.transpose();
  return tr;
}

/// Reconstruction of an already-normalized window.
inline Matrix forward(const AutoencoderModel& model, const Matrix& normalized) {
  return forward_trace(model.params, normalized).output;
}

/// RMS over every element of the difference.
inline double reconstruction_error(const Matrix& input, const Matrix& reconstruction) {
  if (input.rows() != reconstruction.rows() || input.cols() != reconstruction.cols())
    throw ShapeError("reconstruction_error: shape mismatch");
  if (input.size() == 0) return 0.0;
  return std::sqrt((input - reconstruction).squaredNorm() / static_cast<double>(input.size()));
}

inline double mse_loss(const Matrix& input, const Matrix& reconstruction) {
  const double rms = reconstruction_error(input, reconstruction);
  return rms * rms;
}

struct LossAndGradient {
  double loss = 0.0;
  Parameters grad;
};

/// Mean-squared reconstruction loss of one normalized window and its gradient
/// with respect to every parameter (BPTT through decoder, repeat-vector and encoder).
inline LossAndGradient backward(const Parameters& p, const Matrix& x) {
  const auto tr = forward_trace(p, x);
  const auto steps = x.rows();
  const double n = static_cast<double>(x.size());

  LossAndGradient out;
  out.grad.encoder.reserve(p.encoder.size());
  for (const auto& l : p.encoder) out.grad.encoder.emplace_back(l.input_size(), l.hidden_size());
  for (const auto& l : p.decoder) out.grad.decoder.emplace_back(l.input_size(), l.hidden_size());

  const Matrix diff = tr.output - x;
  out.loss = diff.squaredNorm() / n;
  const Matrix d_out = (2.0 / n) * diff; // T x d

  const Matrix& dec_top = tr.decoder.back().hidden;
  out.grad.out_w = d_out.transpose() * dec_top;
  out.grad.out_b = d_out.colwise().sum().transpose();

  Matrix d_h = d_out * p.out_w; // T x last decoder width
  for (std::size_t k = p.decoder.size(); k-- > 0;)
    d_h = lstm_sequence_backward(tr.decoder[k], p.decoder[k], d_h, out.grad.decoder[k]);

  // Repeat-vector: every decoder step read the same latent, so its gradient sums.
  Matrix d_enc = Matrix::Zero(steps, p.encoder.back().hidden_size());
  d_enc.row(steps - 1) = d_h.colwise().sum();
  for (std::size_t k = p.encoder.size(); k-- > 0;)
    d_enc = lstm_sequence_backward(tr.encoder[k], p.encoder[k], d_enc, out.grad.encoder[k]);
  return out;
}

/// Stream A anomaly score: normalize, reconstruct, RMS error.
inline double score(const AutoencoderModel& model, const Window& w) {
  const Matrix x = normalize_features(window_features(w), model.norm);
  return reconstruction_error(x, forward(model, x));
}

} // namespace dualstream::ae

#endif // DUALSTREAM_AUTOENCODER_MODEL_HPP
