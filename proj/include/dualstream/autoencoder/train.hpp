#ifndef DUALSTREAM_AUTOENCODER_TRAIN_HPP
#define DUALSTREAM_AUTOENCODER_TRAIN_HPP

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../random.hpp"
#include "../telemetry.hpp"
#include "../text.hpp"
#include "adam.hpp"
#include "model.hpp"

namespace dualstream::ae {

struct EpochLoss {
  int epoch = 0; ///< 0 = before the first update
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  AutoencoderModel model;
  std::vector<EpochLoss> curve;
};

/// Per-channel mean and population standard deviation over every sample of the
/// corpus. A channel with (numerically) zero spread keeps stddev 1.
inline Normalization compute_normalization(std::span<const Window> windows) {
  constexpr int kChannels = 4;
  Normalization norm;
  norm.mean.assign(kChannels, 0.0);
  norm.stddev.assign(kChannels, 1.0);
  if (windows.empty()) return norm;
  std::vector<double> sum(kChannels, 0.0);
  std::size_t n = 0;
  for (const auto& w : windows) {
    const Matrix x = window_features(w);
    for (int c = 0; c < kChannels; ++c) sum[static_cast<std::size_t>(c)] += x.col(c).sum();
    n += kWindowLength;
  }
  for (int c = 0; c < kChannels; ++c)
    norm.mean[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] / static_cast<double>(n);
  std::vector<double> sq(kChannels, 0.0);
  for (const auto& w : windows) {
    const Matrix x = window_features(w);
    for (int c = 0; c < kChannels; ++c)
      sq[static_cast<std::size_t>(c)] +=
          (x.col(c).array() - norm.mean[static_cast<std::size_t>(c)]).square().sum();
  }
  for (int c = 0; c < kChannels; ++c) {
    const double sd = std::sqrt(sq[static_cast<std::size_t>(c)] / static_cast<double>(n));
    norm.stddev[static_cast<std::size_t>(c)] = sd > 1e-9 ? sd : 1.0;
  }
  return norm;
}

/// Mean loss and mean gradient over a batch, summed in the order given.
inline LossAndGradient batch_gradient(const Parameters& p, std::span<const Matrix> batch) {
  LossAndGradient total;
  bool first = true;
  for (const auto& x : batch) {
    auto lg = backward(p, x);
    if (first) {
      total = std::move(lg);
      first = false;
      continue;
    }
    total.loss += lg.loss;
    auto dst = total.grad.tensors();
    auto src = lg.grad.tensors();
    for (std::size_t k = 0; k < dst.size(); ++k)
      for (std::size_t i = 0; i < dst[k].size(); ++i) dst[k][i] += src[k][i];
  }
  if (batch.empty()) return total;
  const double inv = 1.0 / static_cast<double>(batch.size());
  total.loss *= inv;
  for (auto t : total.grad.tensors())
    for (double& g : t) g *= inv;
  return total;
}

inline double mean_loss(const Parameters& p, std::span<const Matrix> set) {
  if (set.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& x : set) sum += mse_loss(x, forward_trace(p, x).output);
  return sum / static_cast<double>(set.size());
}

namespace detail {

inline void require_normal_corpus(std::span<const Window> windows, const char* what) {
  for (const auto& w : windows)
    if (!w.label || *w.label != Label::Normal)
      throw CorpusError(std::string(what) + " window " + w.mission_id + "#" +
                        std::to_string(w.index) + " is labeled " +
                        (w.label ? std::string(to_string(*w.label)) : std::string("<none>")) +
                        "; training uses Normal windows only");
}

} // namespace detail

/// Fits the autoencoder to Normal windows. Normalization statistics come from the
/// training windows only and are frozen into the returned model. Deterministic
/// for a given seed.
inline TrainResult train(AutoencoderModel model, std::span<const Window> train_windows,
                         std::span<const Window> val_windows, const TrainConfig& cfg) {
  cfg.validate();
  if (train_windows.empty()) throw CorpusError("training corpus is empty");
  detail::require_normal_corpus(train_windows, "training");
  detail::require_normal_corpus(val_windows, "validation");

  model.norm = compute_normalization(train_windows);
  std::vector<Matrix> train_x;
  std::vector<Matrix> val_x;
  train_x.reserve(train_windows.size());
  for (const auto& w : train_windows) train_x.push_back(normalize_features(window_features(w), model.norm));
  for (const auto& w : val_windows) val_x.push_back(normalize_features(window_features(w), model.norm));

  TrainResult result;
  result.curve.push_back({0, mean_loss(model.params, train_x), mean_loss(model.params, val_x)});

  AdamState adam = AdamState::for_topology(model.topology);
  std::vector<std::size_t> order(train_x.size());
  std::vector<Matrix> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_x[order[i]]);
      auto lg = batch_gradient(model.params, batch);
      adam_update(model.params, lg.grad, adam, cfg);
    }
    result.curve.push_back({epoch, mean_loss(model.params, train_x), mean_loss(model.params, val_x)});
  }
  result.model = std::move(model);
  return result;
}

inline void write_loss_curve(std::ostream& out, std::span<const EpochLoss> curve) {
  out << "epoch,train_loss,val_loss\n";
  for (const auto& e : curve)
    out << e.epoch << ',' << text::format_double(e.train_loss) << ','
        << text::format_double(e.val_loss) << '\n';
}

} // namespace dualstream::ae

#endif // DUALSTREAM_AUTOENCODER_TRAIN_HPP
