#ifndef DUALSTREAM_AUTOENCODER_ADAM_HPP
#define DUALSTREAM_AUTOENCODER_ADAM_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "../error.hpp"
#include "model.hpp"

namespace dualstream::ae {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 42;
  double clip_norm = 1.0; ///< global-norm clip; <= 0 disables

  void validate() const {
    if (!(learning_rate > 0.0)) throw InvalidParams("learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw InvalidParams("beta1 must lie in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw InvalidParams("beta2 must lie in (0,1)");
    if (!(epsilon > 0.0)) throw InvalidParams("epsilon must be > 0");
    if (epochs < 0) throw InvalidParams("epochs must be >= 0");
    if (batch_size < 1) throw InvalidParams("batch_size must be >= 1");
  }
};

struct AdamState {
  Parameters m;
  Parameters v;
  std::uint64_t step = 0;

  static AdamState for_topology(const Topology& topo) {
    return {Parameters::zeros(topo), Parameters::zeros(topo), 0};
  }
};

inline double global_norm(const Parameters& grads) {
  double sq = 0.0;
  for (auto t : grads.tensors())
    for (double g : t) sq += g * g;
  return std::sqrt(sq);
}

/// Scales the gradient so its global L2 norm is at most `max_norm`. Returns the
/// factor applied.
inline double clip_global_norm(Parameters& grads, double max_norm) {
  if (!(max_norm > 0.0)) return 1.0;
  const double norm = global_norm(grads);
  if (!(norm > max_norm)) return 1.0;
  const double scale = max_norm / norm;
  for (auto t : grads.tensors())
    for (double& g : t) g *= scale;
  return scale;
}

/// Bias-corrected Adam on flat arrays. `step` is the 1-based update index.
inline void adam_update(std::span<double> params, std::span<const double> grads,
                        std::span<double> m, std::span<double> v, std::uint64_t step,
                        const TrainConfig& cfg) {
  if (step < 1) throw InvalidParams("adam_update: step index starts at 1");
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size())
    throw ShapeError("adam_update: size mismatch");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

/// Clips `grads` in place, then applies one Adam step to every tensor.
inline void adam_update(Parameters& params, Parameters& grads, AdamState& state,
                        const TrainConfig& cfg) {
  clip_global_norm(grads, cfg.clip_norm);
  ++state.step;
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) adam_update(p[k], g[k], m[k], v[k], state.step, cfg);
}

} // namespace dualstream::ae

#endif // DUALSTREAM_AUTOENCODER_ADAM_HPP
