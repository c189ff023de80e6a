#ifndef DUALSTREAM_AUTOENCODER_LSTM_HPP
#define DUALSTREAM_AUTOENCODER_LSTM_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../error.hpp"

namespace dualstream::ae {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Gate : int { Input = 0, Forget = 1, Cell = 2, Output = 3 };

/// One LSTM layer. The four gate matrices are stacked row-wise in the order
/// input, forget, cell candidate, output:
///   w: (4h x in), u: (4h x h), b: (4h).
struct LstmLayer {
  Matrix w;
  Matrix u;
  Vector b;

  LstmLayer() = default;
  LstmLayer(Eigen::Index input, Eigen::Index hidden)
      : w(Matrix::Zero(4 * hidden, input)),
        u(Matrix::Zero(4 * hidden, hidden)),
        b(Vector::Zero(4 * hidden)) {}

  Eigen::Index input_size() const { return w.cols(); }
  Eigen::Index hidden_size() const { return u.cols(); }

  auto w_gate(Gate g) { return w.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
  auto u_gate(Gate g) { return u.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
  auto b_gate(Gate g) { return b.segment(static_cast<int>(g) * hidden_size(), hidden_size()); }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w.size() + u.size() + b.size());
  }
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zero(Eigen::Index hidden) {
    return {Vector::Zero(hidden), Vector::Zero(hidden)};
  }
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace detail

/// Single cell update: i,f,o = sigmoid; g = tanh; c' = f*c + i*g; h' = o*tanh(c').
inline LstmState lstm_step(const Vector& x, const LstmState& state, const LstmLayer& layer) {
  const auto h = layer.hidden_size();
  if (x.size() != layer.input_size() || state.h.size() != h || state.c.size() != h)
    throw ShapeError("lstm_step: input " + std::to_string(x.size()) + "/state " +
                     std::to_string(state.h.size()) + " do not match layer " +
                     std::to_string(layer.input_size()) + "->" + std::to_string(h));
  const Vector a = layer.w * x + layer.u * state.h + layer.b;
  LstmState next{Vector(h), Vector(h)};
  for (Eigen::Index j = 0; j < h; ++j) {
    const double i = detail::sigmoid(a[j]);
    const double f = detail::sigmoid(a[h + j]);
    const double g = std::tanh(a[2 * h + j]);
    const double o = detail::sigmoid(a[3 * h + j]);
    next.c[j] = f * state.c[j] + i * g;
    next.h[j] = o * std::tanh(next.c[j]);
  }
  return next;
}

/// Activations of one layer over a whole sequence, kept for backpropagation.
/// Row t of every matrix belongs to time step t.
struct LstmTrace {
  Matrix input;  // T x in
  Matrix gates;  // T x 4h, post-activation (i, f, g, o)
  Matrix cell;   // T x h
  Matrix hidden; // T x h
};

/// Runs a layer over a sequence (rows = time steps) from a zero state.
inline LstmTrace lstm_sequence(const Matrix& input, const LstmLayer& layer) {
  const auto steps = input.rows();
  const auto h = layer.hidden_size();
  if (input.cols() != layer.input_size())
    throw ShapeError("lstm_sequence: sequence width " + std::to_string(input.cols()) +
                     " != layer input " + std::to_string(layer.input_size()));
  LstmTrace trace;
  trace.input = input;
  trace.gates.resize(steps, 4 * h);
  trace.cell.resize(steps, h);
  trace.hidden.resize(steps, h);

  // Input projections for all steps at once; recurrence is added per step.
  const Matrix xw = input * layer.w.transpose();
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  Vector a(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    a.noalias() = layer.u * h_prev;
    a += xw.row(t).transpose() + layer.b;
    for (Eigen::Index j = 0; j < h; ++j) {
      const double i = detail::sigmoid(a[j]);
      const double f = detail::sigmoid(a[h + j]);
      const double g = std::tanh(a[2 * h + j]);
      const double o = detail::sigmoid(a[3 * h + j]);
      const double c = f * c_prev[j] + i * g;
      trace.gates(t, j) = i;
      trace.gates(t, h + j) = f;
      trace.gates(t, 2 * h + j) = g;
      trace.gates(t, 3 * h + j) = o;
      trace.cell(t, j) = c;
      trace.hidden(t, j) = o * std::tanh(c);
    }
    h_prev = trace.hidden.row(t).transpose();
    c_prev = trace.cell.row(t).transpose();
  }
  return trace;
}

/// Backpropagation through time for one layer. `d_hidden` holds dL/dh_t coming
/// from above for every step (T x h). Parameter gradients are accumulated into
/// `grad`; the return value is dL/dx_t (T x in).
inline Matrix lstm_sequence_backward(const LstmTrace& trace, const LstmLayer& layer,
                                     const Matrix& d_hidden, LstmLayer& grad) {
  const auto steps = trace.input.rows();
  const auto h = layer.hidden_size();
  Matrix d_pre(steps, 4 * h);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  Vector da(4 * h);

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    for (Eigen::Index j = 0; j < h; ++j) {
      const double i = trace.gates(t, j);
      const double f = trace.gates(t, h + j);
      const double g = trace.gates(t, 2 * h + j);
      const double o = trace.gates(t, 3 * h + j);
      const double c = trace.cell(t, j);
      const double c_prev = t > 0 ? trace.cell(t - 1, j) : 0.0;
      const double tc = std::tanh(c);

      const double dh = d_hidden(t, j) + dh_next[j];
      const double d_o = dh * tc;
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
      const double d_i = dc * g;
      const double d_g = dc * i;
      const double d_f = dc * c_prev;
      dc_next[j] = dc * f;

      da[j] = d_i * i * (1.0 - i);
      da[h + j] = d_f * f * (1.0 - f);
      da[2 * h + j] = d_g * (1.0 - g * g);
      da[3 * h + j] = d_o * o * (1.0 - o);
    }
    d_pre.row(t) = da.transpose();
    dh_next.noalias() = layer.u.transpose() * da;
  }

  grad.w.noalias() += d_pre.transpose() * trace.input;
  if (steps > 1)
    grad.u.noalias() += d_pre.bottomRows(steps - 1).transpose() * trace.hidden.topRows(steps - 1);
  grad.b += d_pre.colwise().sum().transpose();
  return d_pre * layer.w;
}

} // namespace dualstream::ae

#endif // DUALSTREAM_AUTOENCODER_LSTM_HPP
