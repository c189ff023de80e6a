#ifndef DUALSTREAM_CONFIG_HPP
#define DUALSTREAM_CONFIG_HPP

#include <istream>
#include <string>

#include "autoencoder/adam.hpp"
#include "error.hpp"
#include "fusion.hpp"
#include "physics.hpp"
#include "text.hpp"

namespace dualstream {

/// Tunables read from a key=value file. Unknown keys are an error so typos surface.
struct RunConfig {
  physics::PhysicsParams physics;
  ae::TrainConfig train;
  fusion::FusionOptions fusion;
};

inline RunConfig read_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(ParseErrorKind::BadMetadata, line_no, "expected key=value");
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    if (key == "aggregate") {
      if (value == "max") cfg.fusion.aggregate = fusion::Aggregate::Max;
      else if (value == "mean") cfg.fusion.aggregate = fusion::Aggregate::Mean;
      else throw ParseError(ParseErrorKind::BadMetadata, line_no, "aggregate must be max or mean");
      continue;
    }
    const auto num = text::parse_double(value);
    if (!num) throw ParseError(ParseErrorKind::MalformedField, line_no, std::string(key));
    const double x = *num;
    if (key == "g") cfg.physics.g = x;
    else if (key == "c_rr") cfg.physics.c_rr = x;
    else if (key == "learning_rate") cfg.train.learning_rate = x;
    else if (key == "beta1") cfg.train.beta1 = x;
    else if (key == "beta2") cfg.train.beta2 = x;
    else if (key == "epsilon") cfg.train.epsilon = x;
    else if (key == "epochs") cfg.train.epochs = static_cast<int>(x);
    else if (key == "batch_size") cfg.train.batch_size = static_cast<int>(x);
    else if (key == "clip_norm") cfg.train.clip_norm = x;
    else if (key == "tau_ml") cfg.fusion.thresholds.ml = x;
    else if (key == "tau_phys") cfg.fusion.thresholds.phys = x;
    else throw ParseError(ParseErrorKind::BadMetadata, line_no, "unknown key '" + std::string(key) + "'");
  }
  cfg.physics.validate();
  cfg.train.validate();
  cfg.fusion.thresholds.validate();
  return cfg;
}

} // namespace dualstream

#endif // DUALSTREAM_CONFIG_HPP
