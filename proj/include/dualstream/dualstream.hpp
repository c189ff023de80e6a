#ifndef DUALSTREAM_DUALSTREAM_HPP
#define DUALSTREAM_DUALSTREAM_HPP

#include "autoencoder/adam.hpp"
#include "autoencoder/lstm.hpp"
#include "autoencoder/model.hpp"
#include "autoencoder/model_io.hpp"
#include "autoencoder/train.hpp"
#include "bench.hpp"
#include "config.hpp"
#include "corpus_io.hpp"
#include "error.hpp"
#include "fusion.hpp"
#include "physics.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "synthgen.hpp"
#include "telemetry.hpp"
#include "text.hpp"

#endif // DUALSTREAM_DUALSTREAM_HPP
