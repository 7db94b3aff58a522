// Desk-scale benchmark networks with deterministic random weights: one MLP
// (784-128-10) and one small CNN (16x16 input, two conv stages, dense head).
#pragma once

#include <cstdint>

#include "resparc/snn.hpp"

namespace resparc {

SnnTopology make_desk_mlp(uint64_t seed);
SnnTopology make_desk_cnn(uint64_t seed);

// Random dense/conv test network for randomized equivalence checks.
// nonnegative=true keeps all weights >= 0 (for Unsigned quantization).
WeightMatrix random_weights(uint32_t rows, uint32_t cols, uint64_t seed,
                            bool nonnegative, double scale);

// Random input values in [0, rate] rate-encoded over T timesteps.
SpikeTrain random_input(uint32_t width, uint32_t timesteps, double rate, uint64_t seed);

} // namespace resparc
