// SNN topologies, integrate-and-fire dynamics, spike encoding, and the dense
// reference simulator used as the oracle for the mapped architecture.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resparc/quant.hpp"

namespace resparc {

enum class LayerKind { Dense, Conv, Subsample };

const char* layer_kind_name(LayerKind k);

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;

    // Dense
    uint32_t n_in = 0;
    uint32_t n_out = 0;

    // Conv / Subsample input volume (planar, channel-major indexing:
    // flat = (c * in_height + y) * in_width + x)
    uint32_t in_width = 0;
    uint32_t in_height = 0;
    uint32_t in_channels = 0;

    // Conv
    uint32_t kernel = 0;
    uint32_t out_channels = 0;
    uint32_t stride = 1;

    // Subsample (stride shared with conv field)
    uint32_t window = 0;

    double threshold = 1.0;

    uint32_t out_width() const;
    uint32_t out_height() const;
    uint32_t fan_in() const;   // flat input count of the layer
    uint32_t fan_out() const;  // flat output count of the layer
    // Per-output-neuron synapse count (receptive field size).
    uint32_t synapses_per_output() const;

    void validate(size_t layer_index) const; // throws InputError
};

// Dense weights: n_in x n_out. Conv weights: (k*k*in_channels) x out_channels,
// the shared kernel per output channel. Subsample layers carry no weights.
struct WeightMatrix {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<double> values; // row-major (input-major)

    double at(uint32_t r, uint32_t c) const { return values[size_t(r) * cols + c]; }
    double& at(uint32_t r, uint32_t c) { return values[size_t(r) * cols + c]; }
    double max_abs() const;
};

struct SnnTopology {
    std::vector<LayerSpec> layers;
    std::vector<WeightMatrix> weights; // one per layer (empty for subsample)

    void validate() const; // throws InputError with the offending layer named
};

struct SpikeTrain {
    uint32_t timesteps = 0;
    uint32_t width = 0;
    std::vector<uint8_t> bits; // timesteps x width, 0/1

    SpikeTrain() = default;
    SpikeTrain(uint32_t t, uint32_t w) : timesteps(t), width(w), bits(size_t(t) * w, 0) {}
    uint8_t at(uint32_t t, uint32_t i) const { return bits[size_t(t) * width + i]; }
    void set(uint32_t t, uint32_t i, uint8_t v) { bits[size_t(t) * width + i] = v; }
    const uint8_t* row(uint32_t t) const { return bits.data() + size_t(t) * width; }
    uint8_t* row(uint32_t t) { return bits.data() + size_t(t) * width; }
    uint64_t spike_count() const;
    uint64_t spike_count(uint32_t neuron) const;

    bool operator==(const SpikeTrain&) const = default;
};

struct NeuronState {
    double potential = 0.0;
    double threshold = 1.0;
};

// Per-layer synapse matrix (fan_in x fan_out), sparse by column. Dense layers
// set `dense` and list every row in every column.
struct ConnectivityMatrix {
    struct Entry {
        uint32_t row;
        double weight;
    };
    uint32_t rows = 0;
    uint32_t cols = 0;
    bool dense = false;
    std::vector<std::vector<Entry>> columns; // ascending row index per column

    size_t nnz() const;
    std::vector<double> to_dense() const; // row-major rows x cols
    double max_abs() const;
};

ConnectivityMatrix build_connectivity(const LayerSpec& layer, const WeightMatrix& weights);

// One IF step; returns the spike (at most one per step regardless of
// overshoot) and updates the state in place.
uint8_t if_step(NeuronState& state, double input_current);

// Bernoulli rate coding: entry (t, i) spikes iff unit_draw(seed, i, t) <
// value[i]. Values must lie in [0, 1].
SpikeTrain rate_encode(const std::vector<double>& values, uint32_t timesteps,
                       uint64_t seed);

// Dense layer-by-layer simulation; the oracle for the mapped architecture.
// With quant supplied, synaptic sums are computed in integer level space and
// scaled by w_max/(L-1), exactly as the mapped simulation does.
std::vector<SpikeTrain> reference_forward(const SnnTopology& topology,
                                          const SpikeTrain& input,
                                          const QuantConfig* quant = nullptr);

// Argmax of output-layer spike counts; ties break to the lowest index.
uint32_t classify(const SpikeTrain& output_layer);

} // namespace resparc
