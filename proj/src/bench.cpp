#include "resparc/bench.hpp"

#include "resparc/prng.hpp"

namespace resparc {

WeightMatrix random_weights(uint32_t rows, uint32_t cols, uint64_t seed,
                            bool nonnegative, double scale)
{
    WeightMatrix w;
    w.rows = rows;
    w.cols = cols;
    w.values.resize(size_t(rows) * cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            w.values[size_t(r) * cols + c] =
                scale * (nonnegative ? unit_draw(seed, r, c) : symmetric_draw(seed, r, c));
    return w;
}

SpikeTrain random_input(uint32_t width, uint32_t timesteps, double rate, uint64_t seed)
{
    std::vector<double> values(width);
    for (uint32_t i = 0; i < width; ++i)
        values[i] = rate * unit_draw(seed ^ 0x9e3779b9u, i);
    return rate_encode(values, timesteps, seed);
}

namespace {

// Weights drawn on the 4-bit level grid {-15..15}/15: the discretization the
// shipped crossbar technology offers, so precisions of 4 bits and above
// represent the network exactly.
WeightMatrix grid_weights(uint32_t rows, uint32_t cols, uint64_t seed)
{
    WeightMatrix w;
    w.rows = rows;
    w.cols = cols;
    w.values.resize(size_t(rows) * cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            int level = int(counter_hash(seed, r, c) % 31) - 15;
            w.values[size_t(r) * cols + c] = double(level) / 15.0;
        }
    return w;
}

} // namespace

SnnTopology make_desk_mlp(uint64_t seed)
{
    SnnTopology topo;
    LayerSpec l1;
    l1.kind = LayerKind::Dense;
    l1.n_in = 784;
    l1.n_out = 128;
    l1.threshold = 10.0; // sparse hidden activity at low input rates
    LayerSpec l2;
    l2.kind = LayerKind::Dense;
    l2.n_in = 128;
    l2.n_out = 10;
    l2.threshold = 1.0;
    topo.layers = {l1, l2};
    topo.weights.push_back(grid_weights(784, 128, counter_hash(seed, 1)));
    topo.weights.push_back(grid_weights(128, 10, counter_hash(seed, 2)));
    return topo;
}

SnnTopology make_desk_cnn(uint64_t seed)
{
    SnnTopology topo;
    LayerSpec conv1;
    conv1.kind = LayerKind::Conv;
    conv1.in_width = 16;
    conv1.in_height = 16;
    conv1.in_channels = 1;
    conv1.kernel = 3;
    conv1.out_channels = 4;
    conv1.stride = 1;
    conv1.threshold = 0.2;

    LayerSpec sub1;
    sub1.kind = LayerKind::Subsample;
    sub1.in_width = 14;
    sub1.in_height = 14;
    sub1.in_channels = 4;
    sub1.window = 2;
    sub1.stride = 2;
    sub1.threshold = 0.25;

    LayerSpec conv2;
    conv2.kind = LayerKind::Conv;
    conv2.in_width = 7;
    conv2.in_height = 7;
    conv2.in_channels = 4;
    conv2.kernel = 3;
    conv2.out_channels = 8;
    conv2.stride = 2;
    conv2.threshold = 0.3;

    LayerSpec head;
    head.kind = LayerKind::Dense;
    head.n_in = 3 * 3 * 8;
    head.n_out = 10;
    head.threshold = 1.0;

    topo.layers = {conv1, sub1, conv2, head};
    topo.weights.push_back(random_weights(9, 4, counter_hash(seed, 1), false, 1.0));
    topo.weights.push_back(WeightMatrix{});
    topo.weights.push_back(random_weights(36, 8, counter_hash(seed, 3), false, 1.0));
    topo.weights.push_back(random_weights(72, 10, counter_hash(seed, 4), false, 1.0));
    // skew the conv kernels positive so every feature channel stays active
    for (size_t l : {size_t(0), size_t(2)})
        for (double& w : topo.weights[l].values)
            w = w * 0.7 + 0.35;
    return topo;
}

} // namespace resparc
