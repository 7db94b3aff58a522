#include "resparc/snn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resparc/errors.hpp"
#include "resparc/kernels.hpp"
#include "resparc/prng.hpp"

namespace resparc {

const char* layer_kind_name(LayerKind k)
{
    switch (k) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv: return "conv";
    case LayerKind::Subsample: return "subsample";
    }
    return "?";
}

uint32_t LayerSpec::out_width() const
{
    if (kind == LayerKind::Conv)
        return (in_width - kernel) / stride + 1;
    return (in_width - window) / stride + 1;
}

uint32_t LayerSpec::out_height() const
{
    if (kind == LayerKind::Conv)
        return (in_height - kernel) / stride + 1;
    return (in_height - window) / stride + 1;
}

uint32_t LayerSpec::fan_in() const
{
    if (kind == LayerKind::Dense)
        return n_in;
    return in_width * in_height * in_channels;
}

uint32_t LayerSpec::fan_out() const
{
    switch (kind) {
    case LayerKind::Dense: return n_out;
    case LayerKind::Conv: return out_width() * out_height() * out_channels;
    case LayerKind::Subsample: return out_width() * out_height() * in_channels;
    }
    return 0;
}

uint32_t LayerSpec::synapses_per_output() const
{
    switch (kind) {
    case LayerKind::Dense: return n_in;
    case LayerKind::Conv: return kernel * kernel * in_channels;
    case LayerKind::Subsample: return window * window;
    }
    return 0;
}

void LayerSpec::validate(size_t layer_index) const
{
    const std::string where = "layer " + std::to_string(layer_index) + " (" +
                              layer_kind_name(kind) + "): ";
    if (!(threshold > 0.0))
        throw InputError(where + "threshold must be positive");
    switch (kind) {
    case LayerKind::Dense:
        if (n_in == 0 || n_out == 0)
            throw InputError(where + "n_in and n_out must be positive");
        break;
    case LayerKind::Conv:
        if (in_width == 0 || in_height == 0 || in_channels == 0 || kernel == 0 ||
            out_channels == 0 || stride == 0)
            throw InputError(where + "all dimensions must be positive");
        if (kernel > in_width || kernel > in_height)
            throw InputError(where + "kernel exceeds input extent");
        if ((in_width - kernel) % stride != 0 || (in_height - kernel) % stride != 0)
            throw InputError(where + "output extent not integral: (in - k) % stride != 0");
        break;
    case LayerKind::Subsample:
        if (in_width == 0 || in_height == 0 || in_channels == 0 || window == 0 ||
            stride == 0)
            throw InputError(where + "all dimensions must be positive");
        if (window > in_width || window > in_height)
            throw InputError(where + "window exceeds input extent");
        if ((in_width - window) % stride != 0 || (in_height - window) % stride != 0)
            throw InputError(where + "output extent not integral: (in - w) % stride != 0");
        break;
    }
}

double WeightMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values)
        m = std::max(m, std::abs(v));
    return m;
}

void SnnTopology::validate() const
{
    if (layers.empty())
        throw InputError("topology has no layers");
    if (weights.size() != layers.size())
        throw InputError("topology has " + std::to_string(layers.size()) + " layers but " +
                         std::to_string(weights.size()) + " weight matrices");
    for (size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        l.validate(i);
        if (i > 0 && layers[i - 1].fan_out() != l.fan_in())
            throw InputError("layer " + std::to_string(i) + ": fan-in " +
                             std::to_string(l.fan_in()) + " != previous layer fan-out " +
                             std::to_string(layers[i - 1].fan_out()));
        const WeightMatrix& w = weights[i];
        uint32_t want_rows = 0, want_cols = 0;
        switch (l.kind) {
        case LayerKind::Dense:
            want_rows = l.n_in;
            want_cols = l.n_out;
            break;
        case LayerKind::Conv:
            want_rows = l.kernel * l.kernel * l.in_channels;
            want_cols = l.out_channels;
            break;
        case LayerKind::Subsample:
            break; // no weights
        }
        if (w.rows != want_rows || w.cols != want_cols)
            throw InputError("layer " + std::to_string(i) + ": weight matrix is " +
                             std::to_string(w.rows) + "x" + std::to_string(w.cols) +
                             ", expected " + std::to_string(want_rows) + "x" +
                             std::to_string(want_cols));
        for (double v : w.values)
            if (!std::isfinite(v))
                throw InputError("layer " + std::to_string(i) + ": non-finite weight");
    }
}

uint64_t SpikeTrain::spike_count() const
{
    uint64_t n = 0;
    for (uint8_t b : bits)
        n += b;
    return n;
}

uint64_t SpikeTrain::spike_count(uint32_t neuron) const
{
    uint64_t n = 0;
    for (uint32_t t = 0; t < timesteps; ++t)
        n += at(t, neuron);
    return n;
}

size_t ConnectivityMatrix::nnz() const
{
    size_t n = 0;
    for (const auto& col : columns)
        n += col.size();
    return n;
}

std::vector<double> ConnectivityMatrix::to_dense() const
{
    std::vector<double> d(size_t(rows) * cols, 0.0);
    for (uint32_t c = 0; c < cols; ++c)
        for (const auto& e : columns[c])
            d[size_t(e.row) * cols + c] = e.weight;
    return d;
}

double ConnectivityMatrix::max_abs() const
{
    double m = 0.0;
    for (const auto& col : columns)
        for (const auto& e : col)
            m = std::max(m, std::abs(e.weight));
    return m;
}

namespace {

ConnectivityMatrix dense_connectivity(const LayerSpec& layer, const WeightMatrix& w)
{
    ConnectivityMatrix m;
    m.rows = layer.n_in;
    m.cols = layer.n_out;
    m.dense = true;
    m.columns.resize(m.cols);
    for (uint32_t c = 0; c < m.cols; ++c) {
        m.columns[c].reserve(m.rows);
        for (uint32_t r = 0; r < m.rows; ++r)
            m.columns[c].push_back({r, w.at(r, c)});
    }
    return m;
}

ConnectivityMatrix conv_connectivity(const LayerSpec& l, const WeightMatrix& w)
{
    ConnectivityMatrix m;
    m.rows = l.fan_in();
    m.cols = l.fan_out();
    m.columns.resize(m.cols);
    const uint32_t ow = l.out_width(), oh = l.out_height();
    for (uint32_t oc = 0; oc < l.out_channels; ++oc) {
        for (uint32_t oy = 0; oy < oh; ++oy) {
            for (uint32_t ox = 0; ox < ow; ++ox) {
                const uint32_t col = (oc * oh + oy) * ow + ox;
                auto& entries = m.columns[col];
                entries.reserve(l.kernel * l.kernel * l.in_channels);
                for (uint32_t ic = 0; ic < l.in_channels; ++ic) {
                    for (uint32_t ky = 0; ky < l.kernel; ++ky) {
                        for (uint32_t kx = 0; kx < l.kernel; ++kx) {
                            const uint32_t iy = oy * l.stride + ky;
                            const uint32_t ix = ox * l.stride + kx;
                            const uint32_t row = (ic * l.in_height + iy) * l.in_width + ix;
                            const uint32_t krow = (ic * l.kernel + ky) * l.kernel + kx;
                            entries.push_back({row, w.at(krow, oc)});
                        }
                    }
                }
                std::sort(entries.begin(), entries.end(),
                          [](const auto& a, const auto& b) { return a.row < b.row; });
            }
        }
    }
    return m;
}

ConnectivityMatrix subsample_connectivity(const LayerSpec& l)
{
    ConnectivityMatrix m;
    m.rows = l.fan_in();
    m.cols = l.fan_out();
    m.columns.resize(m.cols);
    const uint32_t ow = l.out_width(), oh = l.out_height();
    const double avg = 1.0 / double(l.window * l.window);
    for (uint32_t c = 0; c < l.in_channels; ++c) {
        for (uint32_t oy = 0; oy < oh; ++oy) {
            for (uint32_t ox = 0; ox < ow; ++ox) {
                const uint32_t col = (c * oh + oy) * ow + ox;
                auto& entries = m.columns[col];
                for (uint32_t wy = 0; wy < l.window; ++wy) {
                    for (uint32_t wx = 0; wx < l.window; ++wx) {
                        const uint32_t iy = oy * l.stride + wy;
                        const uint32_t ix = ox * l.stride + wx;
                        entries.push_back({(c * l.in_height + iy) * l.in_width + ix, avg});
                    }
                }
                std::sort(entries.begin(), entries.end(),
                          [](const auto& a, const auto& b) { return a.row < b.row; });
            }
        }
    }
    return m;
}

} // namespace

ConnectivityMatrix build_connectivity(const LayerSpec& layer, const WeightMatrix& weights)
{
    layer.validate(0);
    switch (layer.kind) {
    case LayerKind::Dense:
        if (weights.rows != layer.n_in || weights.cols != layer.n_out)
            throw InputError("build_connectivity: dense weights are " +
                             std::to_string(weights.rows) + "x" + std::to_string(weights.cols) +
                             ", layer needs " + std::to_string(layer.n_in) + "x" +
                             std::to_string(layer.n_out));
        return dense_connectivity(layer, weights);
    case LayerKind::Conv:
        if (weights.rows != layer.kernel * layer.kernel * layer.in_channels ||
            weights.cols != layer.out_channels)
            throw InputError("build_connectivity: conv kernel weights are " +
                             std::to_string(weights.rows) + "x" + std::to_string(weights.cols) +
                             ", layer needs " +
                             std::to_string(layer.kernel * layer.kernel * layer.in_channels) +
                             "x" + std::to_string(layer.out_channels));
        return conv_connectivity(layer, weights);
    case LayerKind::Subsample:
        return subsample_connectivity(layer);
    }
    throw InputError("build_connectivity: unknown layer kind");
}

uint8_t if_step(NeuronState& state, double input_current)
{
    state.potential += input_current;
    if (state.potential >= state.threshold) {
        state.potential -= state.threshold;
        return 1;
    }
    return 0;
}

SpikeTrain rate_encode(const std::vector<double>& values, uint32_t timesteps, uint64_t seed)
{
    if (timesteps == 0)
        throw InputError("rate_encode: timesteps must be >= 1");
    for (size_t i = 0; i < values.size(); ++i)
        if (!(values[i] >= 0.0 && values[i] <= 1.0))
            throw InputError("rate_encode: value " + std::to_string(values[i]) +
                             " at index " + std::to_string(i) + " outside [0, 1]");
    SpikeTrain train(timesteps, static_cast<uint32_t>(values.size()));
    for (uint32_t t = 0; t < timesteps; ++t)
        for (uint32_t i = 0; i < train.width; ++i)
            if (unit_draw(seed, i, t) < values[i])
                train.set(t, i, 1);
    return train;
}

std::vector<SpikeTrain> reference_forward(const SnnTopology& topology,
                                          const SpikeTrain& input,
                                          const QuantConfig* quant)
{
    topology.validate();
    if (input.width != topology.layers.front().fan_in())
        throw InputError("reference_forward: input width " + std::to_string(input.width) +
                         " != first-layer fan-in " +
                         std::to_string(topology.layers.front().fan_in()));

    const auto& k = kernels::ops();
    const size_t nlayers = topology.layers.size();

    // Per-layer synapse matrices, dense row-major.
    std::vector<std::vector<double>> dense_w(nlayers);
    std::vector<LevelMatrix> level_w(nlayers);
    for (size_t l = 0; l < nlayers; ++l) {
        ConnectivityMatrix conn = build_connectivity(topology.layers[l], topology.weights[l]);
        if (quant)
            level_w[l] = quantize_connectivity(conn, *quant);
        else
            dense_w[l] = conn.to_dense();
    }

    std::vector<SpikeTrain> out;
    out.reserve(nlayers);
    for (size_t l = 0; l < nlayers; ++l)
        out.emplace_back(input.timesteps, topology.layers[l].fan_out());

    std::vector<std::vector<double>> potential(nlayers);
    for (size_t l = 0; l < nlayers; ++l)
        potential[l].assign(topology.layers[l].fan_out(), 0.0);

    std::vector<double> currents;
    std::vector<int32_t> acc_i;
    std::vector<double> acc_f;

    for (uint32_t t = 0; t < input.timesteps; ++t) {
        const uint8_t* prev = input.row(t);
        uint32_t prev_n = input.width;
        for (size_t l = 0; l < nlayers; ++l) {
            const uint32_t n_out = topology.layers[l].fan_out();
            currents.assign(n_out, 0.0);
            if (quant) {
                const LevelMatrix& m = level_w[l];
                acc_i.assign(n_out, 0);
                for (uint32_t i = 0; i < prev_n; ++i)
                    if (prev[i])
                        k.add_row_i32(acc_i.data(), m.row(i), n_out);
                for (uint32_t j = 0; j < n_out; ++j)
                    currents[j] = double(acc_i[j]) * m.unit;
            } else {
                acc_f.assign(n_out, 0.0);
                const double* m = dense_w[l].data();
                for (uint32_t i = 0; i < prev_n; ++i)
                    if (prev[i])
                        k.add_row_f64(acc_f.data(), m + size_t(i) * n_out, n_out);
                currents = acc_f;
            }
            k.if_update(potential[l].data(), currents.data(),
                        topology.layers[l].threshold, out[l].row(t), n_out);
            prev = out[l].row(t);
            prev_n = n_out;
        }
    }
    return out;
}

uint32_t classify(const SpikeTrain& output_layer)
{
    uint32_t best = 0;
    uint64_t best_count = output_layer.spike_count(0);
    for (uint32_t i = 1; i < output_layer.width; ++i) {
        uint64_t c = output_layer.spike_count(i);
        if (c > best_count) {
            best = i;
            best_count = c;
        }
    }
    return best;
}

} // namespace resparc
