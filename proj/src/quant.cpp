#include "resparc/quant.hpp"

#include <cmath>
#include <string>

#include "resparc/errors.hpp"
#include "resparc/snn.hpp"

namespace resparc {

void QuantConfig::validate() const
{
    if (bits < 1 || bits > 8)
        throw InputError("quant: bits must be in [1, 8], got " + std::to_string(bits));
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw InputError("quant: need 0 < r_min < r_max");
    if (!(v_read > 0.0))
        throw InputError("quant: v_read must be positive");
}

QuantEntry quantize_weight(double w, double w_max, const QuantConfig& cfg)
{
    if (!(w_max > 0.0))
        throw InputError("quantize_weight: w_max must be positive");
    if (std::abs(w) > w_max)
        throw InputError("quantize_weight: |w| exceeds w_max (" + std::to_string(w) +
                         " vs " + std::to_string(w_max) + "); rescale the layer first");
    if (cfg.mode == SignedMode::Unsigned && w < 0.0)
        throw InputError("quantize_weight: negative weight in Unsigned mode");

    const int top = cfg.levels() - 1;
    auto level = static_cast<int16_t>(std::lround(std::abs(w) / w_max * top));
    QuantEntry e;
    if (w >= 0.0)
        e.plus = level;
    else
        e.minus = level;
    return e;
}

double level_to_conductance(int level, const QuantConfig& cfg)
{
    if (level < 0 || level >= cfg.levels())
        throw InputError("level_to_conductance: level " + std::to_string(level) +
                         " out of [0, " + std::to_string(cfg.levels() - 1) + "]");
    const int top = cfg.levels() - 1;
    return cfg.g_min() + double(level) * (cfg.g_max() - cfg.g_min()) / double(top);
}

double effective_weight(QuantEntry entry, double w_max, const QuantConfig& cfg)
{
    return double(entry.signed_level()) / double(cfg.levels() - 1) * w_max;
}

QuantizedColumn quantize_column(const std::vector<double>& weights, double w_max,
                                const QuantConfig& cfg)
{
    QuantizedColumn col;
    col.w_max = w_max;
    col.cells.reserve(weights.size());
    for (double w : weights)
        col.cells.push_back(quantize_weight(w, w_max, cfg));
    return col;
}

double column_current(const uint8_t* spikes, size_t n, const QuantizedColumn& col,
                      const QuantConfig& cfg)
{
    if (n != col.cells.size())
        throw InputError("column_current: spike vector length " + std::to_string(n) +
                         " != column rows " + std::to_string(col.cells.size()));
    double g_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!spikes[i])
            continue;
        const QuantEntry& e = col.cells[i];
        if (cfg.mode == SignedMode::Differential)
            g_sum += level_to_conductance(e.plus, cfg) - level_to_conductance(e.minus, cfg);
        else
            g_sum += level_to_conductance(e.plus, cfg);
    }
    return cfg.v_read * g_sum;
}

double kappa(const QuantConfig& cfg, double w_max)
{
    return cfg.v_read * (cfg.g_max() - cfg.g_min()) / w_max;
}

LevelMatrix quantize_connectivity(const ConnectivityMatrix& m, const QuantConfig& cfg)
{
    LevelMatrix out;
    out.rows = m.rows;
    out.cols = m.cols;
    out.levels.assign(size_t(m.rows) * m.cols, 0);
    out.w_max = m.max_abs();
    out.unit = out.w_max > 0.0 ? out.w_max / double(cfg.levels() - 1) : 0.0;
    if (out.w_max == 0.0)
        return out; // all-zero layer: every level 0
    for (uint32_t c = 0; c < m.cols; ++c) {
        for (const auto& e : m.columns[c]) {
            QuantEntry q = quantize_weight(e.weight, out.w_max, cfg);
            out.levels[size_t(e.row) * m.cols + c] = q.signed_level();
        }
    }
    return out;
}

} // namespace resparc
