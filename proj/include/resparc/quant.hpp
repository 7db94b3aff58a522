// Weight discretization onto memristor conductance levels, the differential
// signed-weight scheme, and analog column currents.
#pragma once

#include <cstdint>
#include <vector>

namespace resparc {

struct ConnectivityMatrix; // snn.hpp

enum class SignedMode { Differential, Unsigned };

struct QuantConfig {
    int bits = 4;             // levels L = 2^bits
    double r_min = 20e3;      // ohms, top conductance endpoint
    double r_max = 200e3;     // ohms, bottom conductance endpoint
    double v_read = 0.5;      // volts
    SignedMode mode = SignedMode::Differential;

    int levels() const { return 1 << bits; }
    double g_min() const { return 1.0 / r_max; }
    double g_max() const { return 1.0 / r_min; }
    void validate() const;
};

// One synapse as a (plus, minus) conductance-level pair. In Unsigned mode the
// minus cell is always 0. At most one of the two is nonzero.
struct QuantEntry {
    int16_t plus = 0;
    int16_t minus = 0;
    int16_t signed_level() const { return static_cast<int16_t>(plus - minus); }
};

// level = round(|w| / w_max * (L-1)); the sign picks the plus or minus cell.
QuantEntry quantize_weight(double w, double w_max, const QuantConfig& cfg);

// Linear-in-conductance spacing between g_min (level 0) and g_max (level L-1).
double level_to_conductance(int level, const QuantConfig& cfg);

// Inverse map: sign * level / (L-1) * w_max.
double effective_weight(QuantEntry entry, double w_max, const QuantConfig& cfg);

struct QuantizedColumn {
    std::vector<QuantEntry> cells; // one per input row
    double w_max = 0.0;
};

QuantizedColumn quantize_column(const std::vector<double>& weights, double w_max,
                                const QuantConfig& cfg);

// Physical column current in amps: v_read * sum spike_i * (G+_i - G-_i)
// (Unsigned: G_i, including the g_min baseline of spiking rows).
double column_current(const uint8_t* spikes, size_t n, const QuantizedColumn& col,
                      const QuantConfig& cfg);

// Scale constant tying physical currents to effective-weight dot products:
// column_current == kappa * sum spike_i * effective_weight_i  (Differential,
// and Unsigned after subtracting the analytic g_min baseline).
double kappa(const QuantConfig& cfg, double w_max);

// A whole layer quantized to signed levels, dense row-major. The mapped
// simulation and the quantized reference oracle both read from this: level
// sums are integers, so any partitioning of the rows yields the same sum.
struct LevelMatrix {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<int16_t> levels; // rows x cols, signed level = plus - minus
    double w_max = 0.0;
    double unit = 0.0;           // w_max / (L-1); 0 when the layer is all-zero

    int16_t at(uint32_t r, uint32_t c) const { return levels[size_t(r) * cols + c]; }
    const int16_t* row(uint32_t r) const { return levels.data() + size_t(r) * cols; }
};

// w_max is taken as max|w| over the matrix. Throws InputError for negative
// weights in Unsigned mode.
LevelMatrix quantize_connectivity(const ConnectivityMatrix& m, const QuantConfig& cfg);

} // namespace resparc
